// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsbesov/cli_harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "nsbesov/besov_split.hpp"
#include "nsbesov/energy_solver.hpp"
#include "nsbesov/fourier_calculus.hpp"
#include "nsbesov/littlewood_paley.hpp"
#include "nsbesov/mild_solver.hpp"
#include "nsbesov/random_fields.hpp"

namespace nsbesov {
namespace {

using nlohmann::json;

void check(bool ok, const std::string& field, const std::string& why) {
  require(ok, Reason::invalid_argument, "config: field '" + field + "' " + why);
}

// Reads one key when present; type errors name the key.
template <class T>
void read(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    fail(Reason::invalid_argument, std::string("config: field '") + key + "' has the wrong type (" +
                                       it->type_name() + ")");
  }
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& out) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  T value{};
  read(j, key, value);
  out = value;
}

json ledger_json(const ExponentLedger& e) {
  return {{"p", e.p},
          {"alpha", e.alpha},
          {"p0", e.p0},
          {"p1", e.p1},
          {"p2", e.p2},
          {"theta_inf", e.theta_inf},
          {"theta_gen", e.theta_gen},
          {"delta", e.delta},
          {"delta1", e.delta1},
          {"delta2", e.delta2},
          {"kappa", e.kappa},
          {"beta_p", e.beta_p},
          {"gamma1", e.gamma1},
          {"gamma2", e.gamma2},
          {"threshold_slope", e.threshold_slope},
          {"general_slope", e.general_slope},
          {"decay_rate", e.decay_rate},
          {"decay_beta", e.decay_beta}};
}

json norms_json(const NormTable& t) {
  return {{"N", t.N},
          {"data_critical", t.data_critical},
          {"bar_subcritical", t.bar_subcritical},
          {"tilde_l2", t.tilde_l2},
          {"bar_critical", t.bar_critical},
          {"tilde_critical", t.tilde_critical},
          {"reconstruction_error", t.reconstruction_error},
          {"bar_divergence", t.bar_divergence},
          {"tilde_divergence", t.tilde_divergence}};
}

Table energy_table(std::string name, const EnergyTrace& trace) {
  Table t{std::move(name), {"t", "kinetic", "dissipation", "rhs", "slack"}, {}};
  for (std::size_t i = 0; i < trace.times.size(); ++i)
    t.rows.push_back({trace.times[i], trace.kinetic[i], trace.dissipation[i], trace.rhs[i], trace.slack[i]});
  return t;
}

Table picard_table(const std::vector<PicardIterate>& history) {
  Table t{"picard", {"k", "norm", "residual", "ratio"}, {}};
  for (const auto& h : history) t.rows.push_back({std::int64_t(h.k), h.norm, h.residual, h.ratio});
  return t;
}

Table gate_table(const std::vector<GateRecord>& sweep) {
  Table t{"gate", {"N", "bar_norm", "c_heat", "value", "open"}, {}};
  for (const auto& g : sweep) t.rows.push_back({g.N, g.bar_norm, g.c_heat, g.value, std::int64_t(g.open)});
  return t;
}

// Everything a pipeline needs besides its own parameters.
struct Setup {
  const ExperimentConfig& config;
  Partition part;
  SpectralField data;
  Report report;
};

SpectralField input_field(const ExperimentConfig& c, const Partition& part) {
  if (c.input) {
    auto f = load_field<3>(*c.input);
    require(f.grid().n() == part.grid().n() && f.grid().length() == part.grid().length(), Reason::grid_mismatch,
            "input field " + *c.input + " is not on the configured grid");
    return f;
  }
  FieldRecipe r;
  r.seed = c.seed;
  r.p = c.p;
  r.critical_norm = c.amplitude;
  return random_besov_field(part, r);
}

ComposeOptions compose_options(const ExperimentConfig& c) {
  ComposeOptions o;
  o.time_steps = c.time_steps;
  o.N = c.N;
  o.k_lo = c.k_lo;
  o.k_hi = c.k_hi;
  o.energy.slack_tol = c.tolerances.energy_slack;
  o.energy.fixed_point_tol = c.tolerances.fixed_point;
  o.picard.tol = c.tolerances.picard;
  return o;
}

// eps3 = 1 / (8 c) from a calibrated X4 bilinear constant unless configured.
double smallness_gate(Setup& s, const TimeGrid& tg) {
  if (s.config.eps3 > 0.0) return s.config.eps3;
  std::vector<SpectralField> samples;
  for (std::uint64_t i = 0; i < 2; ++i) {
    FieldRecipe r;
    r.seed = s.config.seed + 1000 + i;
    samples.push_back(random_besov_field(s.part, r));
  }
  const double c = calibrate_bilinear_constant(samples, tg);
  s.report.certificate["c_bilinear_x4"] = c;
  return 1.0 / (8.0 * c);
}

void run_split(Setup& s) {
  const auto ledger = derive_exponents(s.config.p);
  std::vector<double> levels;
  if (s.config.N)
    levels.push_back(*s.config.N);
  else
    for (int k = s.config.k_lo; k <= s.config.k_hi; ++k) levels.push_back(std::ldexp(1.0, k));
  Table t{"split",
          {"N", "data_critical", "bar_subcritical", "tilde_l2", "bar_critical", "tilde_critical",
           "reconstruction_error"},
          {}};
  double worst_rec = 0.0, worst_div = 0.0;
  for (double N : levels) {
    auto r = compose_split(s.data, N, ledger, s.part);
    const auto& n = r.norms;
    t.rows.push_back({N, n.data_critical, n.bar_subcritical, n.tilde_l2, n.bar_critical, n.tilde_critical,
                      n.reconstruction_error});
    worst_rec = std::max(worst_rec, n.reconstruction_error);
    worst_div = std::max({worst_div, n.bar_divergence, n.tilde_divergence});
    if (levels.size() == 1) {
      s.report.fields.push_back({"bar", std::move(r.bar)});
      s.report.fields.push_back({"tilde", std::move(r.tilde)});
    }
  }
  s.report.certificate["worst_reconstruction"] = worst_rec;
  s.report.certificate["worst_divergence"] = worst_div;
  s.report.tables.push_back(std::move(t));
}

void run_norm(Setup& s) {
  const double p = s.config.p, sp = critical_index(p);
  const auto lp = block_lp_norms(s.data, p, s.part);
  const auto l2 = block_lp_norms(s.data, 2.0, s.part);
  Table t{"blocks", {"j", "lp", "l2"}, {}};
  for (int j = lp.j_lo; j <= lp.j_hi(); ++j) t.rows.push_back({std::int64_t(j), lp.at(j), l2.at(j)});
  s.report.tables.push_back(std::move(t));
  const auto dyadic = besov_from_blocks(lp, sp, kInfinity, s.part);
  s.report.certificate["critical"] = {{"s", sp}, {"p", p}, {"value", dyadic.value}, {"tail", dyadic.tail_bound}};
  if (sp < 0.0) {
    const auto heat = besov_norm_heat(s.data, sp, p, kInfinity, s.part, 2);
    s.report.certificate["critical_heat"] = {{"value", heat.value}, {"tail", heat.tail_bound}};
  }
  s.report.certificate["l2"] = l2_norm(s.data);
}

void run_heat(Setup& s) {
  const auto times = dyadic_times(s.part.j_min() - 2.0, s.part.j_max() + 1.0, 2);
  struct Case {
    int m, k;
    double r;
  };
  Table t{"semigroup", {"m", "k", "r", "t", "ratio"}, {}};
  json worst = json::array();
  for (const Case c : {Case{0, 0, 4.0}, Case{1, 0, 4.0}, Case{0, 1, 6.0}, Case{0, 2, 4.0}}) {
    const auto chk = semigroup_derivative_bound_check(s.data, c.m, c.k, c.r, times, s.part);
    for (std::size_t i = 0; i < chk.times.size(); ++i)
      t.rows.push_back({std::int64_t(c.m), std::int64_t(c.k), c.r, chk.times[i], chk.ratios[i]});
    worst.push_back({{"m", c.m}, {"k", c.k}, {"r", c.r}, {"worst_ratio", chk.worst_ratio}});
  }
  s.report.certificate["worst"] = std::move(worst);
  s.report.tables.push_back(std::move(t));
}

void run_mild(Setup& s) {
  const auto tg = TimeGrid::graded(s.config.T, s.config.time_steps);
  const double eps3 = smallness_gate(s, tg);
  const auto sol = picard_solve(s.data, tg, {s.config.tolerances.picard, 60, eps3});
  const auto trace = mild_energy_trace(sol);
  s.report.certificate["eps3"] = eps3;
  s.report.certificate["caloric_x4"] = sol.caloric_norm;
  s.report.certificate["converged"] = sol.converged;
  s.report.certificate["energy_bound_ratio"] = mild_energy_bound_ratio(sol);
  s.report.tables.push_back(picard_table(sol.history));
  s.report.tables.push_back(energy_table("energy", trace));
  s.report.fields.push_back({"velocity_T", sol.velocity.back()});
}

void run_energy(Setup& s) {
  const auto tg = TimeGrid::graded(s.config.T, s.config.time_steps);
  PerturbedOptions o;
  o.background = Background::caloric;
  o.slack_tol = s.config.tolerances.energy_slack;
  o.fixed_point_tol = s.config.tolerances.fixed_point;
  SpectralField zero(s.part.grid());
  zero.mark_divergence_free(true);
  const auto sol = solve_perturbed(caloric_extension(s.data, tg), zero, tg, o);
  s.report.certificate["worst_slack"] = sol.trace.worst_slack();
  s.report.certificate["worst_courant"] = sol.worst_courant;
  s.report.tables.push_back(energy_table("energy", sol.trace));
  Table it{"fixed_point", {"step", "iterations"}, {}};
  for (std::size_t i = 0; i < sol.fixed_point_iterations.size(); ++i)
    it.rows.push_back({std::int64_t(i + 1), std::int64_t(sol.fixed_point_iterations[i])});
  s.report.tables.push_back(std::move(it));
  s.report.fields.push_back({"perturbation_T", sol.u.back()});
}

void run_compose(Setup& s) {
  const auto sol = build_composed_solution(s.data, s.config.T, s.config.p, s.part, compose_options(s.config));
  auto& cert = s.report.certificate;
  cert["construction"] = sol.construction == Construction::caloric_background ? "caloric_background"
                                                                               : "mild_background";
  cert["split"] = norms_json(sol.split.norms);
  cert["c_bilinear"] = sol.c_bilinear;
  cert["c_heat"] = sol.gate.c_heat;
  cert["gate_value"] = sol.gate.value;
  cert["time_steps"] = sol.grid.steps();
  cert["refinements"] = sol.refinements;
  cert["worst_slack"] = sol.energy.worst_slack();
  if (sol.split_energy) cert["worst_split_slack"] = sol.split_energy->worst_slack();
  cert["mild_bound_ratio"] = sol.mild_bound_ratio;
  cert["worst_courant"] = sol.worst_courant;
  cert["reconstruction_defect"] = sol.reconstruction_defect();
  cert["divergence"] = sol.divergence();
  const auto ledger = derive_exponents(s.config.p);
  try {
    const auto fit = decay_exponent_fit(sol.energy, s.config.T / 10.0, ledger);
    cert["decay"] = {{"slope", fit.slope}, {"target", fit.target}, {"points", fit.points}};
  } catch (const Error& e) {
    cert["decay"] = {{"skipped", e.what()}};
  }
  s.report.tables.push_back(gate_table(sol.gate_sweep));
  s.report.tables.push_back(energy_table("energy", sol.energy));
  if (sol.split_energy) s.report.tables.push_back(energy_table("split_energy", *sol.split_energy));
  if (!sol.picard_history.empty()) s.report.tables.push_back(picard_table(sol.picard_history));
  s.report.fields.push_back({"velocity_T", sol.v.back()});
}

void run_uniqueness(Setup& s) {
  const auto tg = TimeGrid::graded(s.config.T, s.config.time_steps);
  const double eps = smallness_gate(s, tg);
  const auto rep = uniqueness_compare(s.data, s.config.T, eps, s.part, compose_options(s.config));
  s.report.certificate["eps3"] = eps;
  s.report.certificate["caloric_x4"] = rep.caloric_x4;
  s.report.certificate["relative_difference"] = rep.relative_difference;
  Table t{"uniqueness", {"t", "relative_difference"}, {}};
  for (std::size_t i = 0; i < rep.per_node.size(); ++i) t.rows.push_back({tg.at(int(i)), rep.per_node[i]});
  s.report.tables.push_back(std::move(t));
}

void run_stability(Setup& s) {
  const auto rep = stability_demo(s.data, s.config.ks, s.config.T, s.part, compose_options(s.config));
  Table t{"stability", {"k", "solved", "window_distance", "failure"}, {}};
  Table pair{"pairings", {"k", "test", "pairing", "full"}, {}};
  for (const auto& m : rep.members) {
    t.rows.push_back({std::int64_t(m.k), std::int64_t(m.solved), m.window_distance, m.failure});
    for (std::size_t i = 0; i < m.pairings.size(); ++i)
      pair.rows.push_back({std::int64_t(m.k), std::int64_t(i), m.pairings[i], rep.full_pairings[i]});
  }
  s.report.certificate["window"] = {rep.window_lo, rep.window_hi};
  s.report.certificate["monotone"] = rep.monotone;
  s.report.tables.push_back(std::move(t));
  s.report.tables.push_back(std::move(pair));
}

// Cheap structural checks on the configured grid; each row is one invariant.
void run_verify(Setup& s) {
  const auto& c = s.config;
  Table t{"verify", {"check", "measured", "tolerance", "pass"}, {}};
  auto row = [&](std::string name, double measured, double tol, bool pass) {
    t.rows.push_back({std::move(name), measured, tol, std::int64_t(pass)});
    s.report.passed = s.report.passed && pass;
  };

  int ledger_failures = 0;
  for (const auto& d : ledger_defects(derive_exponents(c.p))) ledger_failures += d.holds ? 0 : 1;
  row("ledger relations failing", ledger_failures, 0.0, ledger_failures == 0);

  const auto& part = s.part;
  const double lo = std::ldexp(4.0 / 3.0, part.j_min()), hi = std::ldexp(1.5, part.j_max());
  double telescoping = 0.0;
  for (std::size_t x = 0; x < part.grid().size(); ++x) {
    const double r = part.radius(x);
    if (r < lo || r > hi) continue;
    double sum = 0.0;
    for (int j = part.j_min(); j <= part.j_max(); ++j) sum += part.block_symbol(j)[x];
    telescoping = std::max(telescoping, std::abs(sum - 1.0));
  }
  row("partition telescoping", telescoping, 1e-12, telescoping <= 1e-12);

  const auto projected = leray_project(s.data);
  const double idem = l2_norm(leray_project(projected) - projected) / std::max(l2_norm(projected), 1e-300);
  row("leray idempotent", idem, 1e-12, idem <= 1e-12);

  const auto split = compose_split(s.data, c.N.value_or(1.0), derive_exponents(c.p), part);
  row("split reconstruction", split.norms.reconstruction_error, c.tolerances.reconstruction,
      split.norms.reconstruction_error <= c.tolerances.reconstruction);
  const double div = std::max(split.norms.bar_divergence, split.norms.tilde_divergence);
  row("split divergence", div, c.tolerances.divergence, div <= c.tolerances.divergence);

  // Energy identity on a short caloric-background solve of the half-size data.
  const auto tg = TimeGrid::graded(std::min(c.T, 0.25), 16);
  PerturbedOptions o;
  o.background = Background::caloric;
  o.slack_tol = kInfinity;
  SpectralField zero(part.grid());
  zero.mark_divergence_free(true);
  const double slack = solve_perturbed(caloric_extension(0.5 * s.data, tg), zero, tg, o).trace.worst_slack();
  row("energy slack", -slack, c.tolerances.energy_slack, slack >= -c.tolerances.energy_slack);

  // Picard under a gate it passes: data scaled to X4 size 1/(16 c).
  const double eps3 = smallness_gate(s, tg);
  const double size = x4_norm(caloric_extension(s.data, tg), tg);
  const auto small = (0.5 * eps3 / size) * s.data;
  const auto sol = picard_solve(small, tg, {c.tolerances.picard, 60, eps3});
  double worst_iterate = 0.0;
  for (const auto& h : sol.history) worst_iterate = std::max(worst_iterate, h.norm / sol.caloric_norm);
  row("picard converged", double(sol.history.size()), 60.0, sol.converged);
  row("picard iterates below 2 ||V||", worst_iterate, 2.0, worst_iterate < 2.0);

  s.report.tables.push_back(std::move(t));
}

const std::map<std::string, std::function<void(Setup&)>>& dispatch() {
  static const std::map<std::string, std::function<void(Setup&)>> table{
      {"split", run_split},           {"norm", run_norm},         {"heat", run_heat},
      {"mild-solve", run_mild},       {"energy-solve", run_energy}, {"compose", run_compose},
      {"uniqueness", run_uniqueness}, {"stability", run_stability}, {"verify", run_verify}};
  return table;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void ExperimentConfig::validate() const {
  check(dispatch().contains(pipeline), "pipeline", "names no pipeline: '" + pipeline + "'");
  check(n >= 8 && n % 2 == 0, "n", "must be an even grid size of at least 8");
  check(box > 0.0 && std::isfinite(box), "box", "must be positive");
  check(p > 3.0 && std::isfinite(p), "p", "must lie in (3, inf)");
  check(T > 0.0 && std::isfinite(T), "T", "must be positive");
  check(time_steps >= 2, "time_steps", "must be at least 2");
  check(!N || *N > 0.0, "N", "must be positive");
  check(k_lo <= k_hi, "k_lo", "must not exceed k_hi");
  check(eps3 >= 0.0, "eps3", "must be nonnegative");
  check(amplitude > 0.0 && std::isfinite(amplitude), "amplitude", "must be positive");
  check(!ks.empty() && std::ranges::all_of(ks, [](int k) { return k >= 0; }), "ks", "must be nonnegative");
  const std::pair<const char*, double> tols[] = {{"tolerances.reconstruction", tolerances.reconstruction},
                                                 {"tolerances.divergence", tolerances.divergence},
                                                 {"tolerances.energy_slack", tolerances.energy_slack},
                                                 {"tolerances.picard", tolerances.picard},
                                                 {"tolerances.fixed_point", tolerances.fixed_point}};
  for (const auto& [name, value] : tols) check(value > 0.0, name, "must be positive");
  check(!output_dir.empty(), "output_dir", "must not be empty");
}

ExperimentConfig config_from_json(const json& j) {
  require(j.is_object(), Reason::invalid_argument, "config: top level must be an object");
  static const std::set<std::string> known{"pipeline", "n",     "box",   "p",    "T",         "time_steps",
                                           "N",        "k_lo",  "k_hi",  "eps3", "seed",      "amplitude",
                                           "input",    "ks",    "tolerances",    "output_dir"};
  for (const auto& [key, value] : j.items()) check(known.contains(key), key, "is not a config field");
  ExperimentConfig c;
  read(j, "pipeline", c.pipeline);
  read(j, "n", c.n);
  read(j, "box", c.box);
  read(j, "p", c.p);
  read(j, "T", c.T);
  read(j, "time_steps", c.time_steps);
  read(j, "N", c.N);
  read(j, "k_lo", c.k_lo);
  read(j, "k_hi", c.k_hi);
  read(j, "eps3", c.eps3);
  read(j, "seed", c.seed);
  read(j, "amplitude", c.amplitude);
  read(j, "input", c.input);
  read(j, "ks", c.ks);
  read(j, "output_dir", c.output_dir);
  if (const auto it = j.find("tolerances"); it != j.end()) {
    check(it->is_object(), "tolerances", "must be an object");
    static const std::set<std::string> tol_keys{"reconstruction", "divergence", "energy_slack", "picard",
                                                "fixed_point"};
    for (const auto& [key, value] : it->items())
      check(tol_keys.contains(key), "tolerances." + key, "is not a tolerance");
    read(*it, "reconstruction", c.tolerances.reconstruction);
    read(*it, "divergence", c.tolerances.divergence);
    read(*it, "energy_slack", c.tolerances.energy_slack);
    read(*it, "picard", c.tolerances.picard);
    read(*it, "fixed_point", c.tolerances.fixed_point);
  }
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j{{"pipeline", c.pipeline},
         {"n", c.n},
         {"box", c.box},
         {"p", c.p},
         {"T", c.T},
         {"time_steps", c.time_steps},
         {"N", c.N ? json(*c.N) : json(nullptr)},
         {"k_lo", c.k_lo},
         {"k_hi", c.k_hi},
         {"eps3", c.eps3},
         {"seed", c.seed},
         {"amplitude", c.amplitude},
         {"input", c.input ? json(*c.input) : json(nullptr)},
         {"ks", c.ks},
         {"output_dir", c.output_dir}};
  j["tolerances"] = {{"reconstruction", c.tolerances.reconstruction},
                     {"divergence", c.tolerances.divergence},
                     {"energy_slack", c.tolerances.energy_slack},
                     {"picard", c.tolerances.picard},
                     {"fixed_point", c.tolerances.fixed_point}};
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(bool(in), Reason::io, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(Reason::invalid_argument, "config: " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

Report run_experiment(const ExperimentConfig& config) {
  config.validate();
  auto part = build_partition(FrequencyGrid(config.n, config.box));
  auto data = input_field(config, part);
  Setup s{config, std::move(part), std::move(data), {}};
  s.report.pipeline = config.pipeline;
  s.report.certificate["config"] = config_to_json(config);
  s.report.certificate["ledger"] = ledger_json(derive_exponents(config.p));
  s.report.certificate["pipeline"] = config.pipeline;
  dispatch().at(config.pipeline)(s);
  s.report.certificate["passed"] = s.report.passed;
  return std::move(s.report);
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::string>) {
          return csv_escape(v);
        } else {
          char buf[32];
          const auto res = std::to_chars(buf, buf + sizeof buf, v);
          return std::string(buf, res.ptr);
        }
      },
      cell);
}

std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& dir) {
  require(!report.tables.empty(), Reason::invalid_argument, "emit_report: no tables");
  for (const auto& t : report.tables) {
    require(!t.rows.empty(), Reason::invalid_argument, "emit_report: table '" + t.name + "' is empty");
    for (const auto& r : t.rows)
      require(r.size() == t.columns.size(), Reason::invalid_argument,
              "emit_report: table '" + t.name + "' has a ragged row");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec && std::filesystem::is_directory(dir), Reason::io, "emit_report: cannot create " + dir.string());

  std::vector<std::filesystem::path> written;
  auto open = [&](const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    require(bool(out), Reason::io, "emit_report: cannot write " + path.string());
    written.push_back(path);
    return out;
  };
  for (const auto& t : report.tables) {
    auto out = open(dir / (t.name + ".csv"));
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_escape(t.columns[i]);
    out << '\n';
    for (const auto& r : t.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_cell(r[i]);
      out << '\n';
    }
    require(bool(out), Reason::io, "emit_report: write failed for " + t.name);
  }
  {
    auto out = open(dir / "certificate.json");
    out << report.certificate.dump(2) << '\n';
    require(bool(out), Reason::io, "emit_report: write failed for the certificate");
  }
  for (const auto& f : report.fields) {
    const auto path = dir / (f.name + ".field");
    save_field(path.string(), f.field);
    written.push_back(path);
  }
  return written;
}

}  // namespace nsbesov
