// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsbesov/energy_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsbesov/fourier_calculus.hpp"
#include "nsbesov/random_fields.hpp"

namespace nsbesov {

namespace {

std::vector<double> squared_wavenumbers(const FrequencyGrid& g) {
  std::vector<double> lam(g.size());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const auto k = g.wavevector(i);
    lam[i] = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  }
  return lam;
}

double trapezoid(std::span<const double> t, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return s;
}

SpectralField midpoint(const SpectralField& a, const SpectralField& b) {
  auto m = a + b;
  m *= 0.5;
  return m;
}

// -P div F
SpectralField projected_divergence(const TensorSpectralField& F) {
  auto f = leray_project(divergence(F));
  f *= -1.0;
  return f;
}

double max_abs_component_sum(const SpectralField& f) {
  const auto phys = to_physical(f);
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    double m = 0.0;
    for (double x : phys.component(c)) m = std::max(m, std::abs(x));
    s += m;
  }
  return s;
}

// Copies f inside the dealiased cube; reports what was dropped.
SpectralField inside_cutoff(const SpectralField& f, const char* what) {
  auto kept = dealias(f);
  const double dropped = l2_norm(f - kept);
  if (dropped > 1e-12 * std::max(1.0, l2_norm(f))) {
    std::ostringstream msg;
    msg << what << ": dropped modes beyond the dealias cutoff (L2 mass " << dropped << ")";
    lint(msg.str());
  }
  kept.mark_divergence_free(f.divergence_free());
  return kept;
}

void require_on_grid(const Trajectory& traj, const TimeGrid& grid, const char* where) {
  require(!traj.empty() && traj.size() == grid.nodes().size(), Reason::invalid_argument,
          std::string(where) + ": trajectory does not match the time grid");
}

// b(y) = exp(-1/(1 - y^2)) on |y| < 1 and its first two derivatives.
struct BumpValue {
  double b = 0.0, d1 = 0.0, d2 = 0.0;
};

BumpValue bump(double y) {
  if (std::abs(y) >= 1.0) return {};
  const double s = 1.0 - y * y;
  const double b = std::exp(-1.0 / s);
  return {b, b * (-2.0 * y / (s * s)), b * (4.0 * y * y / (s * s * s * s) - (2.0 + 6.0 * y * y) / (s * s * s))};
}

// Periodic offset in [-L/2, L/2).
double wrapped(double x, double L) {
  double d = std::fmod(x, L);
  if (d >= 0.5 * L) d -= L;
  if (d < -0.5 * L) d += L;
  return d;
}

// Samples of a member trajectory at the nodes of a reference grid; empty when a
// reference node is missing.
std::vector<std::size_t> matching_nodes(const TimeGrid& reference, const TimeGrid& member) {
  std::vector<std::size_t> idx;
  const auto m = member.nodes();
  for (double t : reference.nodes()) {
    const auto it = std::min_element(m.begin(), m.end(),
                                     [t](double a, double b) { return std::abs(a - t) < std::abs(b - t); });
    if (std::abs(*it - t) > 1e-12 * std::max(1.0, t)) return {};
    idx.push_back(std::size_t(it - m.begin()));
  }
  return idx;
}

}  // namespace

Trajectory discrete_caloric(const SpectralField& u0, const TimeGrid& grid) {
  const auto lam = squared_wavenumbers(u0.grid());
  Trajectory out;
  out.reserve(grid.nodes().size());
  out.push_back(u0);
  for (int m = 0; m < grid.steps(); ++m) {
    const double h = 0.5 * (grid.at(m + 1) - grid.at(m));
    SpectralField next(u0.grid());
    for (int c = 0; c < 3; ++c) {
      auto dst = next.component(c);
      auto src = out.back().component(c);
      for (std::size_t i = 0; i < lam.size(); ++i) dst[i] = (1.0 - h * lam[i]) / (1.0 + h * lam[i]) * src[i];
    }
    next.mark_divergence_free(u0.divergence_free());
    out.push_back(std::move(next));
  }
  return out;
}

EnergyTrace perturbed_energy_trace(const Trajectory& W, const Trajectory& w, const TimeGrid& grid, Background form) {
  require_on_grid(W, grid, "perturbed_energy_trace");
  require_on_grid(w, grid, "perturbed_energy_trace");
  const auto t = grid.nodes();
  EnergyTrace tr;
  tr.times.assign(t.begin(), t.end());
  const double initial = inner(w[0], w[0]);
  tr.kinetic.push_back(initial);
  tr.dissipation.push_back(0.0);
  tr.rhs.push_back(initial);
  for (std::size_t m = 0; m + 1 < t.size(); ++m) {
    const double tau = t[m + 1] - t[m];
    const auto wm = midpoint(w[m], w[m + 1]);
    const auto Wm = midpoint(W[m], W[m + 1]);
    auto flux = dealiased_product(Wm, wm);
    if (form == Background::caloric) flux += dealiased_square(Wm);
    tr.kinetic.push_back(inner(w[m + 1], w[m + 1]));
    tr.dissipation.push_back(tr.dissipation.back() + 2.0 * tau * dissipation(wm));
    tr.rhs.push_back(tr.rhs.back() + 2.0 * tau * contract_gradient(flux, wm));
  }
  for (std::size_t i = 0; i < t.size(); ++i) tr.slack.push_back(tr.rhs[i] - tr.kinetic[i] - tr.dissipation[i]);
  return tr;
}

PerturbedSolution solve_perturbed(const Trajectory& W_in, const SpectralField& u_init, const TimeGrid& grid,
                                  const PerturbedOptions& options) {
  require_on_grid(W_in, grid, "solve_perturbed");
  require_same_grid(W_in[0].grid(), u_init.grid(), "solve_perturbed");
  const double defect = divergence_defect(u_init);
  require(defect <= 1e-10, Reason::invalid_argument,
          "solve_perturbed: initial perturbation is not divergence free (defect " + std::to_string(defect) + ")");
  const auto& fg = u_init.grid();
  const auto lam = squared_wavenumbers(fg);
  const double k_cut = fg.dk() * fg.dealias_cutoff();

  Trajectory W;
  W.reserve(W_in.size());
  for (const auto& f : W_in) W.push_back(inside_cutoff(f, "solve_perturbed background"));

  PerturbedSolution sol{.grid = grid};
  sol.u.reserve(W.size());
  sol.u.push_back(inside_cutoff(u_init, "solve_perturbed initial perturbation"));
  sol.u.back().mark_divergence_free(true);

  for (int m = 0; m < grid.steps(); ++m) {
    const double tau = grid.at(m + 1) - grid.at(m);
    const auto& un = sol.u.back();
    const auto Wm = midpoint(W[std::size_t(m)], W[std::size_t(m) + 1]);

    const double courant = tau * k_cut * (max_abs_component_sum(Wm) + max_abs_component_sum(un));
    sol.worst_courant = std::max(sol.worst_courant, courant);
    if (courant > options.cfl_limit) {
      std::ostringstream msg;
      msg << "solve_perturbed: Courant number " << courant << " exceeds " << options.cfl_limit << " at t = "
          << grid.at(m) << "; suggested step " << 0.9 * tau * options.cfl_limit / courant;
      fail(Reason::cfl_violation, msg.str());
    }

    // Explicit part of the step and the background-only flux, fixed across iterations.
    SpectralField base(fg);
    for (int c = 0; c < 3; ++c) {
      auto b = base.component(c);
      auto src = un.component(c);
      for (std::size_t i = 0; i < lam.size(); ++i)
        b[i] = (1.0 - 0.5 * tau * lam[i]) / (1.0 + 0.5 * tau * lam[i]) * src[i];
    }
    std::optional<TensorSpectralField> background_flux;
    if (options.background == Background::mild) background_flux = dealiased_square(Wm);

    auto next = un;
    int iterations = 0;
    for (;; ++iterations) {
      require(iterations < options.max_fixed_point, Reason::cfl_violation,
              "solve_perturbed: implicit step did not converge at t = " + std::to_string(grid.at(m)) +
                  "; suggested step " + std::to_string(0.5 * tau));
      const auto mid = midpoint(un, next);
      auto flux = dealiased_square(Wm + mid);
      if (background_flux) flux -= *background_flux;
      const auto forcing = projected_divergence(flux);
      SpectralField candidate(fg);
      for (int c = 0; c < 3; ++c) {
        auto dst = candidate.component(c);
        auto b = base.component(c);
        auto f = forcing.component(c);
        for (std::size_t i = 0; i < lam.size(); ++i) dst[i] = b[i] + tau / (1.0 + 0.5 * tau * lam[i]) * f[i];
      }
      const double change = l2_norm(candidate - next);
      const double size = l2_norm(candidate);
      next = std::move(candidate);
      if (!std::isfinite(change)) fail(Reason::divergence, "solve_perturbed: non-finite iterate");
      if (change <= options.fixed_point_tol * size) break;
    }
    next.mark_divergence_free(true);
    sol.fixed_point_iterations.push_back(iterations + 1);
    sol.u.push_back(std::move(next));
  }

  sol.trace = perturbed_energy_trace(W, sol.u, grid, options.background);
  const double worst = sol.trace.worst_slack();
  if (worst < -options.slack_tol) {
    std::ostringstream msg;
    msg << "solve_perturbed: energy slack " << worst << " below -" << options.slack_tol;
    fail(Reason::energy_slack, msg.str());
  }
  return sol;
}

double ComposedSolution::reconstruction_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double scale = l2_norm(v[i]);
    const double d = l2_norm(v[i] - W[i] - u[i]);
    worst = std::max(worst, scale > 0.0 ? d / scale : d);
  }
  return worst;
}

double ComposedSolution::divergence() const {
  double worst = 0.0;
  for (const auto& f : v) worst = std::max(worst, divergence_defect(f));
  return worst;
}

GateConstants calibrate_gate_constants(double p, double T, int time_steps, const Partition& part, int samples,
                                       std::uint64_t seed) {
  require(samples >= 1, Reason::invalid_argument, "calibrate_gate_constants: need a sample");
  const auto ledger = derive_exponents(p);
  const auto tg = TimeGrid::graded(T, time_steps);
  const auto norm = subcritical_norm(ledger.p2, ledger.delta2);
  const double s_sub = critical_index(ledger.p2) + ledger.delta2;
  std::vector<SpectralField> fields;
  GateConstants out;
  for (int i = 0; i < samples; ++i) {
    FieldRecipe r;
    r.seed = seed + std::uint64_t(i);
    r.p = p;
    fields.push_back(random_besov_field(part, r));
    const double besov = besov_norm(fields.back(), s_sub, ledger.p2, ledger.p2, part).value;
    const double heat = weighted_norm(caloric_extension(fields.back(), tg), tg, norm);
    out.c_heat = std::max(out.c_heat, heat / (std::pow(T, 0.5 * ledger.delta2) * besov));
  }
  out.c_bilinear = calibrate_bilinear_constant(fields, tg, norm);
  return out;
}

SplitSelection select_split(const SpectralField& u0, double T, double p, const Partition& part,
                            const GateConstants& constants, const ComposeOptions& options) {
  require(constants.c_bilinear > 0.0 && constants.c_heat > 0.0, Reason::invalid_argument,
          "select_split: gate constants must be positive");
  const auto ledger = derive_exponents(p);
  const auto tg = TimeGrid::graded(T, options.time_steps);
  std::vector<double> candidates;
  if (options.N) {
    require(*options.N > 0.0, Reason::invalid_argument, "select_split: N must be positive");
    candidates.push_back(*options.N);
  } else {
    require(options.k_lo <= options.k_hi, Reason::invalid_argument, "select_split: empty N sweep");
    for (int k = options.k_hi; k >= options.k_lo; --k) candidates.push_back(std::ldexp(1.0, k));
  }
  const auto norm = subcritical_norm(ledger.p2, ledger.delta2);
  const double tfac = std::pow(T, 0.5 * ledger.delta2);
  SplitSelection out{compose_split(u0, candidates.front(), ledger, part)};
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double N = candidates[c];
    if (c > 0) out.split = compose_split(u0, N, ledger, part);
    GateRecord g;
    g.N = N;
    g.bar_norm = out.split.norms.bar_subcritical;
    g.c_heat = constants.c_heat;
    if (g.bar_norm > 0.0) {
      const double heat = weighted_norm(caloric_extension(out.split.bar, tg), tg, norm);
      g.c_heat = std::max(constants.c_heat, heat / (tfac * g.bar_norm));
    }
    g.value = 4.0 * constants.c_bilinear * g.c_heat * tfac * g.bar_norm;
    g.open = g.value < 1.0;
    out.sweep.push_back(g);
    if (g.open) {
      out.gate = g;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "select_split: no candidate N opens the gate; N:||bar||_{B^{s_p2+delta2}_{p2,p2}}:value";
  for (const auto& g : out.sweep) msg << ' ' << g.N << ':' << g.bar_norm << ':' << g.value;
  fail(Reason::gate_refused, msg.str());
}

ComposedSolution build_composed_solution(const SpectralField& u0, double T, double p, const Partition& part,
                                         const ComposeOptions& options) {
  require(T > 0.0 && std::isfinite(T), Reason::invalid_argument, "build_composed_solution: T must be positive");
  require(p >= 4.0, Reason::invalid_argument, "build_composed_solution: needs p = 4 or p > 4");
  require_same_grid(u0.grid(), part.grid(), "build_composed_solution");
  const auto ledger = derive_exponents(p);
  const auto data = inside_cutoff(u0, "build_composed_solution data");

  GateConstants constants{options.c_bilinear, options.c_heat};
  if (constants.c_bilinear <= 0.0 || constants.c_heat <= 0.0) {
    const auto cal =
        calibrate_gate_constants(p, T, options.time_steps, part, options.calibration_samples, options.calibration_seed);
    if (constants.c_bilinear <= 0.0) constants.c_bilinear = cal.c_bilinear;
    if (constants.c_heat <= 0.0) constants.c_heat = cal.c_heat;
  }

  int steps = options.time_steps;
  auto options_at = [&](int n) {
    auto o = options;
    o.time_steps = n;
    return o;
  };
  for (int attempt = 0;; ++attempt) {
    const auto tg = TimeGrid::graded(T, steps);
    auto choice = select_split(data, T, p, part, constants, options_at(steps));
    // The split relocalises blocks up to the lattice edge; the solver works inside the cutoff.
    choice.split.bar = inside_cutoff(choice.split.bar, "split lower piece");
    choice.split.tilde = inside_cutoff(choice.split.tilde, "split excess piece");
    choice.split.bar.mark_divergence_free(true);
    choice.split.tilde.mark_divergence_free(true);

    ComposedSolution out{.grid = tg, .p = p, .split = std::move(choice.split)};
    out.c_bilinear = constants.c_bilinear;
    out.gate = choice.gate;
    out.gate_sweep = std::move(choice.sweep);
    out.refinements = attempt;
    try {
      auto energy = options.energy;
      if (p > 4.0) {
        out.construction = Construction::mild_background;
        auto picard = options.picard;
        picard.norm = subcritical_norm(ledger.p2, ledger.delta2);
        picard.eps3 = 1.0 / (4.0 * constants.c_bilinear);
        const auto mild = picard_solve(out.split.bar, tg, picard);
        require(mild.converged, Reason::divergence, "build_composed_solution: mild solve did not converge");
        out.W = mild.velocity;
        out.picard_history = mild.history;
        out.mild_bound_ratio =
            mild.caloric_norm > 0.0 ? weighted_norm(mild.velocity, tg, picard.norm) / (2.0 * mild.caloric_norm) : 0.0;
        energy.background = Background::mild;
        auto pert = solve_perturbed(out.W, out.split.tilde, tg, energy);
        out.u = std::move(pert.u);
        out.energy = std::move(pert.trace);
        out.worst_courant = pert.worst_courant;
      } else {
        out.W = caloric_extension(data, tg);
        energy.background = Background::caloric;
        SpectralField zero(part.grid());
        zero.mark_divergence_free(true);
        auto pert = solve_perturbed(out.W, zero, tg, energy);
        out.u = std::move(pert.u);
        out.energy = std::move(pert.trace);
        out.worst_courant = pert.worst_courant;
        // w = u + S_h(t) tilde against W - S_h(t) tilde, S_h the discrete heat flow
        // the integrator is exact against; W - S_h tilde approximates S(t) bar.
        const auto tilde_flow = discrete_caloric(out.split.tilde, tg);
        Trajectory w, bar_flow;
        for (std::size_t i = 0; i < out.u.size(); ++i) {
          w.push_back(out.u[i] + tilde_flow[i]);
          bar_flow.push_back(out.W[i] - tilde_flow[i]);
        }
        out.split_energy = perturbed_energy_trace(bar_flow, w, tg, Background::caloric);
        if (out.split_energy->worst_slack() < -energy.slack_tol) {
          std::ostringstream msg;
          msg << "build_composed_solution: split energy slack " << out.split_energy->worst_slack();
          fail(Reason::energy_slack, msg.str());
        }
      }
    } catch (const Error& e) {
      if (e.reason() != Reason::cfl_violation || attempt >= options.max_refinements) throw;
      steps *= 2;
      continue;
    }
    // Reprojected: where W and u cancel the sum is roundoff, which has no direction.
    for (std::size_t i = 0; i < out.u.size(); ++i) out.v.push_back(leray_project(out.W[i] + out.u[i]));
    out.pressure = pressure_trajectory(out.v);
    return out;
  }
}

double decay_target(const ExponentLedger& ledger) {
  const double rate = ledger.delta2 / (4.0 * ledger.gamma1);
  return std::min(2.0 * ledger.gamma2 * rate, 0.5);
}

DecayFit decay_exponent_fit(const EnergyTrace& trace, double t_star, const ExponentLedger& ledger) {
  require(t_star > 0.0, Reason::invalid_argument, "decay_exponent_fit: window must be (0, t*] with t* > 0");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double t = trace.times[i];
    const double e = trace.kinetic[i] + (trace.dissipation.empty() ? 0.0 : trace.dissipation[i]);
    if (t > 0.0 && t <= t_star && e > 0.0 && std::isfinite(e)) {
      x.push_back(std::log(t));
      y.push_back(std::log(e));
    }
  }
  require(x.size() >= 8, Reason::invalid_argument,
          "decay_exponent_fit: degenerate window, " + std::to_string(x.size()) + " usable nodes (need 8)");
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, Reason::invalid_argument, "decay_exponent_fit: degenerate window, single time");
  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = int(x.size());
  fit.target = decay_target(ledger);
  return fit;
}

UniquenessReport uniqueness_compare(const SpectralField& u0, double T, double eps, const Partition& part,
                                    const ComposeOptions& options) {
  require(eps > 0.0, Reason::invalid_argument, "uniqueness_compare: gate eps must be positive");
  const auto tg = TimeGrid::graded(T, options.time_steps);
  UniquenessReport rep;
  rep.eps = eps;
  auto picard = options.picard;
  picard.norm = kX4;
  picard.eps3 = eps;
  // picard_solve applies the gate sup t^{1/8} ||S(t) u0||_4 < eps itself.
  const auto mild = picard_solve(u0, tg, picard);
  rep.caloric_x4 = mild.caloric_norm;
  require(mild.converged, Reason::divergence, "uniqueness_compare: mild path did not converge");
  const auto composed = build_composed_solution(u0, T, 4.0, part, options);
  const auto idx = matching_nodes(tg, composed.grid);
  require(!idx.empty(), Reason::invalid_argument, "uniqueness_compare: composed grid does not refine the mild grid");
  for (int i = 1; i <= tg.steps(); ++i) {
    const auto& a = mild.velocity[std::size_t(i)];
    const auto& b = composed.v[idx[std::size_t(i)]];
    const double scale = l2_norm(a);
    const double d = l2_norm(a - b);
    rep.per_node.push_back(scale > 0.0 ? d / scale : d);
    rep.relative_difference = std::max(rep.relative_difference, rep.per_node.back());
  }
  return rep;
}

LocalEnergyReport local_energy_spotcheck(const Trajectory& v, const ScalarTrajectory& q, const TimeGrid& grid,
                                         const SpaceTimeBump& bump_spec) {
  require_on_grid(v, grid, "local_energy_spotcheck");
  require(q.size() == v.size(), Reason::invalid_argument, "local_energy_spotcheck: pressure does not match");
  require(bump_spec.amplitude >= 0.0, Reason::invalid_argument,
          "local_energy_spotcheck: test function is negative (amplitude < 0)");
  const auto& fg = v[0].grid();
  const double L = fg.length();
  require(bump_spec.radius > 0.0 && bump_spec.radius < 0.5 * L, Reason::invalid_argument,
          "local_energy_spotcheck: bump radius must lie in (0, L/2)");
  require(bump_spec.t_lo > 0.0 && bump_spec.t_hi < grid.horizon() && bump_spec.t_lo < bump_spec.t_hi,
          Reason::invalid_argument, "local_energy_spotcheck: bump must be supported inside (0, T)");

  const int n = fg.n();
  const double r = bump_spec.radius, h = L / n;
  std::vector<BumpValue> axis[3];
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < n; ++i) axis[a].push_back(bump(wrapped(i * h - bump_spec.center[a], L) / r));
  // Spatial factor, its gradient and Laplacian on grid points.
  PhysicalScalar phi(fg), lap(fg);
  PhysicalVector grad(fg);
  for_each_mode(fg, [&](std::size_t x, int i0, int i1, int i2) {
    const BumpValue& b0 = axis[0][std::size_t(i0)];
    const BumpValue& b1 = axis[1][std::size_t(i1)];
    const BumpValue& b2 = axis[2][std::size_t(i2)];
    phi.data()[x] = b0.b * b1.b * b2.b;
    grad.component(0)[x] = b0.d1 * b1.b * b2.b / r;
    grad.component(1)[x] = b0.b * b1.d1 * b2.b / r;
    grad.component(2)[x] = b0.b * b1.b * b2.d1 / r;
    lap.data()[x] = (b0.d2 * b1.b * b2.b + b0.b * b1.d2 * b2.b + b0.b * b1.b * b2.d2) / (r * r);
  });

  const double t_mid = 0.5 * (bump_spec.t_lo + bump_spec.t_hi), t_half = 0.5 * (bump_spec.t_hi - bump_spec.t_lo);
  const auto t = grid.nodes();
  std::vector<double> diss(t.size(), 0.0), heat(t.size(), 0.0), flux(t.size(), 0.0);
  std::vector<double> abs_heat(t.size(), 0.0), abs_flux(t.size(), 0.0);
  const double cell = fg.cell_volume();
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto eta = bump((t[k] - t_mid) / t_half);
    if (eta.b == 0.0 && eta.d1 == 0.0) continue;
    const double a = bump_spec.amplitude * eta.b, da = bump_spec.amplitude * eta.d1 / t_half;
    const auto pv = to_physical(v[k]);
    const auto pg = to_physical(gradient(v[k]));
    const auto pq = to_physical(q[k]);
    double sd = 0.0, sh = 0.0, sf = 0.0, ah = 0.0, af = 0.0;
    for (std::size_t x = 0; x < fg.size(); ++x) {
      const double g2 = pg.magnitude(x);
      const double v2 = pv.magnitude(x) * pv.magnitude(x);
      double vdg = 0.0;
      for (int c = 0; c < 3; ++c) vdg += pv.component(c)[x] * grad.component(c)[x];
      sd += 2.0 * a * phi.data()[x] * g2 * g2;
      const double hterm = v2 * (da * phi.data()[x] + a * lap.data()[x]);
      const double fterm = a * vdg * (v2 + 2.0 * pq.data()[x]);
      sh += hterm;
      sf += fterm;
      ah += std::abs(hterm);
      af += std::abs(fterm);
    }
    diss[k] = sd * cell;
    heat[k] = sh * cell;
    flux[k] = sf * cell;
    abs_heat[k] = ah * cell;
    abs_flux[k] = af * cell;
  }
  LocalEnergyReport rep;
  rep.lhs = trapezoid(t, diss);
  rep.rhs = trapezoid(t, heat) + trapezoid(t, flux);
  rep.slack = rep.rhs - rep.lhs;
  rep.scale = rep.lhs + trapezoid(t, abs_heat) + trapezoid(t, abs_flux);
  return rep;
}

IntegrabilityReport integrability_check(const Trajectory& u, const Trajectory& V, const TimeGrid& grid,
                                        double data_norm, double alpha) {
  require_on_grid(u, grid, "integrability_check");
  require_on_grid(V, grid, "integrability_check");
  require(alpha > 0.0, Reason::invalid_argument, "integrability_check: alpha must be positive");
  const auto t = grid.nodes();
  const double T = grid.horizon();
  std::vector<double> a(t.size()), b(t.size()), c(t.size()), grad2(t.size());
  double u_sup = 0.0, holder = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto pV = to_physical(V[k]);
    const auto pu = to_physical(u[k]);
    const auto gV = to_physical(gradient(V[k]));
    const auto gu = to_physical(gradient(u[k]));
    const auto& fg = pV.grid();
    PhysicalVector self(fg), mixed(fg);
    for (std::size_t x = 0; x < fg.size(); ++x) {
      for (int i = 0; i < 3; ++i) {
        double s = 0.0, m = 0.0;
        for (int j = 0; j < 3; ++j) {
          const double Vj = pV.component(j)[x], uj = pu.component(j)[x];
          s += Vj * gV.component(3 * i + j)[x];
          m += Vj * gu.component(3 * i + j)[x] + uj * gV.component(3 * i + j)[x];
        }
        self.component(i)[x] = s;
        mixed.component(i)[x] = m;
      }
    }
    // |V_i u_j d_j u_i| pointwise.
    double abs_contraction = 0.0;
    for (std::size_t x = 0; x < fg.size(); ++x) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += pV.component(i)[x] * pu.component(j)[x] * gu.component(3 * i + j)[x];
      abs_contraction += std::abs(s);
    }
    a[k] = std::pow(lp_norm(self, 2.0), 1.25);
    b[k] = std::pow(lp_norm(mixed, 1.5), 1.2);
    c[k] = abs_contraction * fg.cell_volume();
    grad2[k] = dissipation(u[k]);
    const double e = inner(u[k], u[k]);
    u_sup = std::max(u_sup, std::sqrt(e));
    if (t[k] > 0.0) holder = std::max(holder, e / std::pow(t[k], alpha));
  }
  IntegrabilityReport rep;
  rep.norms = {std::pow(trapezoid(t, a), 0.8), std::pow(trapezoid(t, b), 5.0 / 6.0), trapezoid(t, c)};
  const double grad_l2 = std::sqrt(trapezoid(t, grad2));
  // int_0^T t^{-15/16} = 16 T^{1/16}, int_0^T t^{-9/10} = 10 T^{1/10}, int_0^T t^{-3/4} = 4 T^{1/4}.
  rep.bounds = {data_norm * data_norm * std::pow(16.0 * std::pow(T, 1.0 / 16.0), 0.8),
                data_norm * u_sup * std::pow(10.0 * std::pow(T, 0.1), 5.0 / 6.0) +
                    grad_l2 * data_norm * std::cbrt(4.0 * std::pow(T, 0.25)),
                data_norm * grad_l2 * std::sqrt(std::pow(T, alpha) / alpha * holder)};
  for (int i = 0; i < 3; ++i) {
    if (rep.norms[std::size_t(i)] == 0.0) continue;
    rep.constant = std::max(rep.constant, rep.bounds[std::size_t(i)] > 0.0
                                              ? rep.norms[std::size_t(i)] / rep.bounds[std::size_t(i)]
                                              : kInfinity);
  }
  return rep;
}

StabilityReport stability_demo(const SpectralField& u0, std::span<const int> ks, double T, const Partition& part,
                               const ComposeOptions& options) {
  require(!ks.empty(), Reason::invalid_argument, "stability_demo: no truncation levels");
  auto opts = options;
  if (opts.c_bilinear <= 0.0 || opts.c_heat <= 0.0) {
    const auto cal = calibrate_gate_constants(4.0, T, opts.time_steps, part, opts.calibration_samples,
                                              opts.calibration_seed);
    if (opts.c_bilinear <= 0.0) opts.c_bilinear = cal.c_bilinear;
    if (opts.c_heat <= 0.0) opts.c_heat = cal.c_heat;
  }
  const auto full = build_composed_solution(u0, T, 4.0, part, opts);
  const auto& tg = full.grid;
  const auto tests = divergence_free_test_fields(part.grid(), 5);
  const int half = [&] {
    int best = 0;
    for (int i = 0; i <= tg.steps(); ++i)
      if (std::abs(tg.at(i) - 0.5 * T) < std::abs(tg.at(best) - 0.5 * T)) best = i;
    return best;
  }();
  StabilityReport rep;
  rep.window_lo = 0.25 * T;
  rep.window_hi = 0.75 * T;
  for (const auto& psi : tests) rep.full_pairings.push_back(inner(full.v[std::size_t(half)], psi));

  for (int k : ks) {
    StabilityMember m;
    m.k = k;
    try {
      const auto approx = weakstar_approximants(u0, k, part);
      const auto member = build_composed_solution(approx, T, 4.0, part, opts);
      const auto idx = matching_nodes(tg, member.grid);
      require(!idx.empty(), Reason::invalid_argument, "member grid does not refine the reference grid");
      std::vector<double> times, dist2;
      for (int i = 0; i <= tg.steps(); ++i) {
        if (tg.at(i) < rep.window_lo || tg.at(i) > rep.window_hi) continue;
        times.push_back(tg.at(i));
        const auto d = member.v[idx[std::size_t(i)]] - full.v[std::size_t(i)];
        dist2.push_back(inner(d, d));
      }
      m.window_distance = std::sqrt(trapezoid(times, dist2));
      for (const auto& psi : tests) m.pairings.push_back(inner(member.v[idx[std::size_t(half)]], psi));
      m.solved = true;
    } catch (const Error& e) {
      m.failure = std::string(reason_name(e.reason())) + ": " + e.what();
    }
    rep.members.push_back(std::move(m));
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.members.size(); ++i) {
    const auto &a = rep.members[i - 1], &b = rep.members[i];
    if (!a.solved || !b.solved || b.window_distance > a.window_distance) rep.monotone = false;
  }
  return rep;
}

}  // namespace nsbesov
