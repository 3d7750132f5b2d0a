// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

// nsbesov <pipeline> [--config file.json] [overrides...]
//
// Exit status: 0 success, 1 a verify check failed, 2 usage or config error,
// 10 + reason code for a refusal raised by a pipeline.

#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "nsbesov/cli_harness.hpp"

namespace {

// Flag overrides, applied on top of the config file in this order.
struct Overrides {
  std::string config_path;
  std::optional<int> n, time_steps, k_lo, k_hi;
  std::optional<double> box, p, T, N, eps3, amplitude;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> input, output_dir;
  std::vector<int> ks;
  bool quiet = false;
};

void add_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("-c,--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd.add_option("--n", o.n, "grid points per axis");
  cmd.add_option("--box", o.box, "box length");
  cmd.add_option("--p", o.p, "integrability exponent of the data");
  cmd.add_option("--T", o.T, "time horizon");
  cmd.add_option("--steps", o.time_steps, "time steps");
  cmd.add_option("--N", o.N, "fixed split level");
  cmd.add_option("--k-lo", o.k_lo, "lowest sweep exponent");
  cmd.add_option("--k-hi", o.k_hi, "highest sweep exponent");
  cmd.add_option("--eps3", o.eps3, "Picard smallness gate");
  cmd.add_option("--seed", o.seed, "seed of the random data");
  cmd.add_option("--amplitude", o.amplitude, "critical norm of the random data");
  cmd.add_option("--input", o.input, "field dump to use as data")->check(CLI::ExistingFile);
  cmd.add_option("--ks", o.ks, "approximant indices for stability");
  cmd.add_option("-o,--out", o.output_dir, "output directory");
  cmd.add_flag("-q,--quiet", o.quiet, "suppress lint diagnostics");
}

nsbesov::ExperimentConfig resolve(const std::string& pipeline, const Overrides& o) {
  auto c = o.config_path.empty() ? nsbesov::ExperimentConfig{} : nsbesov::load_config(o.config_path);
  c.pipeline = pipeline;
  if (o.n) c.n = *o.n;
  if (o.box) c.box = *o.box;
  if (o.p) c.p = *o.p;
  if (o.T) c.T = *o.T;
  if (o.time_steps) c.time_steps = *o.time_steps;
  if (o.N) c.N = *o.N;
  if (o.k_lo) c.k_lo = *o.k_lo;
  if (o.k_hi) c.k_hi = *o.k_hi;
  if (o.eps3) c.eps3 = *o.eps3;
  if (o.seed) c.seed = *o.seed;
  if (o.amplitude) c.amplitude = *o.amplitude;
  if (o.input) c.input = *o.input;
  if (!o.ks.empty()) c.ks = o.ks;
  if (o.output_dir) c.output_dir = *o.output_dir;
  c.validate();
  return c;
}

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d{
      {"split", "two-stage frequency split over an N sweep"},
      {"norm", "dyadic block norms and the critical Besov norm"},
      {"heat", "semigroup derivative ratios over dyadic times"},
      {"mild-solve", "gated Picard iteration and its energy equality"},
      {"energy-solve", "energy-class perturbation of the caloric extension"},
      {"compose", "composed solution: split, background, perturbation"},
      {"uniqueness", "mild and composed paths on small data"},
      {"stability", "weak-star stability along approximants"},
      {"verify", "structural invariants on the configured grid"}};
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Besov-data Navier-Stokes experiments on the periodic box"};
  app.require_subcommand(1);
  Overrides overrides;
  for (const auto& name : nsbesov::pipelines()) add_options(*app.add_subcommand(name, descriptions().at(name)), overrides);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string pipeline = app.get_subcommands().front()->get_name();
  if (overrides.quiet) nsbesov::set_lint_sink([](const std::string&) {});

  try {
    const auto config = resolve(pipeline, overrides);
    const auto report = nsbesov::run_experiment(config);
    for (const auto& path : nsbesov::emit_report(report, config.output_dir)) std::cout << path.string() << '\n';
    if (!report.passed) {
      std::cerr << "nsbesov: " << pipeline << ": a check failed, see " << config.output_dir << '\n';
      return 1;
    }
    return 0;
  } catch (const nsbesov::Error& e) {
    std::cerr << "nsbesov: " << nsbesov::reason_name(e.reason()) << ": " << e.what() << '\n';
    return e.reason() == nsbesov::Reason::invalid_argument ? 2 : 10 + int(e.reason());
  }
}
