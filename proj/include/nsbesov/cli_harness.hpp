// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nsbesov/spectral_core.hpp"

namespace nsbesov {

struct Tolerances {
  double reconstruction = 1e-10;
  double divergence = 1e-10;
  double energy_slack = 1e-6;
  double picard = 1e-11;
  double fixed_point = 1e-11;
};

// One run of one pipeline. Every field has a default, so a config file only
// names what it changes; unknown keys are rejected.
struct ExperimentConfig {
  std::string pipeline = "verify";
  int n = 32;
  double box = 2.0 * std::numbers::pi;
  double p = 4.0;
  double T = 1.0;
  int time_steps = 64;
  // Fixed split level; otherwise the dyadic sweep 2^k_lo .. 2^k_hi.
  std::optional<double> N;
  int k_lo = -8;
  int k_hi = 10;
  // Picard smallness gate; 0 derives it from the calibrated bilinear constant.
  double eps3 = 0.0;
  // Random data: seed and critical norm. `input` loads a field dump instead.
  std::uint64_t seed = 3;
  double amplitude = 1.0;
  std::optional<std::string> input;
  std::vector<int> ks{2, 4, 8};
  Tolerances tolerances;
  std::string output_dir = "nsbesov-out";

  // Throws invalid_argument naming the offending field.
  void validate() const;
};

inline const std::vector<std::string>& pipelines() {
  static const std::vector<std::string> names{"split", "norm",        "heat",       "mild-solve", "energy-solve",
                                              "compose", "uniqueness", "stability", "verify"};
  return names;
}

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct FieldDump {
  std::string name;
  SpectralField field;
};

struct Report {
  std::string pipeline;
  // Config (with the seed), exponent ledger, calibrated constants and headline numbers.
  nlohmann::json certificate;
  std::vector<Table> tables;
  std::vector<FieldDump> fields;
  // False when a verify check fails; refusals throw instead.
  bool passed = true;
};

Report run_experiment(const ExperimentConfig& config);

// <dir>/<table>.csv, <dir>/certificate.json and <dir>/<field>.field, in that order.
// Numbers are written shortest round-trip, so equal reports give equal bytes.
std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& dir);

std::string format_cell(const Cell& cell);

}  // namespace nsbesov
