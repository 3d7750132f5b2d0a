// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "nsbesov/littlewood_paley.hpp"
#include "nsbesov/spectral_core.hpp"

namespace nsbesov {

// Critical regularity -1 + 3/p.
constexpr double critical_index(double p) noexcept { return -1.0 + 3.0 / p; }

// Every exponent the two-stage split needs, derived from the input integrability p.
struct ExponentLedger {
  double p = 0.0;
  double alpha = 0.0;
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double theta_inf = 0.0;
  double theta_gen = 0.0;
  double delta = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double kappa = 0.0;
  double beta_p = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  // Per-block growth of the first-stage threshold: M(j, N) = N 2^{threshold_slope j}.
  double threshold_slope = 0.0;
  // Same for the second stage, whose level is N^kappa.
  double general_slope = 0.0;
  // Decay exponent of the perturbation energy and the rate kappa' it is built from.
  double decay_rate = 0.0;
  double decay_beta = 0.0;

  // Regularity of the second-stage input, -3/alpha + 3/p.
  double input_index() const noexcept { return -3.0 / alpha + 3.0 / p; }
};

ExponentLedger derive_exponents(double p);

struct LedgerDefect {
  std::string relation;
  // |residual| for identities, lhs - rhs for strict inequalities lhs < rhs.
  double defect = 0.0;
  bool holds = true;
};

std::vector<LedgerDefect> ledger_defects(const ExponentLedger& ledger, double tol = 1e-12);
// Throws ledger_violation naming the first relation that fails.
void check_ledger(const ExponentLedger& ledger, double tol = 1e-12);

// M(j, N). M^{2-p} 2^{-p s_p j} does not depend on j.
double threshold_level(int j, double N, const ExponentLedger& ledger);

struct SplitPair {
  SpectralField lower;  // block values with |f| <= level, relocalised
  SpectralField upper;  // the excess
};

// Single-stage magnitude cut of every lattice block at level_of(j). The mean goes to `lower`.
template <class LevelFn>
SplitPair threshold_split(const SpectralField& g, const Partition& part, LevelFn&& level_of);

SplitPair split_infinity(const SpectralField& g, double N, const ExponentLedger& ledger, const Partition& part);

// Input space B^{s0}_{p0,p0} split into B^{s1}_{p1,p1} (lower) and B^{s2}_{p2,p2} (upper).
struct GeneralSplitIndices {
  double p0 = 0.0, s0 = 0.0;
  double p1 = 0.0, s1 = 0.0;
  double p2 = 0.0, s2 = 0.0;
  double theta = 0.0;
};

// Indices of the second stage: (p, -3/alpha + 3/p) into (p1, s_{p1} + delta1) and L_2.
GeneralSplitIndices second_stage_indices(const ExponentLedger& ledger);
// Throws invalid_argument naming the relation that fails.
void validate_indices(const GeneralSplitIndices& idx);
double general_level(int j, double eps, const GeneralSplitIndices& idx);

SplitPair split_general(const SpectralField& g, double eps, const GeneralSplitIndices& idx, const Partition& part);

// Measured sides of the single-stage bounds, as ratios to the bound without constant.
struct SplitCertificate {
  double lower_ratio = 0.0;
  double upper_ratio = 0.0;
  // ||piece||_{B^{s_p}_{p,inf}} / ||g||_{B^{s_p}_{p,inf}}.
  double lower_critical = 0.0;
  double upper_critical = 0.0;
};

SplitCertificate certify_infinity_split(const SpectralField& g, const SplitPair& split, double N,
                                        const ExponentLedger& ledger, const Partition& part);
SplitCertificate certify_general_split(const SpectralField& g, const SplitPair& split, double eps,
                                       const GeneralSplitIndices& idx, const Partition& part);

struct NormTable {
  double N = 0.0;
  double data_critical = 0.0;         // ||g||_{B^{s_p}_{p,inf}}
  double bar_subcritical = 0.0;       // ||bar||_{B^{s_{p2}+delta2}_{p2,p2}}
  double tilde_l2 = 0.0;              // ||tilde||_{L_2}
  double bar_critical = 0.0;          // ||bar||_{B^{s_p}_{p,inf}}
  double tilde_critical = 0.0;        // ||tilde||_{B^{s_p}_{p,inf}}
  double reconstruction_error = 0.0;  // max |bar + tilde - g| / max |g| over coefficients
  double bar_divergence = 0.0;
  double tilde_divergence = 0.0;
};

struct SplitResult {
  SpectralField bar;
  SpectralField tilde;
  double N = 0.0;
  ExponentLedger ledger;
  NormTable norms;
};

// Fails with invalid_argument when g is not divergence free to 1e-10.
SplitResult compose_split(const SpectralField& g, double N, const ExponentLedger& ledger, const Partition& part);

// Leray projection of sum_{|j| <= k} Delta_j g; k >= 0.
SpectralField weakstar_approximants(const SpectralField& g, int k, const Partition& part);

// ---------------------------------------------------------------------------

template <class LevelFn>
SplitPair threshold_split(const SpectralField& g, const Partition& part, LevelFn&& level_of) {
  require_same_grid(g.grid(), part.grid(), "threshold_split");
  const auto& grid = g.grid();
  SplitPair out{SpectralField(grid), SpectralField(grid)};
  for (int c = 0; c < 3; ++c) out.lower.component(c)[0] = g.component(c)[0];
  for (int j = part.lattice_lo(); j <= part.lattice_hi(); ++j) {
    const auto block = apply_radial(g, part.block_symbol(j));
    auto phys = to_physical(block);
    const double level = level_of(j);
    for (std::size_t x = 0; x < grid.size(); ++x) {
      if (phys.magnitude(x) > level)
        for (int c = 0; c < 3; ++c) phys.component(c)[x] = 0.0;
    }
    const auto kept = to_spectral(phys);
    const auto hood = part.neighbourhood_symbol(j);
    for (int c = 0; c < 3; ++c) {
      auto lo = out.lower.component(c), hi = out.upper.component(c);
      auto k = kept.component(c), b = block.component(c);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        lo[i] += hood[i] * k[i];
        hi[i] += hood[i] * (b[i] - k[i]);
      }
    }
  }
  return out;
}

}  // namespace nsbesov
