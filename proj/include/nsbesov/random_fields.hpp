// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "nsbesov/littlewood_paley.hpp"

namespace nsbesov {

// Divergence-free Gaussian field with a dyadic power-law envelope. Each mode is
// drawn from its own stream keyed by (seed, signed mode), so the same recipe on a
// finer grid with the same box and band reproduces the same coefficients.
struct FieldRecipe {
  std::uint64_t seed = 1;
  // Integrability of the normalising critical norm B^{-1+3/p}_{p,inf}.
  double p = 4.0;
  // Block amplitudes decay like 2^{-j(s + 3/2)}; defaults to -1 + 3/p.
  std::optional<double> s;
  std::optional<int> j_lo;
  std::optional<int> j_hi;
  double critical_norm = 1.0;
};

SpectralField random_besov_field(const Partition& part, const FieldRecipe& recipe);

}  // namespace nsbesov
