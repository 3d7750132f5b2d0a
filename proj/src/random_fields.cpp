// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsbesov/random_fields.hpp"

#include <cmath>
#include <random>

#include "nsbesov/fourier_calculus.hpp"

namespace nsbesov {

namespace {

bool canonical(int a, int b, int c) { return a > 0 || (a == 0 && (b > 0 || (b == 0 && c > 0))); }

}  // namespace

SpectralField random_besov_field(const Partition& part, const FieldRecipe& recipe) {
  const auto& grid = part.grid();
  const int j_lo = recipe.j_lo.value_or(part.j_min());
  const int j_hi = recipe.j_hi.value_or(part.j_max());
  require(j_lo <= j_hi, Reason::invalid_argument, "random_besov_field: empty band");
  require(recipe.p >= 1.0 && recipe.critical_norm > 0.0, Reason::invalid_argument,
          "random_besov_field: need p >= 1 and a positive target norm");
  const double s = recipe.s.value_or(-1.0 + 3.0 / recipe.p);

  std::vector<double> envelope(grid.size(), 0.0);
  for (int j = j_lo; j <= j_hi; ++j) {
    const auto& b = part.block_symbol(j);
    const double w = std::exp2(-j * (s + 1.5));
    for (std::size_t i = 0; i < envelope.size(); ++i) envelope[i] += w * b[i];
  }

  SpectralField f(grid);
  const auto seed_lo = std::uint32_t(recipe.seed), seed_hi = std::uint32_t(recipe.seed >> 32);
  for_each_mode(grid, [&](std::size_t i, int a, int b, int c) {
    const int ma = grid.mode(a), mb = grid.mode(b), mc = grid.mode(c);
    if (envelope[i] == 0.0 || !canonical(ma, mb, mc)) return;
    std::seed_seq seq{seed_lo, seed_hi, std::uint32_t(ma), std::uint32_t(mb), std::uint32_t(mc)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss;
    const std::size_t ci = grid.conjugate(i);
    for (int comp = 0; comp < 3; ++comp) {
      const cplx z(gauss(rng), gauss(rng));
      f.component(comp)[i] = envelope[i] * z;
      if (ci != i) f.component(comp)[ci] = envelope[i] * std::conj(z);
    }
  });
  for (int comp = 0; comp < 3; ++comp) f.component(comp)[0] = 0.0;

  auto out = leray_project(f);
  const double norm = besov_norm(out, -1.0 + 3.0 / recipe.p, recipe.p, kInfinity, part).value;
  require(norm > 0.0, Reason::invalid_argument, "random_besov_field: envelope misses every resolved block");
  out *= recipe.critical_norm / norm;
  return out;
}

}  // namespace nsbesov
