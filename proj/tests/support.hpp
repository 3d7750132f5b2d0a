// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <random>

#include "nsbesov/spectral_core.hpp"

namespace nsbesov::testing {

// White-noise samples, transformed and truncated to the dealiased cube.
inline SpectralField noise_field(const FrequencyGrid& grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  PhysicalVector phys(grid);
  for (auto& v : phys.data()) v = gauss(rng);
  return dealias(to_spectral(phys));
}

inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const cplx> a) {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, std::abs(z));
  return m;
}

template <std::size_t C>
double relative_diff(const SpectralArray<C>& a, const SpectralArray<C>& b) {
  const double scale = std::max(max_abs(a.data()), max_abs(b.data()));
  return scale == 0.0 ? 0.0 : max_abs_diff(a.data(), b.data()) / scale;
}

// Direct convolution of the truncated coefficient sets; O(n^6) on the small grid.
inline TensorSpectralField convolution_oracle(const SpectralField& f, const SpectralField& g) {
  const auto& grid = f.grid();
  const int n = grid.n(), K = grid.dealias_cutoff();
  TensorSpectralField out(grid);
  auto wrap = [n](int m) { return m < 0 ? m + n : m; };
  for (int a0 = -K; a0 <= K; ++a0)
    for (int a1 = -K; a1 <= K; ++a1)
      for (int a2 = -K; a2 <= K; ++a2)
        for (int b0 = -K; b0 <= K; ++b0)
          for (int b1 = -K; b1 <= K; ++b1)
            for (int b2 = -K; b2 <= K; ++b2) {
              const int c0 = a0 + b0, c1 = a1 + b1, c2 = a2 + b2;
              if (std::abs(c0) > K || std::abs(c1) > K || std::abs(c2) > K) continue;
              const auto ia = grid.flat(wrap(a0), wrap(a1), wrap(a2));
              const auto ib = grid.flat(wrap(b0), wrap(b1), wrap(b2));
              const auto ic = grid.flat(wrap(c0), wrap(c1), wrap(c2));
              for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                  out.component(3 * i + j)[ic] += f.component(i)[ia] * g.component(j)[ib];
            }
  return out;
}

}  // namespace nsbesov::testing
