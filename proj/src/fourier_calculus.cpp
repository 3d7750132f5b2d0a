// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsbesov/fourier_calculus.hpp"

#include <algorithm>
#include <cmath>

namespace nsbesov {

template <std::size_t C>
SpectralArray<C> heat_semigroup(const SpectralArray<C>& f, double t) {
  require(t >= 0.0 && std::isfinite(t), Reason::invalid_argument, "heat semigroup needs t >= 0");
  const auto& g = f.grid();
  SpectralArray<C> out(g);
  for_each_mode(g, [&](std::size_t x, int a, int b, int c) {
    const double ka = g.dk() * g.mode(a), kb = g.dk() * g.mode(b), kc = g.dk() * g.mode(c);
    const double decay = std::exp(-t * (ka * ka + kb * kb + kc * kc));
    for (std::size_t i = 0; i < C; ++i) out.component(i)[x] = decay * f.component(i)[x];
  });
  out.mark_divergence_free(f.divergence_free());
  return out;
}

template SpectralArray<1> heat_semigroup(const SpectralArray<1>&, double);
template SpectralArray<3> heat_semigroup(const SpectralArray<3>&, double);
template SpectralArray<9> heat_semigroup(const SpectralArray<9>&, double);

SpectralField leray_project(const SpectralField& f) {
  const auto& g = f.grid();
  SpectralField out(g);
  auto f0 = f.component(0), f1 = f.component(1), f2 = f.component(2);
  auto o0 = out.component(0), o1 = out.component(1), o2 = out.component(2);
  for_each_mode(g, [&](std::size_t i, int a, int b, int c) {
    const double k0 = g.odd_wavenumber(a), k1 = g.odd_wavenumber(b), k2 = g.odd_wavenumber(c);
    const double kk = k0 * k0 + k1 * k1 + k2 * k2;
    if (kk == 0.0) {
      o0[i] = f0[i];
      o1[i] = f1[i];
      o2[i] = f2[i];
      return;
    }
    const cplx dot = (k0 * f0[i] + k1 * f1[i] + k2 * f2[i]) / kk;
    o0[i] = f0[i] - k0 * dot;
    o1[i] = f1[i] - k1 * dot;
    o2[i] = f2[i] - k2 * dot;
  });
  const double mean = std::abs(f0[0]) + std::abs(f1[0]) + std::abs(f2[0]);
  if (mean > 1e-12 * (1.0 + l2_norm(f) / std::sqrt(g.volume())))
    lint("leray_project: field has a nonzero mean; the zero mode passes through unchanged");
  out.mark_divergence_free(true);
  return out;
}

ScalarSpectralField riesz_pressure(const SpectralField& f, const SpectralField& g) {
  const auto prod = dealiased_product(f, g);
  const auto& grid = f.grid();
  ScalarSpectralField q(grid);
  auto out = q.component(0);
  for_each_mode(grid, [&](std::size_t i, int a, int b, int c) {
    const std::array<double, 3> k{grid.odd_wavenumber(a), grid.odd_wavenumber(b), grid.odd_wavenumber(c)};
    const double kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (kk == 0.0) return;
    cplx s = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int t = 0; t < 3; ++t) s += k[r] * k[t] * prod.component(3 * r + t)[i];
    out[i] = -s / kk;
  });
  return q;
}

double divergence_defect(const SpectralField& f) {
  const auto& g = f.grid();
  double worst = 0.0;
  for_each_mode(g, [&](std::size_t x, int a, int b, int c) {
    const cplx u0 = f.component(0)[x], u1 = f.component(1)[x], u2 = f.component(2)[x];
    const double mag = std::sqrt(std::norm(u0) + std::norm(u1) + std::norm(u2));
    if (mag == 0.0) return;
    const double ka = g.odd_wavenumber(a), kb = g.odd_wavenumber(b), kc = g.odd_wavenumber(c);
    const double kk = std::sqrt(ka * ka + kb * kb + kc * kc);
    if (kk == 0.0) return;
    worst = std::max(worst, std::abs(ka * u0 + kb * u1 + kc * u2) / (kk * mag));
  });
  return worst;
}

std::vector<double> dyadic_times(double x_lo, double x_hi, int refine) {
  require(refine >= 1 && x_lo <= x_hi, Reason::invalid_argument, "dyadic_times needs x_lo <= x_hi");
  std::vector<double> out;
  const int steps = int(std::lround((x_hi - x_lo) * refine));
  for (int i = steps; i >= 0; --i) out.push_back(std::pow(4.0, -(x_lo + double(i) / refine)));
  return out;
}

SemigroupCheck semigroup_derivative_bound_check(const SpectralField& f, int m, int k, double r,
                                                std::span<const double> times, const Partition& part) {
  require(r >= 4.0, Reason::invalid_argument, "semigroup bound needs r >= 4");
  require(m >= 0 && k >= 0 && k <= 3, Reason::invalid_argument, "derivative orders must satisfy m >= 0, 0 <= k <= 3");
  const auto& g = f.grid();
  const double data_norm = besov_norm(f, -0.25, 4.0, kInfinity, part).value;

  SemigroupCheck out;
  out.time_derivatives = m;
  out.space_derivatives = k;
  out.r = r;
  const double power = m + 0.5 * k + 0.5 * (1.0 - 3.0 / r);
  for (double t : times) {
    require(t > 0.0, Reason::invalid_argument, "semigroup bound needs t > 0");
    // d_t^m S(t) f = Delta^m S(t) f.
    SpectralField base = heat_semigroup(f, t);
    if (m > 0) {
      base = apply_multiplier(base, [m](const Wavevector& kv) {
        return cplx(std::pow(-(kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]), m), 0.0);
      });
    }
    std::vector<double> sq(g.size(), 0.0);
    std::vector<int> index(std::size_t(k), 0);
    const cplx I(0.0, 1.0);
    while (true) {
      auto deriv = apply_multiplier(base, [&](const Wavevector& kv) {
        cplx s = 1.0;
        for (int d : index) s *= I * kv[std::size_t(d)];
        return s;
      });
      const auto phys = to_physical(deriv);
      for (std::size_t c = 0; c < 3; ++c) {
        auto comp = phys.component(c);
        for (std::size_t x = 0; x < g.size(); ++x) sq[x] += comp[x] * comp[x];
      }
      std::size_t pos = 0;
      while (pos < index.size() && index[pos] == 2) index[pos++] = 0;
      if (pos == index.size()) break;
      ++index[pos];
    }
    PhysicalScalar mag(g);
    for (std::size_t x = 0; x < g.size(); ++x) mag.component(0)[x] = std::sqrt(sq[x]);
    const double value = std::pow(t, power) * lp_norm(mag, r);
    const double ratio = data_norm > 0.0 ? value / data_norm : 0.0;
    out.times.push_back(t);
    out.ratios.push_back(ratio);
    out.worst_ratio = std::max(out.worst_ratio, ratio);
  }
  return out;
}

}  // namespace nsbesov
