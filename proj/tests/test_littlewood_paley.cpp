// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nsbesov/fourier_calculus.hpp"
#include "nsbesov/littlewood_paley.hpp"
#include "support.hpp"

using namespace nsbesov;
using nsbesov::testing::noise_field;
using nsbesov::testing::relative_diff;

namespace {

SpectralField mode_field(const FrequencyGrid& g, int m0, int m1, int m2) {
  SpectralField f(g);
  const int n = g.n();
  auto wrap = [n](int m) { return m < 0 ? m + n : m; };
  f.component(2)[g.flat(wrap(m0), wrap(m1), wrap(m2))] = 1.0;
  f.component(2)[g.flat(wrap(-m0), wrap(-m1), wrap(-m2))] = 1.0;
  return f;
}

}  // namespace

TEST_SUITE("littlewood_paley") {
  TEST_CASE("profiles stay in [0, 1] and telescope") {
    double worst_low = 0.0;
    for (double r = 1e-3; r < 200.0; r *= 1.0137) {
      const double phi = partition_profile(r), chi = low_profile(r);
      CHECK(phi >= 0.0);
      CHECK(phi <= 1.0);
      CHECK(chi >= 0.0);
      CHECK(chi <= 1.0);
      double sum = chi;
      for (int j = 0; j < 12; ++j) sum += partition_profile(std::ldexp(r, -j));
      worst_low = std::max(worst_low, std::abs(sum - 1.0));
    }
    CHECK(worst_low < 1e-12);
    CHECK(low_profile(4.0 / 3.0) == 0.0);
    CHECK(partition_profile(0.75) == 0.0);
    CHECK(partition_profile(8.0 / 3.0) == 0.0);
    double s = low_profile(1.0);
    for (int j = 0; j < 4; ++j) s += partition_profile(std::ldexp(1.0, -j));
    CHECK(std::abs(s - 1.0) < 1e-12);
  }

  TEST_CASE("telescoping on the resolved band of the 64^3 grid") {
    const auto part = build_partition(FrequencyGrid(64));
    const double lo = std::ldexp(4.0 / 3.0, part.j_min()), hi = std::ldexp(1.5, part.j_max());
    std::vector<std::vector<double>> sym;
    for (int j = part.j_min(); j <= part.j_max(); ++j) sym.push_back(part.block_symbol(j));
    double worst = 0.0;
    std::size_t tested = 0;
    for (std::size_t x = 0; x < part.grid().size(); ++x) {
      const double r = part.radius(x);
      if (r < lo || r > hi) continue;
      double s = 0.0;
      for (const auto& b : sym) s += b[x];
      worst = std::max(worst, std::abs(s - 1.0));
      ++tested;
    }
    CHECK(tested > 5000);
    CHECK(worst < 1e-12);
  }

  TEST_CASE("blocks two apart are orthogonal") {
    const auto part = build_partition(FrequencyGrid(32));
    for (int j = part.lattice_lo(); j + 2 <= part.lattice_hi(); ++j) {
      const auto a = part.block_symbol(j), b = part.block_symbol(j + 2);
      double worst = 0.0;
      for (std::size_t x = 0; x < a.size(); ++x) worst = std::max(worst, a[x] * b[x]);
      CHECK(worst == 0.0);
    }
    const auto f = noise_field(part.grid(), 4);
    const auto twice = dyadic_block(dyadic_block(f, 1, part), 3, part);
    CHECK(nsbesov::testing::max_abs(twice.data()) == 0.0);
  }

  TEST_CASE("narrow grids are refused") {
    CHECK_THROWS_AS(build_partition(FrequencyGrid(16)), Error);
    const auto part = build_partition(FrequencyGrid(32));
    CHECK_THROWS_AS(dyadic_block(SpectralField(part.grid()), part.lattice_hi() + 1, part), Error);
  }

  TEST_CASE("blocks reassemble the field") {
    const auto part = build_partition(FrequencyGrid(32));
    auto f = noise_field(part.grid(), 9);
    SpectralField sum(part.grid());
    for (int j = part.lattice_lo(); j <= part.lattice_hi(); ++j) sum += dyadic_block(f, j, part);
    for (int c = 0; c < 3; ++c) sum.component(c)[0] = f.component(c)[0];
    CHECK(relative_diff(sum, f) < 1e-10);
  }

  TEST_CASE("a field inside the plateau of one block") {
    // |k| = sqrt(29) lies where phi(2^-2 .) = 1.
    const auto part = build_partition(FrequencyGrid(32));
    const auto f = mode_field(part.grid(), 5, 2, 0);
    CHECK(relative_diff(dyadic_block(f, 2, part), f) < 1e-15);
    CHECK(nsbesov::testing::max_abs(dyadic_block(f, 0, part).data()) == 0.0);
    const double lp = lp_norm(to_physical(f), 3.0);
    const auto report = besov_norm(f, 0.4, 3.0, 2.0, part);
    CHECK(report.value == doctest::Approx(std::pow(2.0, 0.8) * lp).epsilon(1e-12));
    CHECK(report.tail_bound == 0.0);
    CHECK(besov_norm(SpectralField(part.grid()), -0.25, 4.0, kInfinity, part).value == 0.0);
  }

  TEST_CASE("critical norm is invariant under dyadic rescaling") {
    const FrequencyGrid big(64), small(64, std::numbers::pi);
    const auto part_big = build_partition(big), part_small = build_partition(small);
    auto f = noise_field(big, 31);
    for_each_mode(big, [&](std::size_t x, int, int, int) {
      if (part_big.radius(x) > 10.0)
        for (int c = 0; c < 3; ++c) f.component(c)[x] = 0.0;
    });
    // Same coefficients on the half box: f_2(x) = 2 f(2x).
    SpectralField scaled(small);
    for (std::size_t i = 0; i < f.data().size(); ++i) scaled.data()[i] = 2.0 * f.data()[i];
    const double a = besov_norm(f, -0.25, 4.0, kInfinity, part_big).value;
    const double b = besov_norm(scaled, -0.25, 4.0, kInfinity, part_small).value;
    CHECK(b == doctest::Approx(a).epsilon(1e-12));
  }

  TEST_CASE("heat-flow norm of a single unit mode peaks at t = 1/8") {
    const auto part = build_partition(FrequencyGrid(32));
    SpectralField f(part.grid());
    f.component(1)[part.grid().flat(0, 0, 1)] = 1.0;
    f.component(1)[part.grid().flat(0, 0, 31)] = 1.0;
    const double l4 = std::pow(6.0 * part.grid().volume(), 0.25);
    const auto report = besov_norm_heat(f, -0.25, 4.0, kInfinity, part, 2);
    CHECK(report.value == doctest::Approx(std::pow(0.125, 0.125) * std::exp(-0.125) * l4).epsilon(1e-12));
    CHECK(besov_norm_heat(SpectralField(part.grid()), -0.25, 4.0, kInfinity, part).value == 0.0);
    CHECK_THROWS_AS(besov_norm_heat(f, 0.0, 4.0, kInfinity, part), Error);
  }

  TEST_CASE("heat-flow and dyadic norms are equivalent") {
    const auto part = build_partition(FrequencyGrid(32));
    double lo = 1e300, hi = 0.0;
    for (unsigned seed = 0; seed < 100; ++seed) {
      const auto f = noise_field(part.grid(), 1000 + seed);
      const double r = besov_norm_heat(f, -0.25, 4.0, kInfinity, part).value /
                       besov_norm(f, -0.25, 4.0, kInfinity, part).value;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    const double C = std::max(hi, 1.0 / lo);
    MESSAGE("heat/dyadic equivalence constant " << C);
    CHECK(lo >= 1.0 / C);
    CHECK(hi / lo < 1.5);
  }

  TEST_CASE("norms are homogeneous") {
    const auto part = build_partition(FrequencyGrid(32));
    const auto f = noise_field(part.grid(), 77);
    const double a = besov_norm(f, 0.25, 3.0, 2.0, part).value;
    const double b = besov_norm(-3.5 * f, 0.25, 3.0, 2.0, part).value;
    CHECK(std::abs(b - 3.5 * a) <= 1e-12 * b);
    const double c = besov_norm_heat(f, -0.25, 4.0, 2.0, part).value;
    const double d = besov_norm_heat(0.5 * f, -0.25, 4.0, 2.0, part).value;
    CHECK(std::abs(d - 0.5 * c) <= 1e-12 * c);
  }

  TEST_CASE("interpolation ratio is amplitude independent") {
    const auto part = build_partition(FrequencyGrid(32));
    const auto f = mode_field(part.grid(), 5, 2, 0);
    const auto a = interpolation_check(f, -0.5, 0.5, 0.4, 4.0, part, 1.0);
    const auto b = interpolation_check(7.0 * f, -0.5, 0.5, 0.4, 4.0, part, 1.0);
    CHECK(a.ratio == doctest::Approx(b.ratio).epsilon(1e-12));
    const auto zero = interpolation_check(SpectralField(part.grid()), -0.5, 0.5, 0.4, 4.0, part, 1.0);
    CHECK(zero.lhs == 0.0);
    CHECK_FALSE(zero.violated);
    CHECK_THROWS_AS(interpolation_check(f, -0.5, 0.5, 1.0, 4.0, part, 1.0), Error);
  }

  TEST_CASE("blocks are bounded by the profile kernel norm") {
    const double kernel = profile_l1_norm();
    MESSAGE("||F^-1 phi||_L1 = " << kernel);
    CHECK(kernel == doctest::Approx(12.2458).epsilon(1e-4));
    const auto part = build_partition(FrequencyGrid(32));
    for (unsigned seed = 0; seed < 5; ++seed) {
      const auto f = noise_field(part.grid(), 300 + seed);
      for (double p : {2.0, 4.0, kInfinity}) {
        const double whole = lp_norm(to_physical(f), p);
        for (int j = part.lattice_lo(); j <= part.lattice_hi(); ++j)
          CHECK(lp_norm(to_physical(dyadic_block(f, j, part)), p) <= kernel * whole * (1.0 + 1e-12));
      }
    }
  }

  TEST_CASE("Besov embedding holds with one constant") {
    const auto part = build_partition(FrequencyGrid(32));
    double worst = 0.0;
    for (unsigned seed = 0; seed < 20; ++seed) {
      const auto f = noise_field(part.grid(), 500 + seed);
      const double big = besov_norm(f, 0.5 - 3.0 * (0.5 - 0.25), 4.0, kInfinity, part).value;
      const double small = besov_norm(f, 0.5, 2.0, 2.0, part).value;
      worst = std::max(worst, big / small);
    }
    MESSAGE("embedding constant " << worst);
    CHECK(worst < profile_l1_norm());
  }
}
