// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nsbesov/fourier_calculus.hpp"
#include "nsbesov/spectral_core.hpp"
#include "support.hpp"

using namespace nsbesov;
using nsbesov::testing::convolution_oracle;
using nsbesov::testing::noise_field;
using nsbesov::testing::relative_diff;

namespace {

SpectralField plane_wave(const FrequencyGrid& g, int m0, int m1, int m2, int comp, cplx amp) {
  SpectralField f(g);
  const int n = g.n();
  auto wrap = [n](int m) { return m < 0 ? m + n : m; };
  f.component(comp)[g.flat(wrap(m0), wrap(m1), wrap(m2))] += amp;
  f.component(comp)[g.flat(wrap(-m0), wrap(-m1), wrap(-m2))] += std::conj(amp);
  return f;
}

}  // namespace

TEST_SUITE("spectral_core") {
  TEST_CASE("resolved band follows the dealiased cutoff") {
    CHECK(FrequencyGrid(64).j_min() == 1);
    CHECK(FrequencyGrid(64).j_max() == 3);
    CHECK(FrequencyGrid(32).j_max() == 2);
    CHECK_FALSE(FrequencyGrid(8).has_band());
    CHECK_THROWS_AS(FrequencyGrid(48), Error);
    CHECK_THROWS_AS(FrequencyGrid(32, 2.0 * std::numbers::pi, 0, 2), Error);
    CHECK_THROWS_AS(FrequencyGrid(32, 2.0 * std::numbers::pi, 1, 3), Error);
    // Halving the box shifts the band by one octave.
    const FrequencyGrid half(64, std::numbers::pi);
    CHECK(half.j_min() == 2);
    CHECK(half.j_max() == 4);
  }

  TEST_CASE("single mode inverts to a cosine") {
    const FrequencyGrid g(16);
    const auto f = plane_wave(g, 1, 2, 0, 0, 1.0);
    const auto x = to_physical(f);
    const double h = g.length() / g.n();
    double worst = 0.0;
    for (int a = 0; a < 16; ++a)
      for (int b = 0; b < 16; ++b)
        for (int c = 0; c < 16; ++c)
          worst = std::max(worst, std::abs(x.component(0)[g.flat(a, b, c)] - 2.0 * std::cos(h * a + 2.0 * h * b)));
    CHECK(worst < 1e-13);
    const auto zero = to_physical(SpectralField(g));
    for (double v : zero.data()) CHECK(v == 0.0);
  }

  TEST_CASE("round trip is the identity") {
    const FrequencyGrid g(32);
    const auto f = noise_field(g, 11);
    CHECK(relative_diff(to_spectral(to_physical(f)), f) < 1e-12);
  }

  TEST_CASE("asymmetric coefficients are rejected") {
    const FrequencyGrid g(8);
    SpectralField f(g);
    f.component(1)[g.flat(1, 0, 0)] = cplx(1.0, 0.0);
    try {
      (void)to_physical(f);
      FAIL("expected a symmetry violation");
    } catch (const Error& e) {
      CHECK(e.reason() == Reason::symmetry_violation);
      CHECK(std::string(e.what()).find("k = (") != std::string::npos);
    }
  }

  TEST_CASE("Parseval holds for random fields") {
    const FrequencyGrid g(16);
    double worst = 0.0;
    for (unsigned seed = 0; seed < 100; ++seed) {
      const auto f = noise_field(g, seed);
      const auto x = to_physical(f);
      double phys = 0.0;
      for (double v : x.data()) phys += v * v;
      phys *= g.cell_volume();
      worst = std::max(worst, std::abs(phys - inner(f, f)) / phys);
    }
    CHECK(worst < 1e-12);
  }

  TEST_CASE("multipliers act diagonally") {
    const FrequencyGrid g(16);
    const auto f = noise_field(g, 3);
    CHECK(relative_diff(apply_multiplier(f, [](const Wavevector&) { return cplx(1.0); }), f) == 0.0);

    const auto wave = plane_wave(g, 2, -1, 1, 2, cplx(0.5, 0.25));
    const double t = 0.3;
    const auto heated = apply_multiplier(wave, [t](const Wavevector& k) {
      return cplx(std::exp(-t * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2])), 0.0);
    });
    const auto idx = g.flat(2, g.n() - 1, 1);
    CHECK(std::abs(heated.component(2)[idx] - std::exp(-6.0 * t) * cplx(0.5, 0.25)) < 1e-15);

    // d/dx_0 of 2 Re(a e^{i k.x}) is 2 Re(i k_0 a e^{i k.x}).
    const auto dx = apply_multiplier(wave, [](const Wavevector& k) { return cplx(0.0, k[0]); });
    CHECK(std::abs(dx.component(2)[idx] - cplx(0.0, 2.0) * cplx(0.5, 0.25)) < 1e-15);

    CHECK_THROWS_AS(apply_multiplier(f, [](const Wavevector& k) { return cplx(1.0 / k[0], 0.0); }), Error);
  }

  TEST_CASE("derivative and heat multipliers commute") {
    const FrequencyGrid g(16);
    const auto f = noise_field(g, 5);
    auto d1 = [](const Wavevector& k) { return cplx(0.0, k[1]); };
    const auto a = apply_multiplier(heat_semigroup(f, 0.2), d1);
    const auto b = heat_semigroup(apply_multiplier(f, d1), 0.2);
    CHECK(relative_diff(a, b) < 1e-14);
  }

  TEST_CASE("shear flow squares to a single component") {
    const FrequencyGrid g(16);
    const auto shear = plane_wave(g, 0, 1, 0, 0, cplx(0.0, -0.5));  // sin(x_1)
    const auto prod = dealiased_product(shear, shear);
    const auto x = to_physical(prod);
    const double h = g.length() / g.n();
    double worst = 0.0;
    for (int b = 0; b < 16; ++b) {
      const double s = std::sin(h * b);
      worst = std::max(worst, std::abs(x.component(0)[g.flat(3, b, 5)] - s * s));
    }
    CHECK(worst < 1e-14);
    for (std::size_t c = 1; c < 9; ++c) CHECK(nsbesov::testing::max_abs(prod.component(c)) < 1e-15);
    const auto zero = dealiased_product(SpectralField(g), shear);
    CHECK(nsbesov::testing::max_abs(zero.data()) == 0.0);
  }

  TEST_CASE("dealiased product matches the direct convolution on 8^3") {
    const FrequencyGrid g(8);
    for (unsigned seed = 0; seed < 3; ++seed) {
      const auto f = noise_field(g, 100 + seed);
      const auto h = noise_field(g, 200 + seed);
      const auto fast = dealiased_product(f, h);
      const auto slow = convolution_oracle(f, h);
      CHECK(relative_diff(fast, slow) < 1e-10);
      CHECK(relative_diff(dealiased_square(f), convolution_oracle(f, f)) < 1e-10);
    }
  }

  TEST_CASE("lower-third fields lose nothing under the product") {
    const FrequencyGrid g(16);
    auto f = noise_field(g, 7);
    auto h = noise_field(g, 8);
    // Restrict to |m| <= 2 so the exact product has |m| <= 4 < cutoff 5.
    for (auto* field : {&f, &h})
      for_each_mode(g, [&](std::size_t x, int a, int b, int c) {
        if (std::abs(g.mode(a)) > 2 || std::abs(g.mode(b)) > 2 || std::abs(g.mode(c)) > 2)
          for (int i = 0; i < 3; ++i) field->component(i)[x] = 0.0;
      });
    const auto prod = dealiased_product(f, h);
    const auto pf = to_physical(f), ph = to_physical(h);
    const auto pp = to_physical(prod);
    double worst = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x)
      worst = std::max(worst, std::abs(pp.component(5)[x] - pf.component(1)[x] * ph.component(2)[x]));
    CHECK(worst < 1e-12);
  }

  TEST_CASE("gradient pairing matches physical quadrature") {
    const FrequencyGrid g(16);
    const auto u = noise_field(g, 21);
    const auto A = dealiased_product(noise_field(g, 22), noise_field(g, 23));
    const auto grad = to_physical(gradient(u));
    const auto pa = to_physical(A);
    double phys = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x)
      for (std::size_t c = 0; c < 9; ++c) phys += pa.component(c)[x] * grad.component(c)[x];
    phys *= g.cell_volume();
    CHECK(std::abs(phys - contract_gradient(A, u)) < 1e-10 * std::abs(phys));
    CHECK(dissipation(u) == doctest::Approx(inner(gradient(u), gradient(u))).epsilon(1e-12));
  }

  TEST_CASE("field dumps round trip") {
    const FrequencyGrid g(8);
    auto f = noise_field(g, 1);
    f.mark_divergence_free(true);
    std::stringstream buf;
    write_field(buf, f);
    const auto back = read_field<3>(buf);
    CHECK(back.grid() == g);
    CHECK(back.divergence_free());
    CHECK(relative_diff(back, f) == 0.0);
    std::stringstream bad("garbage");
    CHECK_THROWS_AS(read_field<3>(bad), Error);
  }
}
