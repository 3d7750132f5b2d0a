// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nsbesov/energy_solver.hpp"
#include "nsbesov/fourier_calculus.hpp"
#include "nsbesov/random_fields.hpp"
#include "support.hpp"

using namespace nsbesov;
using nsbesov::testing::max_abs;
using nsbesov::testing::relative_diff;

namespace {

// (sin x cos y, -cos x sin y, 0): |k|^2 = 2 on every mode.
SpectralField taylor_green(const FrequencyGrid& g) {
  SpectralField u(g);
  const int n = g.n();
  for (int sa : {1, -1})
    for (int sb : {1, -1}) {
      const auto i = g.flat((sa + n) % n, (sb + n) % n, 0);
      u.component(0)[i] += cplx(0.0, -0.25 * sa);
      u.component(1)[i] += cplx(0.0, 0.25 * sb);
    }
  u.mark_divergence_free(true);
  return u;
}

// a sin(x2) e1.
SpectralField shear(const FrequencyGrid& g, double a) {
  SpectralField u(g);
  u.component(0)[g.flat(0, 1, 0)] = cplx(0.0, -0.5 * a);
  u.component(0)[g.flat(0, g.n() - 1, 0)] = cplx(0.0, 0.5 * a);
  u.mark_divergence_free(true);
  return u;
}

SpectralField seeded(const Partition& part, std::uint64_t seed, double norm = 1.0) {
  FieldRecipe r;
  r.seed = seed;
  r.critical_norm = norm;
  return random_besov_field(part, r);
}

const Partition& box32() {
  static const auto part = build_partition(FrequencyGrid(32));
  return part;
}

const GateConstants& constants4() {
  static const auto c = calibrate_gate_constants(4.0, 1.0, 32, box32());
  return c;
}

ComposeOptions options4(int steps = 32) {
  ComposeOptions o;
  o.time_steps = steps;
  o.c_bilinear = constants4().c_bilinear;
  o.c_heat = constants4().c_heat;
  return o;
}

// Critical-normalised data split at N = 1/16, where the excess piece carries real L2 mass.
const ComposedSolution& composed4() {
  static const auto sol = [] {
    auto o = options4(64);
    o.N = 1.0 / 16.0;
    return build_composed_solution(seeded(box32(), 3), 1.0, 4.0, box32(), o);
  }();
  return sol;
}

Trajectory zeros(const FrequencyGrid& g, const TimeGrid& tg) {
  return Trajectory(tg.nodes().size(), SpectralField(g));
}

}  // namespace

TEST_SUITE("energy_solver") {
  TEST_CASE("discrete caloric flow is Crank-Nicolson") {
    const FrequencyGrid g(16);
    const auto u = taylor_green(g);
    const auto tg = TimeGrid::uniform(0.5, 5);
    const auto flow = discrete_caloric(u, tg);
    REQUIRE(flow.size() == 6);
    const double h = 0.1, factor = (1.0 - h) / (1.0 + h);  // |k|^2 tau / 2 = h
    for (int i = 0; i <= 5; ++i)
      CHECK(relative_diff(flow[std::size_t(i)], std::pow(factor, i) * u) < 1e-14);
    CHECK(divergence_defect(flow.back()) < 1e-14);
  }

  TEST_CASE("zero data and zero background stay zero") {
    const FrequencyGrid g(16);
    const auto tg = TimeGrid::graded(1.0, 8);
    SpectralField zero(g);
    zero.mark_divergence_free(true);
    const auto sol = solve_perturbed(zeros(g, tg), zero, tg);
    for (const auto& f : sol.u) CHECK(max_abs(f.data()) == 0.0);
    CHECK(sol.trace.worst_slack() == 0.0);
  }

  TEST_CASE("Taylor-Green perturbation decays like the heat flow") {
    const FrequencyGrid g(16);
    const auto u0 = taylor_green(g);
    const auto tg = TimeGrid::uniform(1.0, 256);
    const auto sol = solve_perturbed(zeros(g, tg), u0, tg);
    const double e0 = inner(u0, u0);
    double energy_err = 0.0, field_err = 0.0;
    for (int i = 0; i <= tg.steps(); ++i) {
      const double t = tg.at(i);
      energy_err = std::max(energy_err, std::abs(sol.trace.kinetic[std::size_t(i)] / (e0 * std::exp(-4.0 * t)) - 1.0));
      field_err = std::max(field_err, relative_diff(sol.u[std::size_t(i)], std::exp(-2.0 * t) * u0));
    }
    MESSAGE("Taylor-Green energy error " << energy_err);
    CHECK(energy_err < 1e-4);
    CHECK(field_err < 1e-4);
    CHECK(sol.trace.worst_slack() >= -1e-10);
    // The fixed point is met at once: the nonlinearity is a pure gradient.
    for (int k : sol.fixed_point_iterations) CHECK(k <= 2);
  }

  TEST_CASE("perturbed solves keep the energy identity, momentum and weak continuity") {
    const auto& part = box32();
    const auto& g = part.grid();
    const double T = 0.25;
    auto data = seeded(part, 11, 0.5);
    for (int c = 0; c < 3; ++c) data.component(c)[0] = cplx(0.05 * (c + 1), 0.0);
    data.mark_divergence_free(true);
    const auto background_data = seeded(part, 12, 0.5);
    const auto tests = divergence_free_test_fields(g, 5);

    for (const auto form : {Background::mild, Background::caloric}) {
      CAPTURE(int(form));
      std::vector<PerturbedSolution> runs;
      for (int steps : {8, 16, 32}) {
        const auto tg = TimeGrid::uniform(T, steps);
        const auto W = form == Background::mild ? picard_solve(background_data, tg).velocity
                                                : caloric_extension(background_data, tg);
        PerturbedOptions o;
        o.background = form;
        runs.push_back(solve_perturbed(W, data, tg, o));
      }
      for (const auto& run : runs) {
        CHECK(run.trace.worst_slack() >= -1e-6);
        for (std::size_t i = 0; i < run.u.size(); ++i) {
          CHECK(divergence_defect(run.u[i]) < 1e-10);
          for (int c = 0; c < 3; ++c) CHECK(std::abs(run.u[i].component(c)[0] - data.component(c)[0]) < 1e-14);
        }
      }
      // Weak continuity: the midpoint step gives
      //   <u_{n+1} - u_n, psi> / tau = <u_mid, Lap psi> + <N_mid, grad psi>,
      // so Cauchy-Schwarz bounds each rate by quantities controlled by the energy.
      const auto& fine = runs[2];
      const auto W = form == Background::mild ? picard_solve(background_data, fine.grid).velocity
                                              : caloric_extension(background_data, fine.grid);
      const double sigma = form == Background::mild ? 1.0 : 0.0;
      for (const auto& psi : tests) {
        const double lap = l2_norm(apply_multiplier(psi, [](const Wavevector& k) {
          return cplx(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]), 0.0);
        }));
        const double grad = l2_norm(gradient(psi));
        for (int i = 1; i <= fine.grid.steps(); ++i) {
          const auto n = std::size_t(i);
          const auto mid = 0.5 * (fine.u[n] + fine.u[n - 1]);
          const auto W_mid = dealias(0.5 * (W[n] + W[n - 1]));
          auto flux = dealiased_square(W_mid + mid);
          flux -= sigma * dealiased_square(W_mid);
          const double rate = std::abs(inner(fine.u[n] - fine.u[n - 1], psi)) / (fine.grid.at(i) - fine.grid.at(i - 1));
          CHECK(rate <= (l2_norm(mid) * lap + l2_norm(flux) * grad) * (1.0 + 1e-8));
        }
      }
      // Second order under step halving; the first step approaches the data.
      const double d1 = l2_norm(runs[0].u.back() - runs[1].u.back());
      const double d2 = l2_norm(runs[1].u.back() - runs[2].u.back());
      MESSAGE("final-time changes under halving " << d1 << " -> " << d2);
      CHECK(d1 / d2 > 3.0);
      CHECK(l2_norm(runs[2].u[1] - data) < l2_norm(runs[0].u[1] - data));
    }
  }

  TEST_CASE("refusals") {
    const auto& part = box32();
    const auto tg = TimeGrid::uniform(1.0, 2);
    auto big = seeded(part, 5, 50.0);
    try {
      solve_perturbed(caloric_extension(big, tg), big, tg);
      FAIL("expected a CFL violation");
    } catch (const Error& e) {
      CHECK(e.reason() == Reason::cfl_violation);
      CHECK(std::string(e.what()).find("suggested step") != std::string::npos);
    }
    PerturbedOptions strict;
    strict.slack_tol = -1.0;  // demands slack >= 1, which no exact identity meets
    const auto small = seeded(part, 6, 0.1);
    const auto fine = TimeGrid::uniform(0.1, 4);
    try {
      solve_perturbed(zeros(part.grid(), fine), small, fine, strict);
      FAIL("expected an energy-slack rejection");
    } catch (const Error& e) {
      CHECK(e.reason() == Reason::energy_slack);
    }
    SpectralField compressible(part.grid());
    compressible.component(0)[part.grid().flat(1, 0, 0)] = 1.0;
    compressible.component(0)[part.grid().flat(31, 0, 0)] = 1.0;
    CHECK_THROWS_AS(solve_perturbed(zeros(part.grid(), fine), compressible, fine), Error);
    CHECK_THROWS_AS(solve_perturbed(Trajectory(2, SpectralField(part.grid())), small, fine), Error);
  }

  TEST_CASE("composed solution on the caloric construction") {
    const auto& sol = composed4();
    CHECK(sol.construction == Construction::caloric_background);
    CHECK(sol.gate.open);
    CHECK(sol.split.norms.tilde_l2 > 1.0);
    CHECK(sol.reconstruction_defect() < 1e-10);
    CHECK(sol.divergence() < 1e-10);
    CHECK(sol.energy.worst_slack() >= -1e-6);
    REQUIRE(sol.split_energy);
    CHECK(sol.split_energy->worst_slack() >= -1e-6);
    CHECK(sol.split_energy->kinetic[0] == doctest::Approx(std::pow(l2_norm(sol.split.tilde), 2)).epsilon(1e-10));
    CHECK(sol.energy.kinetic[0] == 0.0);
    const auto tests = divergence_free_test_fields(box32().grid(), 10);
    const double residual = weak_form_residual(sol.v, sol.grid, tests).worst_relative;
    MESSAGE("weak-form residual " << residual);
    CHECK(residual < 5e-3);
    CHECK(sol.pressure.size() == sol.v.size());
  }

  TEST_CASE("degenerate split reproduces the mild solution") {
    const auto& part = box32();
    auto u0 = shear(part.grid(), 1e-3);
    u0 += 1e-3 * taylor_green(part.grid());
    const auto sol = build_composed_solution(u0, 1.0, 4.0, part, options4(16));
    CHECK(sol.split.norms.tilde_l2 < 1e-12);
    const auto mild = picard_solve(u0, sol.grid);
    double worst = 0.0;
    for (std::size_t i = 1; i < sol.v.size(); ++i)
      worst = std::max(worst, l2_norm(sol.v[i] - mild.velocity[i]) / l2_norm(mild.velocity[i]));
    CHECK(worst < 1e-6);
  }

  TEST_CASE("gate sweep and its dependence on T") {
    const auto& part = box32();
    const auto u0 = seeded(part, 3, 16.0);
    auto o = options4();
    o.k_lo = -6;
    o.k_hi = 4;
    const auto one = select_split(u0, 1.0, 4.0, part, constants4(), o);
    const auto two = select_split(u0, 2.0, 4.0, part, constants4(), o);
    CHECK(one.gate.open);
    CHECK(one.sweep.size() >= 2);  // the top of the sweep is closed at this amplitude
    for (std::size_t i = 0; i + 1 < one.sweep.size(); ++i) CHECK_FALSE(one.sweep[i].open);
    // A longer horizon tightens the gate, so N cannot grow.
    CHECK(two.gate.N <= one.gate.N);
    auto closed = o;
    closed.k_lo = closed.k_hi = 4;
    try {
      select_split(u0, 1.0, 4.0, part, constants4(), closed);
      FAIL("expected the gate to refuse");
    } catch (const Error& e) {
      CHECK(e.reason() == Reason::gate_refused);
      CHECK(std::string(e.what()).find("16:") != std::string::npos);
    }
  }

  TEST_CASE("mild construction for p > 4") {
    const auto& part = box32();
    ComposeOptions o;
    o.time_steps = 24;
    o.N = 1.0 / 16.0;
    FieldRecipe r;
    r.seed = 3;
    r.p = 5.0;
    const auto sol = build_composed_solution(random_besov_field(part, r), 0.5, 5.0, part, o);
    CHECK(sol.construction == Construction::mild_background);
    CHECK_FALSE(sol.split_energy);
    CHECK(sol.split.norms.tilde_l2 > 0.5);
    CHECK(sol.mild_bound_ratio <= 1.0);
    CHECK(sol.picard_history.size() >= 2);
    CHECK(sol.energy.worst_slack() >= -1e-6);
    CHECK(sol.energy.kinetic[0] == doctest::Approx(std::pow(l2_norm(sol.split.tilde), 2)).epsilon(1e-10));
    CHECK(sol.reconstruction_defect() < 1e-10);
    CHECK(sol.divergence() < 1e-10);
  }

  TEST_CASE("decay exponent fit") {
    const auto ledger = derive_exponents(4.0);
    CHECK(decay_target(ledger) == doctest::Approx(0.25).epsilon(1e-14));
    EnergyTrace synthetic;
    for (int i = 0; i <= 40; ++i) {
      const double t = 0.1 * i / 40.0;
      synthetic.times.push_back(t);
      synthetic.kinetic.push_back(std::pow(t, 0.3));
      synthetic.dissipation.push_back(0.0);
    }
    const auto fit = decay_exponent_fit(synthetic, 0.1, ledger);
    CHECK(fit.slope == doctest::Approx(0.3).epsilon(1e-3));
    CHECK(fit.points == 40);
    CHECK_THROWS_AS(decay_exponent_fit(synthetic, 0.01, ledger), Error);
    CHECK_THROWS_AS(decay_exponent_fit(synthetic, 0.0, ledger), Error);

    // Heat flow of L2 data: kinetic plus dissipation is conserved, slope 0.
    const FrequencyGrid g(16);
    const auto tg = TimeGrid::graded(1.0, 32);
    const auto heat = solve_perturbed(zeros(g, tg), taylor_green(g), tg);
    CHECK(std::abs(decay_exponent_fit(heat.trace, 0.5, ledger).slope) < 1e-10);

    const auto composed = decay_exponent_fit(composed4().energy, 0.1, ledger);
    MESSAGE("fitted decay exponent " << composed.slope << " against " << composed.target);
    CHECK(composed.slope >= composed.target - 0.1);
  }

  TEST_CASE("uniqueness comparison") {
    const auto& part = box32();
    auto o = options4(16);
    SpectralField zero(part.grid());
    zero.mark_divergence_free(true);
    CHECK(uniqueness_compare(zero, 1.0, 1.0, part, o).relative_difference == 0.0);
    CHECK(uniqueness_compare(shear(part.grid(), 0.1), 1.0, 1.0, part, o).relative_difference <= 1e-8);
    CHECK_THROWS_AS(uniqueness_compare(seeded(part, 7), 1.0, 1e-3, part, o), Error);

    const auto small = seeded(part, 7, 0.5);
    const auto coarse = uniqueness_compare(small, 0.5, 1.0, part, o);
    o.time_steps = 32;
    const auto fine = uniqueness_compare(small, 0.5, 1.0, part, o);
    MESSAGE("two-path distance " << coarse.relative_difference << " -> " << fine.relative_difference);
    CHECK(fine.relative_difference <= 1e-2);
    CHECK(fine.relative_difference < coarse.relative_difference);
  }

  TEST_CASE("local energy spot check") {
    const FrequencyGrid g(32);
    const auto tg = TimeGrid::uniform(1.0, 64);
    const SpaceTimeBump bump{{1.0, 2.0, 3.0}, 2.0, 0.2, 0.8, 1.0};
    const Trajectory none(tg.nodes().size(), SpectralField(g));
    const ScalarTrajectory no_pressure(tg.nodes().size(), ScalarSpectralField(g));
    const auto zero = local_energy_spotcheck(none, no_pressure, tg, bump);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);

    // Decaying shear e^{-t} sin x2 e1 is an exact solution with zero pressure; the
    // remaining slack is the grid quadrature of the bump and shrinks with n.
    auto shear_slack = [&](int n) {
      const FrequencyGrid gn(n);
      Trajectory decaying;
      for (double t : tg.nodes()) decaying.push_back(shear(gn, std::exp(-t)));
      const auto r = local_energy_spotcheck(decaying, pressure_trajectory(decaying), tg, bump);
      return std::abs(r.slack) / r.scale;
    };
    const double coarse = shear_slack(32), fine = shear_slack(64);
    MESSAGE("shear local energy relative slack " << coarse << " -> " << fine);
    CHECK(fine < 1e-3);
    CHECK(coarse / fine > 4.0);
    Trajectory decaying;
    for (double t : tg.nodes()) decaying.push_back(shear(g, std::exp(-t)));

    auto negative = bump;
    negative.amplitude = -1.0;
    CHECK_THROWS_AS(local_energy_spotcheck(decaying, no_pressure, tg, negative), Error);
    auto early = bump;
    early.t_lo = 0.0;
    CHECK_THROWS_AS(local_energy_spotcheck(decaying, no_pressure, tg, early), Error);

    const auto& sol = composed4();
    for (const auto& c : {std::array<double, 3>{1, 2, 3}, {4, 4, 1}, {2, 5, 5}}) {
      const auto r = local_energy_spotcheck(sol.v, sol.pressure, sol.grid, {c, 2.0, 0.2, 0.8, 1.0});
      MESSAGE("composed local energy slack " << r.slack << " of scale " << r.scale);
      CHECK(r.slack >= -1e-5);
    }
  }

  TEST_CASE("integrability of the nonlinear terms") {
    const auto& sol = composed4();
    const Trajectory none(sol.u.size(), SpectralField(box32().grid()));
    const auto a = integrability_check(sol.u, none, sol.grid, 1.0, 0.25);
    for (double x : a.norms) CHECK(x == 0.0);
    const auto b = integrability_check(none, sol.W, sol.grid, 1.0, 0.25);
    CHECK(b.norms[0] > 0.0);
    CHECK(b.norms[1] == 0.0);
    CHECK(b.norms[2] == 0.0);
    const auto c = integrability_check(sol.u, sol.W, sol.grid, 1.0, 0.25);
    for (double x : c.norms) CHECK((x > 0.0 && std::isfinite(x)));
    CHECK(std::isfinite(c.constant));
    for (int i = 0; i < 3; ++i) CHECK(c.norms[std::size_t(i)] <= c.constant * c.bounds[std::size_t(i)] * (1 + 1e-12));
    CHECK_THROWS_AS(integrability_check(sol.u, sol.W, sol.grid, 1.0, 0.0), Error);
  }

  TEST_CASE("weak-star stability on a small box") {
    const auto part = build_partition(FrequencyGrid(32, std::numbers::pi / 2.0));
    ComposeOptions o;
    o.time_steps = 48;
    const double T = 0.1;
    const int ks[] = {2, 4, 8};

    // A single |k| = 4 mode lies inside every approximant.
    const auto low = 1e-2 * shear(part.grid(), 1.0);
    const auto same = stability_demo(low, ks, T, part, o);
    for (const auto& m : same.members) {
      REQUIRE(m.solved);
      CHECK(m.window_distance < 1e-12);
    }

    const auto generic = stability_demo(seeded(part, 21), ks, T, part, o);
    for (const auto& m : generic.members) {
      CAPTURE(m.k);
      REQUIRE(m.solved);
      MESSAGE("k = " << m.k << " window distance " << m.window_distance);
    }
    CHECK(generic.monotone);
    CHECK(generic.members.front().window_distance > 0.0);
    // Pairings against fixed test fields approach the full-data pairing.
    for (std::size_t i = 0; i < generic.full_pairings.size(); ++i) {
      const double d0 = std::abs(generic.members[0].pairings[i] - generic.full_pairings[i]);
      const double d2 = std::abs(generic.members[2].pairings[i] - generic.full_pairings[i]);
      CHECK(d2 <= d0 + 1e-14);
    }
  }
}
