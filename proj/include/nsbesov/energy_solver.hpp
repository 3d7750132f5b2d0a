// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsbesov/besov_split.hpp"
#include "nsbesov/littlewood_paley.hpp"
#include "nsbesov/mild_solver.hpp"

namespace nsbesov {

// How the background W enters the perturbed system
//   d_t u - Lap u + P div((W + u) (x) (W + u) - s W (x) W) = 0.
// caloric: W solves the heat equation, s = 0, and W (x) W forces u.
// mild:    W solves Navier-Stokes itself, s = 1.
enum class Background { caloric, mild };

struct PerturbedOptions {
  Background background = Background::mild;
  // Advective Courant number tau * k_cut * sum_a max |v_a| allowed per step.
  double cfl_limit = 1.0;
  // Accepted solves have slack >= -slack_tol at every node.
  double slack_tol = 1e-6;
  double fixed_point_tol = 1e-11;
  int max_fixed_point = 60;
};

struct PerturbedSolution {
  TimeGrid grid;
  Trajectory u{};
  EnergyTrace trace{};
  std::vector<int> fixed_point_iterations{};
  double worst_courant = 0.0;
};

// Implicit midpoint in time, dealiased pseudo-spectral in space. The step obeys
//   u_{n+1} - u_n = tau (Lap u_mid - P div(...)(W_mid, u_mid)),
// so the energy identity holds node to node up to the fixed-point tolerance.
// Fails with cfl_violation (carrying a suggested step) and energy_slack.
PerturbedSolution solve_perturbed(const Trajectory& W, const SpectralField& u_init, const TimeGrid& grid,
                                  const PerturbedOptions& options = {});

// Crank-Nicolson heat flow on the grid: the discrete caloric extension the
// integrator is exact against.
Trajectory discrete_caloric(const SpectralField& u0, const TimeGrid& grid);

// Midpoint-rule trace of |w|^2 + 2 int |grad w|^2 <= |w(0)|^2 + 2 int (W (x) w + [W (x) W]) : grad w,
// the bracketed term present for the caloric background only.
EnergyTrace perturbed_energy_trace(const Trajectory& W, const Trajectory& w, const TimeGrid& grid, Background form);

// 4 c T^{delta2/2} ||bar||_{B^{s_{p2}+delta2}_{p2,p2}} < 1 with c = c_bilinear * c_heat, where
// c_heat bounds ||S(.) f||_X(T) / (T^{delta2/2} ||f||_B) and X is the weighted L_{p2} class.
struct GateRecord {
  double N = 0.0;
  double bar_norm = 0.0;
  double c_heat = 0.0;
  double value = 0.0;
  bool open = false;
};

struct ComposeOptions {
  int time_steps = 64;
  // Dyadic sweep N = 2^k, k from k_hi down to k_lo; the first open gate wins.
  int k_lo = -8;
  int k_hi = 10;
  // Fixed N instead of the sweep; its gate must still be open.
  std::optional<double> N;
  // Calibrated from seeded fields when not positive.
  double c_bilinear = 0.0;
  double c_heat = 0.0;
  int calibration_samples = 2;
  std::uint64_t calibration_seed = 4242;
  // Each cfl_violation doubles the time steps, at most this often.
  int max_refinements = 3;
  PerturbedOptions energy;
  PicardOptions picard{1e-11, 60, 0.0, kX4};
};

enum class Construction {
  // p > 4: W mild from bar, u from tilde; energy relation carries |tilde|^2.
  mild_background,
  // p = 4: W = V caloric from the full data, u(0) = 0; V (x) V forces u.
  caloric_background,
};

struct ComposedSolution {
  TimeGrid grid;
  double p = 4.0;
  Construction construction = Construction::caloric_background;
  Trajectory W{};
  Trajectory u{};
  Trajectory v{};
  ScalarTrajectory pressure{};
  SplitResult split;
  double c_bilinear = 0.0;
  GateRecord gate{};
  std::vector<GateRecord> gate_sweep{};
  EnergyTrace energy{};
  // w = u + S(t) tilde against the background S(t) bar; caloric construction only.
  std::optional<EnergyTrace> split_energy{};
  // sup t^w ||W||_{p2} / (2 sup t^w ||S(t) bar||_{p2}); at most 1 when certified.
  double mild_bound_ratio = 0.0;
  std::vector<PicardIterate> picard_history{};
  double worst_courant = 0.0;
  int refinements = 0;

  double reconstruction_defect() const;  // max over nodes of |v - W - u| / |v|
  double divergence() const;             // max divergence_defect over v
};

ComposedSolution build_composed_solution(const SpectralField& u0, double T, double p, const Partition& part,
                                         const ComposeOptions& options = {});

// Bilinear constant and heat constant of the weighted L_{p2} class for p, at horizon T.
struct GateConstants {
  double c_bilinear = 0.0;
  double c_heat = 0.0;
};
GateConstants calibrate_gate_constants(double p, double T, int time_steps, const Partition& part, int samples = 2,
                                       std::uint64_t seed = 4242);

struct SplitSelection {
  SplitResult split;
  GateRecord gate{};
  std::vector<GateRecord> sweep{};
};

// The N choice of build_composed_solution on its own; fails with gate_refused
// listing the sweep when no candidate opens the gate.
SplitSelection select_split(const SpectralField& u0, double T, double p, const Partition& part,
                            const GateConstants& constants, const ComposeOptions& options = {});

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
  // min(2 gamma2 kappa', 1/2) with kappa' = delta2 / (4 gamma1).
  double target = 0.0;
};

double decay_target(const ExponentLedger& ledger);

// Least squares of log(kinetic + dissipation) against log t over 0 < t <= t_star.
DecayFit decay_exponent_fit(const EnergyTrace& trace, double t_star, const ExponentLedger& ledger);

struct UniquenessReport {
  double caloric_x4 = 0.0;
  double eps = 0.0;
  // sup_t ||v_mild - v_composed||_2 / ||v_mild||_2 over nodes t > 0.
  double relative_difference = 0.0;
  std::vector<double> per_node;
};

// Refuses with gate_refused unless sup t^{1/8} ||S(t) u0||_4 < eps.
UniquenessReport uniqueness_compare(const SpectralField& u0, double T, double eps, const Partition& part,
                                    const ComposeOptions& options = {});

// phi(x, t) = amplitude * b((t - t_mid)/t_half) prod_a b((x_a - c_a)/r), b(y) = exp(-1/(1 - y^2)).
struct SpaceTimeBump {
  std::array<double, 3> center{};
  double radius = 1.0;
  double t_lo = 0.0;
  double t_hi = 1.0;
  double amplitude = 1.0;
};

struct LocalEnergyReport {
  double lhs = 0.0;    // 2 int int phi |grad v|^2
  double rhs = 0.0;    // int int |v|^2 (phi_t + Lap phi) + v . grad phi (|v|^2 + 2q)
  double slack = 0.0;  // rhs - lhs
  double scale = 0.0;  // sum of the absolute term integrals
};

// Evaluated at t = T; the bump must vanish near t = 0 and t = T.
LocalEnergyReport local_energy_spotcheck(const Trajectory& v, const ScalarTrajectory& q, const TimeGrid& grid,
                                         const SpaceTimeBump& bump);

struct IntegrabilityReport {
  // ||V . grad V||_{L_{2,5/4}}, ||V . grad u + u . grad V||_{L_{3/2,6/5}}, int int |V (x) u : grad u|.
  std::array<double, 3> norms{};
  // Hoelder right sides with the semigroup bounds, constants set to 1.
  std::array<double, 3> bounds{};
  // Smallest single constant C with norms <= C bounds.
  double constant = 0.0;
};

// data_norm is ||u0||_{B^{-1/4}_{4,inf}}; alpha the exponent of sup ||u||^2 / t^alpha.
IntegrabilityReport integrability_check(const Trajectory& u, const Trajectory& V, const TimeGrid& grid,
                                        double data_norm, double alpha);

struct StabilityMember {
  int k = 0;
  bool solved = false;
  std::string failure;
  double window_distance = 0.0;
  std::vector<double> pairings;  // <v^(k)(T/2), psi_i>
};

struct StabilityReport {
  std::vector<StabilityMember> members;
  std::vector<double> full_pairings;
  double window_lo = 0.0;
  double window_hi = 0.0;
  bool monotone = false;
};

// Solves from weakstar approximants at each k and from u0, all on the caloric
// construction; distances are (int_window ||v^(k) - v||_2^2 dt)^{1/2} over [T/4, 3T/4].
StabilityReport stability_demo(const SpectralField& u0, std::span<const int> ks, double T, const Partition& part,
                               const ComposeOptions& options = {});

}  // namespace nsbesov
