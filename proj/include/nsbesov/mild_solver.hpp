// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nsbesov/spectral_core.hpp"

namespace nsbesov {

// Nodes 0 = t_0 < t_1 < ... < t_n = T. The origin is kept so every trajectory
// starts from its data.
class TimeGrid {
 public:
  // t_i = T (i/n)^2.
  static TimeGrid graded(double T, int n);
  static TimeGrid uniform(double T, int n);
  // Given nodes must start at 0 and increase strictly.
  static TimeGrid from_nodes(std::vector<double> nodes);

  double horizon() const noexcept { return nodes_.back(); }
  int steps() const noexcept { return int(nodes_.size()) - 1; }
  double at(int i) const { return nodes_.at(std::size_t(i)); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  // Exact match required; throws invalid_argument otherwise.
  int index_of(double t) const;

 private:
  explicit TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {}
  std::vector<double> nodes_;
};

using Trajectory = std::vector<SpectralField>;
using ScalarTrajectory = std::vector<ScalarSpectralField>;

// sup_{t > 0} t^weight ||f(t)||_{L_p}.
struct WeightedNorm {
  double p = 4.0;
  double weight = 0.125;
};

inline constexpr WeightedNorm kX4{4.0, 0.125};
// Weighted class matching data in B^{-1+3/p+delta}_{p,p}: weight (1 - 3/p - delta)/2.
WeightedNorm subcritical_norm(double p, double delta);

double weighted_norm(const Trajectory& traj, const TimeGrid& grid, WeightedNorm norm);
double x4_norm(const Trajectory& traj, const TimeGrid& grid);
// Same sup applied to a difference of trajectories.
double weighted_distance(const Trajectory& a, const Trajectory& b, const TimeGrid& grid, WeightedNorm norm);

// S(t_i) u0 at every node.
Trajectory caloric_extension(const SpectralField& u0, const TimeGrid& grid);

// D(t_i) = int_0^{t_i} exp((t_i - s) Lap) f(s) ds with f linear between nodes; exact
// for such f. forcing(i) returns f(t_i).
Trajectory duhamel_forcing(const std::function<SpectralField(int)>& forcing, const TimeGrid& grid);

// -int_0^t exp((t - s) Lap) P div F(s) ds, with F = a (x) b built node by node.
Trajectory bilinear_duhamel(const Trajectory& a, const Trajectory& b, const TimeGrid& grid);

// Duhamel term of a stored tensor trajectory at node t; fails unless t is a node.
SpectralField duhamel_apply(const std::vector<TensorSpectralField>& F, const TimeGrid& grid, double t);

struct PicardIterate {
  int k = 0;
  double norm = 0.0;      // weighted norm of v^(k)
  double residual = 0.0;  // weighted distance to v^(k-1); 0 for k = 1
  double ratio = 0.0;     // residual_k / residual_{k-1}
};

struct PicardOptions {
  double tol = 1e-10;
  int max_iter = 60;
  // Gate: refuse when ||V|| >= eps3. Non-positive disables the gate.
  double eps3 = 0.0;
  WeightedNorm norm = kX4;
};

struct MildSolution {
  TimeGrid grid;
  Trajectory caloric;
  Trajectory velocity;
  double caloric_norm = 0.0;
  std::vector<PicardIterate> history;
  bool converged = false;

  // velocity - caloric at node i.
  SpectralField perturbation(int i) const { return velocity[std::size_t(i)] - caloric[std::size_t(i)]; }
};

// v1 = V, v_{k+1} = V + B(v_k, v_k). Fails with gate_refused when the gate is
// closed and with divergence when residuals grow.
MildSolution picard_solve(const SpectralField& u0, const TimeGrid& grid, const PicardOptions& options = {});

// Largest ||B(a, b)|| / (||a|| ||b||) over caloric extensions of the given fields,
// with a = b and with a != b.
double calibrate_bilinear_constant(std::span<const SpectralField> samples, const TimeGrid& grid,
                                   WeightedNorm norm = kX4);

// Kinetic energy, cumulative dissipation 2 int |grad u|^2 and the cumulative
// right side of the relevant energy relation; slack = rhs - kinetic - dissipation.
struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> kinetic;
  std::vector<double> dissipation;
  std::vector<double> rhs;
  std::vector<double> slack;

  double worst_slack() const;
};

// Energy equality of the mild perturbation u = v - V:
// |u|^2 + 2 int |grad u|^2 = 2 int (V (x) u + V (x) V) : grad u, trapezoid in time.
EnergyTrace mild_energy_trace(const MildSolution& sol);

// Worst ||u(t)||^2 / (4 t^{1/2} ||V||^4_X4) over nodes t > 0.
double mild_energy_bound_ratio(const MildSolution& sol);

// Fixed divergence-free trigonometric fields of unit L_2 norm on low shells.
std::vector<SpectralField> divergence_free_test_fields(const FrequencyGrid& grid, int count);

struct WeakFormResidual {
  double worst_relative = 0.0;  // max over test fields of |R| / (sum of |terms|)
  std::vector<double> relative;
};

// Residual of int_0^T int [v . psi eta' + v . Lap psi eta + (v (x) v) : grad psi eta] + int u0 . psi eta(0)
// with eta(t) = (1 - t/T)^2.
WeakFormResidual weak_form_residual(const Trajectory& v, const TimeGrid& grid,
                                    std::span<const SpectralField> tests);

struct TrilinearReport {
  double lhs = 0.0;          // int int |grad v| |v| |w|
  double mixed = 0.0;        // int ||w||_p^r ||v||_2^2 dt
  double dissipation = 0.0;  // int ||grad v||_2^2 dt
  // Smallest C with lhs <= C mixed + dissipation / 2.
  double required_constant() const;
};

// Requires 3/p + 2/r = 1.
TrilinearReport trilinear_check(const Trajectory& w, const Trajectory& v, const TimeGrid& grid, double p, double r);

// q = R_i R_j (v_i v_j) at every node.
ScalarTrajectory pressure_trajectory(const Trajectory& v);

}  // namespace nsbesov
