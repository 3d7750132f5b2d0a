// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <string>
#include <vector>

#include "nsbesov/spectral_core.hpp"

namespace nsbesov {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Smooth bump supported on the open annulus 3/4 < r < 8/3.
double annulus_bump(double r) noexcept;
// phi(r) = bump(r) / sum_m bump(2^-m r); sum_j phi(2^-j r) = 1 for r > 0.
double partition_profile(double r) noexcept;
// chi(r) = 1 - sum_{j >= 0} phi(2^-j r); equals 1 near 0, vanishes for r >= 4/3.
double low_profile(double r) noexcept;

// ||F^{-1} phi||_{L_1(R^3)} by radial quadrature; bounds every block operator on L_p.
double profile_l1_norm();

// Radial symbols of the homogeneous dyadic blocks on one grid.
class Partition {
 public:
  explicit Partition(FrequencyGrid grid);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  int j_min() const noexcept { return grid_.j_min(); }
  int j_max() const noexcept { return grid_.j_max(); }
  // Blocks that touch at least one lattice mode.
  int lattice_lo() const noexcept { return grid_.lattice_j_lo(); }
  int lattice_hi() const noexcept { return grid_.lattice_j_hi(); }

  double radius(std::size_t mode) const noexcept { return radius_[mode]; }
  // Cached; identically zero outside [lattice_lo, lattice_hi].
  const std::vector<double>& block_symbol(int j) const;
  // sum over |m - j| <= 1 of the block symbols.
  std::vector<double> neighbourhood_symbol(int j) const;
  std::vector<double> low_symbol(int j) const;

 private:
  FrequencyGrid grid_;
  std::vector<double> radius_;
  std::vector<std::vector<double>> blocks_;
  std::vector<double> zero_;
};

// Fails with band_too_narrow when the grid cannot hold two full annuli.
Partition build_partition(const FrequencyGrid& grid);

template <std::size_t C>
SpectralArray<C> apply_radial(const SpectralArray<C>& f, const std::vector<double>& symbol);

template <std::size_t C>
SpectralArray<C> dyadic_block(const SpectralArray<C>& f, int j, const Partition& part);
// S_j f = chi(2^-j D) f.
template <std::size_t C>
SpectralArray<C> low_pass(const SpectralArray<C>& f, int j, const Partition& part);

// (int |f|^p dx)^(1/p) with the trapezoid rule on grid points; p = inf is the max.
template <std::size_t C>
double lp_norm(const PhysicalArray<C>& f, double p);

// ||Delta_j f||_{L_p} for every lattice block j.
struct BlockNorms {
  int j_lo = 0;
  double p = 2.0;
  std::vector<double> values;

  double at(int j) const { return values.at(std::size_t(j - j_lo)); }
  int j_hi() const { return j_lo + int(values.size()) - 1; }
};

template <std::size_t C>
BlockNorms block_lp_norms(const SpectralArray<C>& f, double p, const Partition& part);

struct NormReport {
  std::string field_id;
  double s = 0.0;
  double p = 0.0;
  double q = 0.0;
  double value = 0.0;
  // Same aggregate over lattice blocks outside the resolved band.
  double tail_bound = 0.0;
  std::string method;
};

// (sum_{j in band} 2^{jsq} ||Delta_j f||_p^q)^(1/q) from precomputed blocks.
NormReport besov_from_blocks(const BlockNorms& blocks, double s, double q, const Partition& part);

template <std::size_t C>
NormReport besov_norm(const SpectralArray<C>& f, double s, double p, double q, const Partition& part);

// || t^{-s/2} ||S(t) f||_{L_p} ||_{L_q(dt/t)} on t = 4^-x, x stepping the resolved
// band with `refine` samples per unit; requires s < 0.
template <std::size_t C>
NormReport besov_norm_heat(const SpectralArray<C>& f, double s, double p, double q, const Partition& part,
                           int refine = 1);

struct InterpolationCheck {
  double lhs = 0.0;
  // Right side without the calibrated constant.
  double rhs = 0.0;
  double ratio = 0.0;
  bool violated = false;
};

// ||f||_{B^{theta s1 + (1-theta) s2}_{p,1}} against
// C (1/theta + 1/(1-theta)) / (s2 - s1) ||f||^theta_{B^{s1}_{p,inf}} ||f||^{1-theta}_{B^{s2}_{p,inf}}.
template <std::size_t C>
InterpolationCheck interpolation_check(const SpectralArray<C>& f, double s1, double s2, double theta, double p,
                                       const Partition& part, double constant);

}  // namespace nsbesov
