// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "nsbesov/littlewood_paley.hpp"
#include "nsbesov/spectral_core.hpp"

namespace nsbesov {

// exp(-t |k|^2); t = 0 is the identity.
template <std::size_t C>
SpectralArray<C> heat_semigroup(const SpectralArray<C>& f, double t);

// I - k k^T / |k|^2 at every nonzero mode; the mean passes through unchanged and
// draws a lint warning when nonzero. The result is tagged divergence free.
SpectralField leray_project(const SpectralField& f);

// q = R_i R_j (f_i g_j) with symbol -k_i k_j / |k|^2 on the dealiased product; zero mean.
ScalarSpectralField riesz_pressure(const SpectralField& f, const SpectralField& g);

// Largest |k . c(k)| / |c(k)| over modes with nonzero coefficients.
double divergence_defect(const SpectralField& f);

// t = 4^-x for x = x_lo, x_lo + 1/refine, ..., x_hi, in increasing t.
std::vector<double> dyadic_times(double x_lo, double x_hi, int refine = 1);

struct SemigroupCheck {
  int time_derivatives = 0;
  int space_derivatives = 0;
  double r = 4.0;
  std::vector<double> times;
  // t^{m + k/2 + (1 - 3/r)/2} ||d_t^m grad^k S(t) f||_{L_r} / ||f||_{B^{-1/4}_{4,inf}}
  std::vector<double> ratios;
  double worst_ratio = 0.0;
};

// Pointwise Frobenius magnitude over all derivative index tuples; k <= 3.
SemigroupCheck semigroup_derivative_bound_check(const SpectralField& f, int m, int k, double r,
                                                std::span<const double> times, const Partition& part);

}  // namespace nsbesov
