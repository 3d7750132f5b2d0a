// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "nsbesov/errors.hpp"

namespace nsbesov {

using cplx = std::complex<double>;

// Periodic cube [0, L)^3 sampled on n^3 points. Lattice wavenumbers are
// (2*pi/L) * m with m in [-n/2, n/2). The resolved dyadic band [j_min, j_max]
// holds the annuli that lie entirely inside the dealiased frequency ball.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(int n, double length = 2.0 * std::numbers::pi);
  FrequencyGrid(int n, double length, int j_min, int j_max);

  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  int j_min() const noexcept { return j_min_; }
  int j_max() const noexcept { return j_max_; }
  bool has_band() const noexcept { return j_min_ < j_max_; }

  std::size_t size() const noexcept { return std::size_t(n_) * n_ * n_; }
  double dk() const noexcept { return 2.0 * std::numbers::pi / length_; }
  double volume() const noexcept { return length_ * length_ * length_; }
  double cell_volume() const noexcept { return volume() / double(size()); }

  // Largest |m| per axis kept by the 2/3 rule; products of kept modes never alias
  // back onto kept modes.
  int dealias_cutoff() const noexcept { return (n_ - 1) / 3; }
  double k_min() const noexcept { return dk(); }
  double k_resolved() const noexcept { return dk() * n_ / 3.0; }

  int mode(int index) const noexcept { return index < n_ / 2 ? index : index - n_; }
  // Odd-symbol wavenumber: zero on the Nyquist plane so odd multipliers keep
  // real fields real.
  double odd_wavenumber(int index) const noexcept {
    return index == n_ / 2 ? 0.0 : dk() * mode(index);
  }
  std::size_t flat(int i0, int i1, int i2) const noexcept {
    return (std::size_t(i0) * n_ + i1) * n_ + i2;
  }
  std::size_t conjugate(std::size_t flat_index) const noexcept;
  std::array<double, 3> wavevector(std::size_t flat_index) const noexcept;

  // Lowest and highest j for which some lattice mode meets supp phi(2^-j .).
  int lattice_j_lo() const noexcept;
  int lattice_j_hi() const noexcept;

  friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) noexcept {
    return a.n_ == b.n_ && a.length_ == b.length_ && a.j_min_ == b.j_min_ && a.j_max_ == b.j_max_;
  }

 private:
  int n_;
  double length_;
  int j_min_;
  int j_max_;
};

void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b, const char* where);

// Visits every mode in storage order as f(flat, i0, i1, i2).
template <class F>
void for_each_mode(const FrequencyGrid& g, F&& f) {
  const int n = g.n();
  std::size_t idx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c, ++idx) f(idx, a, b, c);
}

// Fourier coefficients of a C-component real field, component-major, FFTW order.
// f(x) = sum_m c(m) exp(i k.x); the zero mode is the spatial mean.
template <std::size_t C>
class SpectralArray {
 public:
  static constexpr std::size_t components = C;

  explicit SpectralArray(FrequencyGrid grid)
      : grid_(std::move(grid)), data_(C * grid_.size(), cplx{0.0, 0.0}) {}

  const FrequencyGrid& grid() const noexcept { return grid_; }
  std::span<cplx> component(std::size_t c) noexcept {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }
  std::span<const cplx> component(std::size_t c) const noexcept {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }
  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  bool divergence_free() const noexcept { return divergence_free_; }
  void mark_divergence_free(bool flag) noexcept { divergence_free_ = flag; }

  SpectralArray& operator+=(const SpectralArray& o) {
    require_same_grid(grid_, o.grid_, "field addition");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    divergence_free_ = divergence_free_ && o.divergence_free_;
    return *this;
  }
  SpectralArray& operator-=(const SpectralArray& o) {
    require_same_grid(grid_, o.grid_, "field subtraction");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    divergence_free_ = divergence_free_ && o.divergence_free_;
    return *this;
  }
  SpectralArray& operator*=(double a) noexcept {
    for (auto& z : data_) z *= a;
    return *this;
  }
  // this += a * o
  SpectralArray& axpy(double a, const SpectralArray& o) {
    require_same_grid(grid_, o.grid_, "field axpy");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * o.data_[i];
    divergence_free_ = divergence_free_ && o.divergence_free_;
    return *this;
  }

  friend SpectralArray operator+(SpectralArray a, const SpectralArray& b) { return a += b; }
  friend SpectralArray operator-(SpectralArray a, const SpectralArray& b) { return a -= b; }
  friend SpectralArray operator*(double s, SpectralArray a) { return a *= s; }

 private:
  FrequencyGrid grid_;
  std::vector<cplx> data_;
  bool divergence_free_ = false;
};

using ScalarSpectralField = SpectralArray<1>;
using SpectralField = SpectralArray<3>;
// Rank-2 tensor, component (i, j) stored at 3 * i + j.
using TensorSpectralField = SpectralArray<9>;

// Point samples x = (L / n) * index, component-major.
template <std::size_t C>
class PhysicalArray {
 public:
  static constexpr std::size_t components = C;

  explicit PhysicalArray(FrequencyGrid grid) : grid_(std::move(grid)), data_(C * grid_.size(), 0.0) {}

  const FrequencyGrid& grid() const noexcept { return grid_; }
  std::span<double> component(std::size_t c) noexcept {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }
  std::span<const double> component(std::size_t c) const noexcept {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  // Euclidean magnitude across components at one sample.
  double magnitude(std::size_t point) const noexcept;

 private:
  FrequencyGrid grid_;
  std::vector<double> data_;
};

using PhysicalScalar = PhysicalArray<1>;
using PhysicalVector = PhysicalArray<3>;
using PhysicalTensor = PhysicalArray<9>;

// Largest violation of c(-m) = conj(c(m)) relative to the largest coefficient.
template <std::size_t C>
double symmetry_defect(const SpectralArray<C>& f, std::size_t* worst_mode = nullptr);

// Throws symmetry_violation naming the worst mode when the defect exceeds 1e-10.
template <std::size_t C>
PhysicalArray<C> to_physical(const SpectralArray<C>& f);

template <std::size_t C>
SpectralArray<C> to_spectral(const PhysicalArray<C>& f);

using Wavevector = std::array<double, 3>;
using SymbolMatrix = std::array<std::array<cplx, 3>, 3>;

// c_out(k) = m(k) c_in(k). Multipliers see the odd wavenumber, so m(-k) = conj(m(k))
// keeps real fields real. A non-finite value fails naming the offending k.
SpectralField apply_multiplier(const SpectralField& f, const std::function<cplx(const Wavevector&)>& m);
SpectralField apply_multiplier(const SpectralField& f, const std::function<SymbolMatrix(const Wavevector&)>& m);

// Zero every mode with some |m_a| above the dealias cutoff.
template <std::size_t C>
SpectralArray<C> dealias(SpectralArray<C> f);

// Pointwise tensor product f_i g_j with 2/3-rule truncation of inputs and output.
TensorSpectralField dealiased_product(const SpectralField& f, const SpectralField& g);
// Symmetric product v_i v_j; cheaper than dealiased_product(v, v).
TensorSpectralField dealiased_square(const SpectralField& v);

// (div F)_i = d_j F_ji.
SpectralField divergence(const TensorSpectralField& F);
ScalarSpectralField divergence(const SpectralField& v);
// G_ij = d_j v_i.
TensorSpectralField gradient(const SpectralField& v);
SpectralField gradient(const ScalarSpectralField& q);

// Integrals over the box, evaluated on coefficients (Parseval).
template <std::size_t C>
double inner(const SpectralArray<C>& f, const SpectralArray<C>& g);
template <std::size_t C>
double l2_norm(const SpectralArray<C>& f);
// int |grad v|^2.
double dissipation(const SpectralField& v);
// int A_ij d_j u_i.
double contract_gradient(const TensorSpectralField& A, const SpectralField& u);

// Binary dump: magic, version, header, then component-major coefficients.
template <std::size_t C>
void write_field(std::ostream& out, const SpectralArray<C>& f);
template <std::size_t C>
SpectralArray<C> read_field(std::istream& in);
template <std::size_t C>
void save_field(const std::string& path, const SpectralArray<C>& f);
template <std::size_t C>
SpectralArray<C> load_field(const std::string& path);

}  // namespace nsbesov
