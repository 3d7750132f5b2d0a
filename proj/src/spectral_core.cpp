// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsbesov/spectral_core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace nsbesov {

namespace {

LintSink& lint_sink() {
  static LintSink sink = [](const std::string& m) { std::cerr << "nsbesov: warning: " << m << '\n'; };
  return sink;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Forward and backward in-place plans for one n. Execution through the new-array
// interface is thread safe; planning is not, hence the registry mutex.
class FftPlans {
 public:
  explicit FftPlans(int n) : n_(n) {
    std::vector<cplx> probe(std::size_t(n) * n * n);
    auto* p = reinterpret_cast<fftw_complex*>(probe.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_3d(n, n, n, p, p, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_3d(n, n, n, p, p, FFTW_BACKWARD, flags);
    if (!forward_ || !backward_) fail(Reason::invalid_argument, "FFTW planning failed");
  }
  ~FftPlans() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  void forward(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(forward_, p, p);
  }
  void backward(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(backward_, p, p);
  }

 private:
  int n_;
  fftw_plan forward_;
  fftw_plan backward_;
};

const FftPlans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<FftPlans>> registry;
  std::lock_guard lock(mutex);
  auto& slot = registry[n];
  if (!slot) slot = std::make_unique<FftPlans>(n);
  return *slot;
}

constexpr std::uint32_t kMagic = 0x4642534e;  // "NSBF"
constexpr std::uint32_t kVersion = 1;

}  // namespace

const char* reason_name(Reason r) noexcept {
  switch (r) {
    case Reason::invalid_argument: return "invalid_argument";
    case Reason::grid_mismatch: return "grid_mismatch";
    case Reason::symmetry_violation: return "symmetry_violation";
    case Reason::band_too_narrow: return "band_too_narrow";
    case Reason::ledger_violation: return "ledger_violation";
    case Reason::gate_refused: return "gate_refused";
    case Reason::divergence: return "divergence";
    case Reason::cfl_violation: return "cfl_violation";
    case Reason::energy_slack: return "energy_slack";
    case Reason::io: return "io";
  }
  return "unknown";
}

void set_lint_sink(LintSink sink) { lint_sink() = std::move(sink); }
void lint(const std::string& message) {
  if (lint_sink()) lint_sink()(message);
}

// ---------------------------------------------------------------------------
// FrequencyGrid

FrequencyGrid::FrequencyGrid(int n, double length) : n_(n), length_(length), j_min_(0), j_max_(0) {
  require(is_power_of_two(n) && n >= 4, Reason::invalid_argument,
          "grid size must be a power of two >= 4, got " + std::to_string(n));
  require(length > 0.0 && std::isfinite(length), Reason::invalid_argument, "box length must be positive");
  constexpr double slack = 1e-12;
  j_min_ = int(std::ceil(std::log2(k_min() * 4.0 / 3.0) - slack));
  j_max_ = int(std::floor(std::log2(k_resolved() * 3.0 / 8.0) + slack));
}

FrequencyGrid::FrequencyGrid(int n, double length, int j_min, int j_max) : FrequencyGrid(n, length) {
  constexpr double slack = 1e-12;
  require(j_min < j_max, Reason::band_too_narrow, "band needs j_min < j_max");
  require(std::ldexp(0.75, j_min) >= k_min() * (1.0 - slack), Reason::band_too_narrow,
          "annulus j_min = " + std::to_string(j_min) + " reaches below the smallest lattice wavenumber");
  require(std::ldexp(8.0 / 3.0, j_max) <= k_resolved() * (1.0 + slack), Reason::band_too_narrow,
          "annulus j_max = " + std::to_string(j_max) + " reaches past the dealiased cutoff");
  j_min_ = j_min;
  j_max_ = j_max;
}

std::size_t FrequencyGrid::conjugate(std::size_t f) const noexcept {
  const std::size_t n = std::size_t(n_);
  const std::size_t c = f % n, b = (f / n) % n, a = f / (n * n);
  return flat(int((n - a) % n), int((n - b) % n), int((n - c) % n));
}

std::array<double, 3> FrequencyGrid::wavevector(std::size_t f) const noexcept {
  const std::size_t n = std::size_t(n_);
  const int c = int(f % n), b = int((f / n) % n), a = int(f / (n * n));
  return {dk() * mode(a), dk() * mode(b), dk() * mode(c)};
}

int FrequencyGrid::lattice_j_lo() const noexcept {
  return int(std::floor(std::log2(k_min() * 3.0 / 8.0))) + 1;
}

int FrequencyGrid::lattice_j_hi() const noexcept {
  const double k_top = dk() * std::sqrt(3.0) * (n_ / 2);
  return int(std::ceil(std::log2(k_top * 4.0 / 3.0))) - 1;
}

void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b, const char* where) {
  if (a == b) return;
  std::ostringstream msg;
  msg << where << ": grid mismatch (n=" << a.n() << ", L=" << a.length() << " vs n=" << b.n()
      << ", L=" << b.length() << ")";
  fail(Reason::grid_mismatch, msg.str());
}

template <std::size_t C>
double PhysicalArray<C>::magnitude(std::size_t point) const noexcept {
  double s = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    const double v = data_[c * grid_.size() + point];
    s += v * v;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Transforms

template <std::size_t C>
double symmetry_defect(const SpectralArray<C>& f, std::size_t* worst_mode) {
  const auto& g = f.grid();
  // Squared magnitudes throughout; one square root at the end.
  double scale = 0.0;
  for (const auto& z : f.data()) scale = std::max(scale, std::norm(z));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  std::size_t where = 0;
  for (std::size_t c = 0; c < C; ++c) {
    auto comp = f.component(c);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double d = std::norm(comp[i] - std::conj(comp[g.conjugate(i)]));
      if (d > worst) {
        worst = d;
        where = i;
      }
    }
  }
  if (worst_mode) *worst_mode = where;
  return std::sqrt(worst / scale);
}

template <std::size_t C>
PhysicalArray<C> to_physical(const SpectralArray<C>& f) {
  std::size_t worst = 0;
  const double defect = symmetry_defect(f, &worst);
  if (defect > 1e-10) {
    const auto k = f.grid().wavevector(worst);
    std::ostringstream msg;
    msg << "coefficients are not conjugate symmetric: defect " << defect << " at k = (" << k[0] << ", "
        << k[1] << ", " << k[2] << ")";
    fail(Reason::symmetry_violation, msg.str());
  }
  const auto& g = f.grid();
  const auto& plans = plans_for(g.n());
  PhysicalArray<C> out(g);
  std::vector<cplx> buf(g.size());
  for (std::size_t c = 0; c < C; ++c) {
    auto src = f.component(c);
    std::copy(src.begin(), src.end(), buf.begin());
    plans.backward(buf.data());
    auto dst = out.component(c);
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] = buf[i].real();
  }
  return out;
}

template <std::size_t C>
SpectralArray<C> to_spectral(const PhysicalArray<C>& f) {
  const auto& g = f.grid();
  const auto& plans = plans_for(g.n());
  SpectralArray<C> out(g);
  const double scale = 1.0 / double(g.size());
  for (std::size_t c = 0; c < C; ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] = cplx(src[i], 0.0);
    plans.forward(dst.data());
    for (auto& z : dst) z *= scale;
  }
  return out;
}

template <std::size_t C>
SpectralArray<C> dealias(SpectralArray<C> f) {
  const auto& g = f.grid();
  const int K = g.dealias_cutoff();
  std::vector<char> keep(g.size());
  for_each_mode(g, [&](std::size_t i, int a, int b, int c) {
    keep[i] = std::abs(g.mode(a)) <= K && std::abs(g.mode(b)) <= K && std::abs(g.mode(c)) <= K;
  });
  for (std::size_t c = 0; c < C; ++c) {
    auto comp = f.component(c);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!keep[i]) comp[i] = 0.0;
  }
  return f;
}

TensorSpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "dealiased_product");
  const auto pf = to_physical(dealias(f));
  const auto pg = to_physical(dealias(g));
  PhysicalTensor prod(f.grid());
  const std::size_t N = f.grid().size();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      auto a = pf.component(i);
      auto b = pg.component(j);
      auto d = prod.component(3 * i + j);
      for (std::size_t x = 0; x < N; ++x) d[x] = a[x] * b[x];
    }
  }
  return dealias(to_spectral(prod));
}

TensorSpectralField dealiased_square(const SpectralField& v) {
  const auto pv = to_physical(dealias(v));
  const FrequencyGrid& grid = v.grid();
  const std::size_t N = grid.size();
  const auto& plans = plans_for(grid.n());
  TensorSpectralField out(grid);
  std::vector<cplx> buf(N);
  const double scale = 1.0 / double(N);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i; j < 3; ++j) {
      auto a = pv.component(i);
      auto b = pv.component(j);
      for (std::size_t x = 0; x < N; ++x) buf[x] = cplx(a[x] * b[x], 0.0);
      plans.forward(buf.data());
      auto d = out.component(3 * i + j);
      for (std::size_t x = 0; x < N; ++x) d[x] = buf[x] * scale;
      if (i != j) {
        auto e = out.component(3 * j + i);
        std::copy(d.begin(), d.end(), e.begin());
      }
    }
  }
  return dealias(std::move(out));
}

SpectralField apply_multiplier(const SpectralField& f, const std::function<cplx(const Wavevector&)>& m) {
  const auto& g = f.grid();
  SpectralField out(g);
  for_each_mode(g, [&](std::size_t x, int a, int b, int c) {
    const Wavevector k{g.odd_wavenumber(a), g.odd_wavenumber(b), g.odd_wavenumber(c)};
    const cplx s = m(k);
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      std::ostringstream msg;
      msg << "multiplier is not finite at k = (" << k[0] << ", " << k[1] << ", " << k[2] << ")";
      fail(Reason::invalid_argument, msg.str());
    }
    for (int i = 0; i < 3; ++i) out.component(i)[x] = s * f.component(i)[x];
  });
  return out;
}

SpectralField apply_multiplier(const SpectralField& f, const std::function<SymbolMatrix(const Wavevector&)>& m) {
  const auto& g = f.grid();
  SpectralField out(g);
  for_each_mode(g, [&](std::size_t x, int a, int b, int c) {
    const Wavevector k{g.odd_wavenumber(a), g.odd_wavenumber(b), g.odd_wavenumber(c)};
    const SymbolMatrix s = m(k);
    for (int i = 0; i < 3; ++i) {
      cplx acc = 0.0;
      for (int j = 0; j < 3; ++j) {
        if (!std::isfinite(s[i][j].real()) || !std::isfinite(s[i][j].imag())) {
          std::ostringstream msg;
          msg << "multiplier is not finite at k = (" << k[0] << ", " << k[1] << ", " << k[2] << ")";
          fail(Reason::invalid_argument, msg.str());
        }
        acc += s[i][j] * f.component(j)[x];
      }
      out.component(i)[x] = acc;
    }
  });
  return out;
}

SpectralField divergence(const TensorSpectralField& F) {
  const auto& g = F.grid();
  SpectralField out(g);
  const cplx I(0.0, 1.0);
  for_each_mode(g, [&](std::size_t x, int a, int b, int c) {
    const std::array<double, 3> k{g.odd_wavenumber(a), g.odd_wavenumber(b), g.odd_wavenumber(c)};
    for (int i = 0; i < 3; ++i) {
      cplx s = 0.0;
      for (int j = 0; j < 3; ++j) s += k[j] * F.component(3 * j + i)[x];
      out.component(i)[x] = I * s;
    }
  });
  return out;
}

ScalarSpectralField divergence(const SpectralField& v) {
  const auto& g = v.grid();
  ScalarSpectralField out(g);
  const cplx I(0.0, 1.0);
  auto o = out.component(0);
  for_each_mode(g, [&](std::size_t x, int a, int b, int c) {
    o[x] = I * (g.odd_wavenumber(a) * v.component(0)[x] + g.odd_wavenumber(b) * v.component(1)[x] +
                g.odd_wavenumber(c) * v.component(2)[x]);
  });
  return out;
}

TensorSpectralField gradient(const SpectralField& v) {
  const auto& g = v.grid();
  TensorSpectralField out(g);
  const cplx I(0.0, 1.0);
  for_each_mode(g, [&](std::size_t x, int a, int b, int c) {
    const std::array<double, 3> k{g.odd_wavenumber(a), g.odd_wavenumber(b), g.odd_wavenumber(c)};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out.component(3 * i + j)[x] = I * k[j] * v.component(i)[x];
  });
  return out;
}

SpectralField gradient(const ScalarSpectralField& q) {
  const auto& g = q.grid();
  SpectralField out(g);
  const cplx I(0.0, 1.0);
  auto s = q.component(0);
  for_each_mode(g, [&](std::size_t x, int a, int b, int c) {
    out.component(0)[x] = I * g.odd_wavenumber(a) * s[x];
    out.component(1)[x] = I * g.odd_wavenumber(b) * s[x];
    out.component(2)[x] = I * g.odd_wavenumber(c) * s[x];
  });
  return out;
}

template <std::size_t C>
double inner(const SpectralArray<C>& f, const SpectralArray<C>& g) {
  require_same_grid(f.grid(), g.grid(), "inner");
  double s = 0.0;
  auto a = f.data();
  auto b = g.data();
  for (std::size_t i = 0; i < a.size(); ++i) s += (std::conj(a[i]) * b[i]).real();
  return s * f.grid().volume();
}

template <std::size_t C>
double l2_norm(const SpectralArray<C>& f) {
  return std::sqrt(std::max(0.0, inner(f, f)));
}

double dissipation(const SpectralField& v) {
  const auto& g = v.grid();
  double s = 0.0;
  for_each_mode(g, [&](std::size_t x, int a, int b, int c) {
    const double ka = g.odd_wavenumber(a), kb = g.odd_wavenumber(b), kc = g.odd_wavenumber(c);
    const double kk = ka * ka + kb * kb + kc * kc;
    for (int i = 0; i < 3; ++i) s += kk * std::norm(v.component(i)[x]);
  });
  return s * g.volume();
}

double contract_gradient(const TensorSpectralField& A, const SpectralField& u) {
  require_same_grid(A.grid(), u.grid(), "contract_gradient");
  const auto& g = u.grid();
  const cplx I(0.0, 1.0);
  double s = 0.0;
  for_each_mode(g, [&](std::size_t x, int a, int b, int c) {
    const std::array<double, 3> k{g.odd_wavenumber(a), g.odd_wavenumber(b), g.odd_wavenumber(c)};
    for (int i = 0; i < 3; ++i) {
      const cplx du = u.component(i)[x];
      for (int j = 0; j < 3; ++j) s += (std::conj(A.component(3 * i + j)[x]) * (I * k[j] * du)).real();
    }
  });
  return s * g.volume();
}

// ---------------------------------------------------------------------------
// Serialization

template <std::size_t C>
void write_field(std::ostream& out, const SpectralArray<C>& f) {
  const auto& g = f.grid();
  const std::uint32_t header[4] = {kMagic, kVersion, std::uint32_t(C), std::uint32_t(g.n())};
  const std::int32_t band[2] = {g.j_min(), g.j_max()};
  const double length = g.length();
  const std::uint8_t div_free = f.divergence_free() ? 1 : 0;
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(&length), sizeof length);
  out.write(reinterpret_cast<const char*>(band), sizeof band);
  out.write(reinterpret_cast<const char*>(&div_free), sizeof div_free);
  out.write(reinterpret_cast<const char*>(f.data().data()), std::streamsize(f.data().size_bytes()));
  if (!out) fail(Reason::io, "field write failed");
}

template <std::size_t C>
SpectralArray<C> read_field(std::istream& in) {
  std::uint32_t header[4];
  std::int32_t band[2];
  double length = 0.0;
  std::uint8_t div_free = 0;
  in.read(reinterpret_cast<char*>(header), sizeof header);
  in.read(reinterpret_cast<char*>(&length), sizeof length);
  in.read(reinterpret_cast<char*>(band), sizeof band);
  in.read(reinterpret_cast<char*>(&div_free), sizeof div_free);
  if (!in || header[0] != kMagic) fail(Reason::io, "not a field dump");
  if (header[1] != kVersion) fail(Reason::io, "unsupported field dump version " + std::to_string(header[1]));
  if (header[2] != C)
    fail(Reason::io, "field dump has " + std::to_string(header[2]) + " components, expected " + std::to_string(C));
  FrequencyGrid grid(int(header[3]), length);
  if (grid.j_min() != band[0] || grid.j_max() != band[1]) grid = FrequencyGrid(int(header[3]), length, band[0], band[1]);
  SpectralArray<C> f(grid);
  in.read(reinterpret_cast<char*>(f.data().data()), std::streamsize(f.data().size_bytes()));
  if (!in) fail(Reason::io, "truncated field dump");
  f.mark_divergence_free(div_free != 0);
  return f;
}

template <std::size_t C>
void save_field(const std::string& path, const SpectralArray<C>& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Reason::io, "cannot open " + path + " for writing");
  write_field(out, f);
}

template <std::size_t C>
SpectralArray<C> load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Reason::io, "cannot open " + path);
  return read_field<C>(in);
}

#define NSBESOV_INSTANTIATE(C)                                                   \
  template class PhysicalArray<C>;                                               \
  template double symmetry_defect(const SpectralArray<C>&, std::size_t*);        \
  template PhysicalArray<C> to_physical(const SpectralArray<C>&);                \
  template SpectralArray<C> to_spectral(const PhysicalArray<C>&);                \
  template SpectralArray<C> dealias(SpectralArray<C>);                           \
  template double inner(const SpectralArray<C>&, const SpectralArray<C>&);       \
  template double l2_norm(const SpectralArray<C>&);                              \
  template void write_field(std::ostream&, const SpectralArray<C>&);             \
  template SpectralArray<C> read_field<C>(std::istream&);                        \
  template void save_field(const std::string&, const SpectralArray<C>&);         \
  template SpectralArray<C> load_field<C>(const std::string&);

NSBESOV_INSTANTIATE(1)
NSBESOV_INSTANTIATE(3)
NSBESOV_INSTANTIATE(9)

#undef NSBESOV_INSTANTIATE

}  // namespace nsbesov
