// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsbesov/mild_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsbesov/fourier_calculus.hpp"
#include "nsbesov/littlewood_paley.hpp"

namespace nsbesov {

namespace {

// phi1(z) = (1 - e^-z)/z and phi2(z) = (z - 1 + e^-z)/z^2; series near 0 where
// the closed forms cancel.
void etd_weights(double z, double& phi1, double& phi2) {
  if (z < 0.1) {
    double term1 = 1.0, term2 = 0.5;
    phi1 = 0.0;
    phi2 = 0.0;
    for (int k = 0; k < 12; ++k) {
      phi1 += term1;
      phi2 += term2;
      term1 *= -z / double(k + 2);
      term2 *= -z / double(k + 3);
    }
    return;
  }
  const double em = std::expm1(-z);
  phi1 = -em / z;
  phi2 = (z + em) / (z * z);
}

std::vector<double> squared_wavenumbers(const FrequencyGrid& g) {
  std::vector<double> lam(g.size());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const auto k = g.wavevector(i);
    lam[i] = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  }
  return lam;
}

double trapezoid(std::span<const double> t, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return s;
}

void require_trajectory(const Trajectory& traj, const TimeGrid& grid, const char* where) {
  require(!traj.empty() && traj.size() == grid.nodes().size(), Reason::invalid_argument,
          std::string(where) + ": trajectory does not match the time grid");
}

SpectralField projected_divergence(const TensorSpectralField& F) {
  auto f = leray_project(divergence(F));
  f *= -1.0;
  return f;
}

SpectralField laplacian(const SpectralField& f) {
  const auto lam = squared_wavenumbers(f.grid());
  SpectralField out(f.grid());
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < lam.size(); ++i) out.component(c)[i] = -lam[i] * f.component(c)[i];
  return out;
}

}  // namespace

TimeGrid TimeGrid::graded(double T, int n) {
  require(T > 0.0 && std::isfinite(T) && n >= 1, Reason::invalid_argument, "graded time grid needs T > 0, n >= 1");
  std::vector<double> t(std::size_t(n) + 1);
  for (int i = 0; i <= n; ++i) t[std::size_t(i)] = T * double(i) * double(i) / (double(n) * double(n));
  t.back() = T;
  return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::uniform(double T, int n) {
  require(T > 0.0 && std::isfinite(T) && n >= 1, Reason::invalid_argument, "uniform time grid needs T > 0, n >= 1");
  std::vector<double> t(std::size_t(n) + 1);
  for (int i = 0; i <= n; ++i) t[std::size_t(i)] = T * double(i) / double(n);
  t.back() = T;
  return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
  require(nodes.size() >= 2 && nodes.front() == 0.0, Reason::invalid_argument,
          "time grid must start at 0 and have at least one step");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    require(nodes[i] > nodes[i - 1] && std::isfinite(nodes[i]), Reason::invalid_argument,
            "time grid nodes must increase strictly");
  return TimeGrid(std::move(nodes));
}

int TimeGrid::index_of(double t) const {
  const auto it = std::find(nodes_.begin(), nodes_.end(), t);
  if (it == nodes_.end()) {
    std::ostringstream msg;
    msg << "t = " << t << " is not a node of the time grid";
    fail(Reason::invalid_argument, msg.str());
  }
  return int(it - nodes_.begin());
}

WeightedNorm subcritical_norm(double p, double delta) { return {p, 0.5 * (1.0 - 3.0 / p - delta)}; }

double weighted_norm(const Trajectory& traj, const TimeGrid& grid, WeightedNorm norm) {
  require_trajectory(traj, grid, "weighted_norm");
  double top = 0.0;
  for (int i = 1; i <= grid.steps(); ++i)
    top = std::max(top, std::pow(grid.at(i), norm.weight) * lp_norm(to_physical(traj[std::size_t(i)]), norm.p));
  return top;
}

double x4_norm(const Trajectory& traj, const TimeGrid& grid) { return weighted_norm(traj, grid, kX4); }

double weighted_distance(const Trajectory& a, const Trajectory& b, const TimeGrid& grid, WeightedNorm norm) {
  require_trajectory(a, grid, "weighted_distance");
  require_trajectory(b, grid, "weighted_distance");
  double top = 0.0;
  for (int i = 1; i <= grid.steps(); ++i) {
    const auto d = a[std::size_t(i)] - b[std::size_t(i)];
    top = std::max(top, std::pow(grid.at(i), norm.weight) * lp_norm(to_physical(d), norm.p));
  }
  return top;
}

Trajectory caloric_extension(const SpectralField& u0, const TimeGrid& grid) {
  Trajectory out;
  out.reserve(grid.nodes().size());
  for (double t : grid.nodes()) out.push_back(heat_semigroup(u0, t));
  return out;
}

Trajectory duhamel_forcing(const std::function<SpectralField(int)>& forcing, const TimeGrid& grid) {
  auto prev = forcing(0);
  const auto& fg = prev.grid();
  const auto lam = squared_wavenumbers(fg);
  Trajectory out;
  out.reserve(grid.nodes().size());
  out.emplace_back(fg);
  out.back().mark_divergence_free(prev.divergence_free());
  for (int m = 0; m < grid.steps(); ++m) {
    auto next = forcing(m + 1);
    require_same_grid(next.grid(), fg, "duhamel_forcing");
    const double tau = grid.at(m + 1) - grid.at(m);
    SpectralField d(fg);
    const auto& last = out.back();
    for (std::size_t i = 0; i < lam.size(); ++i) {
      const double z = lam[i] * tau;
      double phi1, phi2;
      etd_weights(z, phi1, phi2);
      const double decay = std::exp(-z), wn = tau * phi2, wp = tau * (phi1 - phi2);
      for (int c = 0; c < 3; ++c)
        d.component(c)[i] = decay * last.component(c)[i] + wn * next.component(c)[i] + wp * prev.component(c)[i];
    }
    d.mark_divergence_free(last.divergence_free() && next.divergence_free());
    out.push_back(std::move(d));
    prev = std::move(next);
  }
  return out;
}

Trajectory bilinear_duhamel(const Trajectory& a, const Trajectory& b, const TimeGrid& grid) {
  require_trajectory(a, grid, "bilinear_duhamel");
  require_trajectory(b, grid, "bilinear_duhamel");
  const bool square = &a == &b;
  return duhamel_forcing(
      [&](int i) {
        const auto& x = a[std::size_t(i)];
        return projected_divergence(square ? dealiased_square(x) : dealiased_product(x, b[std::size_t(i)]));
      },
      grid);
}

SpectralField duhamel_apply(const std::vector<TensorSpectralField>& F, const TimeGrid& grid, double t) {
  require(F.size() == grid.nodes().size(), Reason::invalid_argument, "duhamel_apply: tensor trajectory does not match grid");
  const int target = grid.index_of(t);
  const auto sub = TimeGrid::from_nodes({grid.nodes().begin(), grid.nodes().begin() + target + 1});
  if (target == 0) {
    SpectralField zero(F[0].grid());
    zero.mark_divergence_free(true);
    return zero;
  }
  return duhamel_forcing([&](int i) { return projected_divergence(F[std::size_t(i)]); }, sub).back();
}

MildSolution picard_solve(const SpectralField& u0, const TimeGrid& grid, const PicardOptions& options) {
  const double defect = divergence_defect(u0);
  require(defect <= 1e-10, Reason::invalid_argument,
          "picard_solve: data is not divergence free (defect " + std::to_string(defect) + ")");
  MildSolution sol{grid, caloric_extension(u0, grid), {}, 0.0, {}, false};
  sol.caloric_norm = weighted_norm(sol.caloric, grid, options.norm);
  if (options.eps3 > 0.0 && sol.caloric_norm >= options.eps3) {
    std::ostringstream msg;
    msg << "smallness gate refused: ||V|| = " << sol.caloric_norm << " >= eps3 = " << options.eps3;
    fail(Reason::gate_refused, msg.str());
  }
  sol.velocity = sol.caloric;
  sol.history.push_back({1, sol.caloric_norm, 0.0, 0.0});
  if (sol.caloric_norm == 0.0) {
    sol.converged = true;
    return sol;
  }
  int growing = 0;
  for (int k = 2; k <= options.max_iter; ++k) {
    auto next = bilinear_duhamel(sol.velocity, sol.velocity, grid);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += sol.caloric[i];
    const double residual = weighted_distance(next, sol.velocity, grid, options.norm);
    const double prev = sol.history.back().residual;
    const double ratio = prev > 0.0 ? residual / prev : 0.0;
    sol.velocity = std::move(next);
    sol.history.push_back({k, weighted_norm(sol.velocity, grid, options.norm), residual, ratio});
    growing = (prev > 0.0 && ratio > 1.0) ? growing + 1 : 0;
    if (!std::isfinite(residual) || residual > 1e3 * sol.caloric_norm || growing >= 3) {
      std::ostringstream msg;
      msg << "picard iteration diverges; residual history:";
      for (const auto& h : sol.history) msg << ' ' << h.residual;
      fail(Reason::divergence, msg.str());
    }
    if (residual <= options.tol * sol.caloric_norm) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

double calibrate_bilinear_constant(std::span<const SpectralField> samples, const TimeGrid& grid, WeightedNorm norm) {
  require(!samples.empty(), Reason::invalid_argument, "calibrate_bilinear_constant: no samples");
  std::vector<Trajectory> cal;
  std::vector<double> size;
  for (const auto& f : samples) {
    cal.push_back(caloric_extension(f, grid));
    size.push_back(weighted_norm(cal.back(), grid, norm));
    require(size.back() > 0.0, Reason::invalid_argument, "calibrate_bilinear_constant: zero sample");
  }
  double c = 0.0;
  for (std::size_t i = 0; i < cal.size(); ++i) {
    const auto self = bilinear_duhamel(cal[i], cal[i], grid);
    c = std::max(c, weighted_norm(self, grid, norm) / (size[i] * size[i]));
    if (i + 1 < cal.size()) {
      const auto cross = bilinear_duhamel(cal[i], cal[i + 1], grid);
      c = std::max(c, weighted_norm(cross, grid, norm) / (size[i] * size[i + 1]));
    }
  }
  return c;
}

double EnergyTrace::worst_slack() const {
  return slack.empty() ? 0.0 : *std::min_element(slack.begin(), slack.end());
}

EnergyTrace mild_energy_trace(const MildSolution& sol) {
  const auto t = sol.grid.nodes();
  EnergyTrace tr;
  tr.times.assign(t.begin(), t.end());
  std::vector<double> diss_rate, rhs_rate;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto u = sol.perturbation(int(i));
    const auto& V = sol.caloric[i];
    tr.kinetic.push_back(inner(u, u));
    diss_rate.push_back(2.0 * dissipation(u));
    rhs_rate.push_back(2.0 * contract_gradient(dealiased_product(V, u) + dealiased_square(V), u));
  }
  tr.dissipation.push_back(0.0);
  tr.rhs.push_back(0.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double dt = 0.5 * (t[i] - t[i - 1]);
    tr.dissipation.push_back(tr.dissipation.back() + dt * (diss_rate[i] + diss_rate[i - 1]));
    tr.rhs.push_back(tr.rhs.back() + dt * (rhs_rate[i] + rhs_rate[i - 1]));
  }
  for (std::size_t i = 0; i < t.size(); ++i) tr.slack.push_back(tr.rhs[i] - tr.kinetic[i] - tr.dissipation[i]);
  return tr;
}

double mild_energy_bound_ratio(const MildSolution& sol) {
  const double x4 = x4_norm(sol.caloric, sol.grid);
  if (x4 == 0.0) return 0.0;
  double worst = 0.0;
  for (int i = 1; i <= sol.grid.steps(); ++i) {
    const auto u = sol.perturbation(i);
    worst = std::max(worst, inner(u, u) / (4.0 * std::sqrt(sol.grid.at(i)) * std::pow(x4, 4.0)));
  }
  return worst;
}

std::vector<SpectralField> divergence_free_test_fields(const FrequencyGrid& grid, int count) {
  static constexpr int shells[][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1},
                                      {1, -1, 0}, {1, 1, 1}, {2, 0, 1}, {1, 2, -1}, {0, 2, 1}, {2, 1, 1}};
  require(count >= 1 && count <= int(std::size(shells)), Reason::invalid_argument,
          "divergence_free_test_fields: count out of range");
  require(grid.n() >= 6, Reason::invalid_argument, "divergence_free_test_fields: grid too coarse");
  const int n = grid.n();
  auto wrap = [n](int m) { return m < 0 ? m + n : m; };
  std::vector<SpectralField> out;
  for (int s = 0; s < count; ++s) {
    const auto& m = shells[s];
    const std::array<double, 3> k{double(m[0]), double(m[1]), double(m[2])};
    const std::array<double, 3> a{0.3 + 0.1 * s, -0.7, 0.5 - 0.05 * s};
    // Polarisation k x a is orthogonal to k.
    const std::array<double, 3> e{k[1] * a[2] - k[2] * a[1], k[2] * a[0] - k[0] * a[2], k[0] * a[1] - k[1] * a[0]};
    SpectralField f(grid);
    const auto i = grid.flat(wrap(m[0]), wrap(m[1]), wrap(m[2]));
    const auto ci = grid.conjugate(i);
    const cplx phase(std::cos(0.7 * s), std::sin(0.7 * s));
    for (int c = 0; c < 3; ++c) {
      f.component(c)[i] = e[c] * phase;
      f.component(c)[ci] = e[c] * std::conj(phase);
    }
    f *= 1.0 / l2_norm(f);
    f.mark_divergence_free(true);
    out.push_back(std::move(f));
  }
  return out;
}

WeakFormResidual weak_form_residual(const Trajectory& v, const TimeGrid& grid, std::span<const SpectralField> tests) {
  require_trajectory(v, grid, "weak_form_residual");
  const auto t = grid.nodes();
  const double T = grid.horizon();
  std::vector<TensorSpectralField> squares;
  squares.reserve(v.size());
  for (const auto& f : v) squares.push_back(dealiased_square(f));
  WeakFormResidual out;
  for (const auto& psi : tests) {
    const auto lap = laplacian(psi);
    std::vector<double> total(t.size()), scale_a(t.size()), scale_b(t.size()), scale_c(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double s = 1.0 - t[i] / T;
      const double eta = s * s, deta = -2.0 * s / T;
      const double a = deta * inner(v[i], psi), b = eta * inner(v[i], lap),
                   c = eta * contract_gradient(squares[i], psi);
      total[i] = a + b + c;
      scale_a[i] = std::abs(a);
      scale_b[i] = std::abs(b);
      scale_c[i] = std::abs(c);
    }
    const double initial = inner(v[0], psi);
    const double R = trapezoid(t, total) + initial;
    const double S = trapezoid(t, scale_a) + trapezoid(t, scale_b) + trapezoid(t, scale_c) + std::abs(initial);
    out.relative.push_back(S > 0.0 ? std::abs(R) / S : 0.0);
  }
  out.worst_relative = out.relative.empty() ? 0.0 : *std::max_element(out.relative.begin(), out.relative.end());
  return out;
}

double TrilinearReport::required_constant() const {
  const double excess = lhs - 0.5 * dissipation;
  if (excess <= 0.0) return 0.0;
  return mixed > 0.0 ? excess / mixed : kInfinity;
}

TrilinearReport trilinear_check(const Trajectory& w, const Trajectory& v, const TimeGrid& grid, double p, double r) {
  require(p > 3.0 && r >= 2.0 && std::abs(3.0 / p + 2.0 / r - 1.0) <= 1e-12, Reason::invalid_argument,
          "trilinear_check: need 3/p + 2/r = 1");
  require_trajectory(w, grid, "trilinear_check");
  require_trajectory(v, grid, "trilinear_check");
  const auto t = grid.nodes();
  std::vector<double> lhs(t.size()), mixed(t.size()), diss(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto pw = to_physical(w[i]);
    const auto pv = to_physical(v[i]);
    const auto pg = to_physical(gradient(v[i]));
    double s = 0.0;
    for (std::size_t x = 0; x < pw.grid().size(); ++x) s += pg.magnitude(x) * pv.magnitude(x) * pw.magnitude(x);
    lhs[i] = s * pw.grid().cell_volume();
    const double v2 = inner(v[i], v[i]);
    mixed[i] = v2 == 0.0 ? 0.0 : std::pow(lp_norm(pw, p), r) * v2;
    diss[i] = dissipation(v[i]);
  }
  return {trapezoid(t, lhs), trapezoid(t, mixed), trapezoid(t, diss)};
}

ScalarTrajectory pressure_trajectory(const Trajectory& v) {
  ScalarTrajectory out;
  out.reserve(v.size());
  for (const auto& f : v) out.push_back(riesz_pressure(f, f));
  return out;
}

}  // namespace nsbesov
