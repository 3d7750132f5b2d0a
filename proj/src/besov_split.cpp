// Copyright 2026 The nsbesov Authors
// SPDX-License-Identifier: Apache-2.0

#include "nsbesov/besov_split.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsbesov/fourier_calculus.hpp"

namespace nsbesov {

namespace {

double theta_between(double p, double lo, double hi) { return (1.0 / p - 1.0 / hi) / (1.0 / lo - 1.0 / hi); }

LedgerDefect identity(std::string name, double lhs, double rhs, double tol) {
  const double d = std::abs(lhs - rhs);
  return {std::move(name), d, d <= tol * std::max(1.0, std::abs(rhs))};
}

LedgerDefect below(std::string name, double lhs, double rhs) { return {std::move(name), lhs - rhs, lhs < rhs}; }

double besov_value(const SpectralField& f, double s, double p, double q, const Partition& part) {
  return besov_norm(f, s, p, q, part).value;
}

}  // namespace

ExponentLedger derive_exponents(double p) {
  require(std::isfinite(p) && p > 3.0, Reason::ledger_violation,
          "derive_exponents: need 3 < p < inf, got p = " + std::to_string(p));
  ExponentLedger e;
  e.p = p;
  e.alpha = 0.5 * (3.0 * p / (p + 1.0) + 3.0);
  e.p0 = 2.0 * p;
  e.theta_inf = theta_between(p, 2.0, e.p0);
  e.delta = e.theta_inf / (2.0 * (1.0 - e.theta_inf));

  e.p1 = 2.0 * p;
  for (int tries = 0;; ++tries) {
    e.theta_gen = theta_between(p, 2.0, e.p1);
    if (e.theta_gen > 6.0 / e.alpha - 2.0) break;
    require(tries < 20, Reason::ledger_violation, "derive_exponents: no p1 satisfies theta_gen > 6/alpha - 2");
    e.p1 *= 2.0;
  }
  e.delta1 = (1.0 - 3.0 / e.alpha + 0.5 * e.theta_gen) / (1.0 - e.theta_gen);
  e.p2 = 2.0 * std::max(e.p0, e.p1);
  e.delta2 = 0.5 * std::min(e.delta, e.delta1);
  e.beta_p = 3.0 * (p - 2.0) * (1.0 / e.alpha - 1.0 / 3.0);
  e.kappa = (p * e.beta_p + e.delta1 * e.p1 * (e.p0 - p) / (e.delta * e.p0)) / (e.p1 - p);
  e.gamma1 = e.delta2 * (e.p0 - p) / (e.delta * e.p0);
  e.gamma2 = 0.5 * (e.kappa * (p - 2.0) + e.beta_p * p);

  e.threshold_slope = (p * critical_index(p) - e.p0 * (critical_index(e.p0) + e.delta)) / (e.p0 - p);
  e.general_slope = (p * e.input_index() - e.p1 * (critical_index(e.p1) + e.delta1)) / (e.p1 - p);
  e.decay_rate = e.delta2 / (4.0 * e.gamma1);
  e.decay_beta = std::min(2.0 * e.gamma2 * e.decay_rate, 0.5);

  check_ledger(e);
  return e;
}

std::vector<LedgerDefect> ledger_defects(const ExponentLedger& e, double tol) {
  const double sp = critical_index(e.p), s0 = critical_index(e.p0), s1 = critical_index(e.p1),
               s2 = critical_index(e.p2);
  std::vector<LedgerDefect> out;
  out.push_back(below("3 < p", 3.0, e.p));
  out.push_back(below("2 < alpha", 2.0, e.alpha));
  out.push_back(below("alpha < 3", e.alpha, 3.0));
  out.push_back(below("p < alpha/(3 - alpha)", e.p, e.alpha / (3.0 - e.alpha)));
  out.push_back(below("0 < theta_inf", 0.0, e.theta_inf));
  out.push_back(below("theta_inf < 1", e.theta_inf, 1.0));
  out.push_back(identity("(1 - theta_inf)/p0 + theta_inf/2 = 1/p", (1.0 - e.theta_inf) / e.p0 + 0.5 * e.theta_inf,
                         1.0 / e.p, tol));
  out.push_back(identity("delta = theta_inf/(2(1 - theta_inf))", e.delta, e.theta_inf / (2.0 * (1.0 - e.theta_inf)), tol));
  out.push_back(identity("(s_p0 + delta)(1 - theta_inf) = s_p", (s0 + e.delta) * (1.0 - e.theta_inf), sp, tol));
  out.push_back(identity("theta_gen = (1/p - 1/p1)/(1/2 - 1/p1)", e.theta_gen, theta_between(e.p, 2.0, e.p1), tol));
  out.push_back(below("0 < theta_gen", 0.0, e.theta_gen));
  out.push_back(below("theta_gen < 1", e.theta_gen, 1.0));
  out.push_back(below("6/alpha - 2 < theta_gen", 6.0 / e.alpha - 2.0, e.theta_gen));
  out.push_back(identity("delta1 = (1 - 3/alpha + theta_gen/2)/(1 - theta_gen)", e.delta1,
                         (1.0 - 3.0 / e.alpha + 0.5 * e.theta_gen) / (1.0 - e.theta_gen), tol));
  out.push_back(below("0 < delta1", 0.0, e.delta1));
  out.push_back(identity("(1 - theta_gen)(s_p1 + delta1) = -3/alpha + 3/p", (1.0 - e.theta_gen) * (s1 + e.delta1),
                         e.input_index(), tol));
  out.push_back(identity("p2 = 2 max(p0, p1)", e.p2, 2.0 * std::max(e.p0, e.p1), tol));
  out.push_back(identity("delta2 = min(delta, delta1)/2", e.delta2, 0.5 * std::min(e.delta, e.delta1), tol));
  out.push_back(identity("beta_p = 3(p - 2)(1/alpha - 1/3)", e.beta_p, 3.0 * (e.p - 2.0) * (1.0 / e.alpha - 1.0 / 3.0), tol));
  out.push_back(identity("kappa = (p beta_p + delta1 p1 (p0 - p)/(delta p0))/(p1 - p)", e.kappa,
                         (e.p * e.beta_p + e.delta1 * e.p1 * (e.p0 - e.p) / (e.delta * e.p0)) / (e.p1 - e.p), tol));
  out.push_back(below("0 < kappa", 0.0, e.kappa));
  out.push_back(below("0 < beta_p", 0.0, e.beta_p));
  out.push_back(below("delta < -s_p0", e.delta, -s0));
  out.push_back(below("delta1 < -s_p1", e.delta1, -s1));
  out.push_back(below("delta2 < -s_p2", e.delta2, -s2));
  out.push_back(below("0 < gamma1", 0.0, e.gamma1));
  out.push_back(below("0 < gamma2", 0.0, e.gamma2));
  out.push_back(identity("(2 - p) threshold_slope = p s_p", (2.0 - e.p) * e.threshold_slope, e.p * sp, tol));
  return out;
}

void check_ledger(const ExponentLedger& ledger, double tol) {
  for (const auto& d : ledger_defects(ledger, tol)) {
    if (!d.holds) {
      std::ostringstream msg;
      msg << "exponent ledger: " << d.relation << " fails (defect " << d.defect << ")";
      fail(Reason::ledger_violation, msg.str());
    }
  }
}

double threshold_level(int j, double N, const ExponentLedger& ledger) {
  return N * std::exp2(ledger.threshold_slope * j);
}

SplitPair split_infinity(const SpectralField& g, double N, const ExponentLedger& ledger, const Partition& part) {
  require(std::isfinite(N) && N > 0.0, Reason::invalid_argument, "split_infinity: N must be positive");
  return threshold_split(g, part, [&](int j) { return threshold_level(j, N, ledger); });
}

GeneralSplitIndices second_stage_indices(const ExponentLedger& e) {
  GeneralSplitIndices idx;
  idx.p0 = e.p;
  idx.s0 = e.input_index();
  idx.p1 = e.p1;
  idx.s1 = critical_index(e.p1) + e.delta1;
  idx.p2 = 2.0;
  idx.s2 = 0.0;
  idx.theta = e.theta_gen;
  return idx;
}

void validate_indices(const GeneralSplitIndices& idx) {
  auto check = [](bool ok, const std::string& relation) {
    require(ok, Reason::invalid_argument, "split_general: index relation violated: " + relation);
  };
  const double tol = 1e-12;
  check(idx.p2 < idx.p0 && idx.p0 < idx.p1, "p2 < p0 < p1");
  check(idx.theta > 0.0 && idx.theta < 1.0, "0 < theta < 1");
  check(std::abs((1.0 - idx.theta) / idx.p1 + idx.theta / idx.p2 - 1.0 / idx.p0) <= tol,
        "1/p0 = (1 - theta)/p1 + theta/p2");
  check(std::abs((1.0 - idx.theta) * idx.s1 + idx.theta * idx.s2 - idx.s0) <= tol * std::max(1.0, std::abs(idx.s0)),
        "s0 = (1 - theta) s1 + theta s2");
  check(idx.s1 < 3.0 / idx.p1 && idx.s0 < 3.0 / idx.p0 && idx.s2 < 3.0 / idx.p2, "s_i < 3/p_i");
}

double general_level(int j, double eps, const GeneralSplitIndices& idx) {
  return eps * std::exp2((idx.p0 * idx.s0 - idx.p1 * idx.s1) * j / (idx.p1 - idx.p0));
}

SplitPair split_general(const SpectralField& g, double eps, const GeneralSplitIndices& idx, const Partition& part) {
  require(std::isfinite(eps) && eps > 0.0, Reason::invalid_argument, "split_general: eps must be positive");
  validate_indices(idx);
  return threshold_split(g, part, [&](int j) { return general_level(j, eps, idx); });
}

SplitCertificate certify_infinity_split(const SpectralField& g, const SplitPair& split, double N,
                                        const ExponentLedger& e, const Partition& part) {
  const double sp = critical_index(e.p);
  const double gp = besov_value(g, sp, e.p, kInfinity, part);
  const double gpow = std::pow(gp, e.p);
  SplitCertificate c;
  c.lower_ratio = std::pow(besov_value(split.lower, critical_index(e.p0) + e.delta, e.p0, kInfinity, part), e.p0) /
                  (std::pow(N, e.p0 - e.p) * gpow);
  c.upper_ratio = std::pow(besov_value(split.upper, 0.0, 2.0, kInfinity, part), 2.0) / (std::pow(N, 2.0 - e.p) * gpow);
  c.lower_critical = besov_value(split.lower, sp, e.p, kInfinity, part) / gp;
  c.upper_critical = besov_value(split.upper, sp, e.p, kInfinity, part) / gp;
  return c;
}

SplitCertificate certify_general_split(const SpectralField& g, const SplitPair& split, double eps,
                                       const GeneralSplitIndices& idx, const Partition& part) {
  const double gpow = std::pow(besov_value(g, idx.s0, idx.p0, idx.p0, part), idx.p0);
  const double sp = critical_index(idx.p0);
  const double gcrit = besov_value(g, sp, idx.p0, kInfinity, part);
  SplitCertificate c;
  c.lower_ratio = std::pow(besov_value(split.lower, idx.s1, idx.p1, idx.p1, part), idx.p1) /
                  (std::pow(eps, idx.p1 - idx.p0) * gpow);
  c.upper_ratio = std::pow(besov_value(split.upper, idx.s2, idx.p2, idx.p2, part), idx.p2) /
                  (std::pow(eps, idx.p2 - idx.p0) * gpow);
  c.lower_critical = besov_value(split.lower, sp, idx.p0, kInfinity, part) / gcrit;
  c.upper_critical = besov_value(split.upper, sp, idx.p0, kInfinity, part) / gcrit;
  return c;
}

SplitResult compose_split(const SpectralField& g, double N, const ExponentLedger& ledger, const Partition& part) {
  const double defect = divergence_defect(g);
  require(defect <= 1e-10, Reason::invalid_argument,
          "compose_split: input is not divergence free (defect " + std::to_string(defect) + ")");
  check_ledger(ledger);

  auto first = split_infinity(g, N, ledger, part);
  auto second = split_general(first.upper, std::pow(N, ledger.kappa), second_stage_indices(ledger), part);

  SplitResult r{leray_project(first.lower + second.lower), leray_project(second.upper), N, ledger, {}};
  const double sp = critical_index(ledger.p);
  auto& t = r.norms;
  t.N = N;
  t.data_critical = besov_value(g, sp, ledger.p, kInfinity, part);
  t.bar_subcritical = besov_value(r.bar, critical_index(ledger.p2) + ledger.delta2, ledger.p2, ledger.p2, part);
  t.tilde_l2 = l2_norm(r.tilde);
  t.bar_critical = besov_value(r.bar, sp, ledger.p, kInfinity, part);
  t.tilde_critical = besov_value(r.tilde, sp, ledger.p, kInfinity, part);

  double err = 0.0, scale = 0.0;
  const auto total = r.bar + r.tilde;
  for (std::size_t i = 0; i < g.data().size(); ++i) {
    err = std::max(err, std::abs(total.data()[i] - g.data()[i]));
    scale = std::max(scale, std::abs(g.data()[i]));
  }
  t.reconstruction_error = scale > 0.0 ? err / scale : err;
  t.bar_divergence = divergence_defect(r.bar);
  t.tilde_divergence = divergence_defect(r.tilde);
  return r;
}

SpectralField weakstar_approximants(const SpectralField& g, int k, const Partition& part) {
  require(k >= 0, Reason::invalid_argument, "weakstar_approximants: k must be non-negative");
  require_same_grid(g.grid(), part.grid(), "weakstar_approximants");
  std::vector<double> symbol(g.grid().size(), 0.0);
  for (int j = std::max(-k, part.lattice_lo()); j <= std::min(k, part.lattice_hi()); ++j) {
    const auto& b = part.block_symbol(j);
    for (std::size_t i = 0; i < symbol.size(); ++i) symbol[i] += b[i];
  }
  return leray_project(apply_radial(g, symbol));
}

}  // namespace nsbesov
