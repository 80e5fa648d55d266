#include "d2gan/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "d2gan/errors.hpp"
#include "d2gan/optimize1d.hpp"
#include "d2gan/rng.hpp"

namespace d2gan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_order(double alpha1, double alpha2) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw DomainError("alpha values must be positive");
  if (!(alpha2 > alpha1)) {
    throw ConstraintViolation("optimal discriminators need alpha2 > alpha1 (got alpha1=" + std::to_string(alpha1) +
                              ", alpha2=" + std::to_string(alpha2) + ")");
  }
}

// (num/den)^k with the zero-denominator case surfaced as +inf.
double ratio_power(double num, double den, double k) {
  if (den == 0.0) return num == 0.0 ? std::numeric_limits<double>::quiet_NaN() : kInf;
  return std::pow(num / den, k);
}

}  // namespace

void GanTheorySetting::validate() const {
  if (pd.size() != pg.size()) throw ShapeError("Pd and Pg must share a support");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw DomainError("c1 and c2 must be positive");
}

DiscriminatorPair optimal_discriminators(const GanTheorySetting& s, double alpha1, double alpha2) {
  s.validate();
  require_order(alpha1, alpha2);
  const double k = alpha1 * alpha2 / (alpha2 - alpha1);
  DiscriminatorPair out;
  out.d1.values.resize(s.pd.size());
  out.d2.values.resize(s.pd.size());
  for (std::size_t i = 0; i < s.pd.size(); ++i) {
    out.d1.values[i] = ratio_power(s.c1 * s.pd[i], s.pg[i], k);
    out.d2.values[i] = ratio_power(s.c2 * s.pg[i], s.pd[i], k);
  }
  return out;
}

PointwiseOptimum pointwise_bruteforce_opt(double a, double b, const LossPair& pair) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("pointwise weights must be positive");
  auto h = [&](double t) { return a * (-pair.l1(t)) + b * (pair.l2(t) - 1.0); };
  const ScalarMax m = maximize_log_grid(h, {.lo = 1e-6, .hi = 1e6, .points = 2001, .tol = 1e-10});
  return {m.arg, m.value};
}

double value_function(const GanTheorySetting& s, const DiscriminatorField& d1, const DiscriminatorField& d2) {
  s.validate();
  if (d1.values.size() != s.pd.size() || d2.values.size() != s.pd.size()) {
    throw ShapeError("discriminator fields must cover the support");
  }
  const LossFn& l1 = s.pair.l1;
  const LossFn& l2 = s.pair.l2;
  double v = 0.0;
  for (std::size_t i = 0; i < s.pd.size(); ++i) {
    const double pd = s.pd[i];
    const double pg = s.pg[i];
    if (pd > 0.0) v += s.c1 * pd * -l1(d1.values[i]) + pd * (l2(d2.values[i]) - 1.0);
    if (pg > 0.0) v += pg * (l2(d1.values[i]) - 1.0) + s.c2 * pg * -l1(d2.values[i]);
  }
  return v;
}

double sup_value_bruteforce(const GanTheorySetting& s) {
  s.validate();
  double v = 0.0;
  for (std::size_t i = 0; i < s.pd.size(); ++i) {
    v += pointwise_bruteforce_opt(s.c1 * s.pd[i], s.pg[i], s.pair).h_star;
    v += pointwise_bruteforce_opt(s.c2 * s.pg[i], s.pd[i], s.pair).h_star;
  }
  return v;
}

double closed_form_divergence_sum(const GanTheorySetting& s, double alpha1, double alpha2) {
  s.validate();
  require_order(alpha1, alpha2);
  return s.c1 * f_divergence(s.pd, s.pg, fc_closed_form_generator(alpha1, alpha2, s.c1)) +
         s.c2 * f_divergence(s.pg, s.pd, fc_closed_form_generator(alpha1, alpha2, s.c2));
}

double equal_distribution_value(double c1, double c2, double alpha1, double alpha2) {
  require_order(alpha1, alpha2);
  if (alpha1 == 1.0 || alpha2 == 1.0) throw DomainError("minimum value is only closed-form for alpha != 1");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw DomainError("c1 and c2 must be positive");
  const double a1 = alpha1 / (alpha1 - 1.0);
  const double a2 = alpha2 / (alpha2 - 1.0);
  const double e1 = (alpha1 * alpha2 - alpha1) / (alpha2 - alpha1);
  return -a1 * (c1 + c2) + (a1 - a2) * (std::pow(c1, e1) + std::pow(c2, e1)) + 2.0 / (alpha2 - 1.0);
}

double generic_divergence_sum(const GanTheorySetting& s) {
  s.validate();
  const ConvexGenerator f1 = fc_generic_generator(s.pair, s.c1);
  const ConvexGenerator f2_dual = perspective_dual(fc_generic_generator(s.pair, s.c2));
  // c2 D_{f_c2}(Pg||Pd) = c2 sum_x Pg f_c2'(Pd/Pg) with f' (u) = u f_c2(1/u).
  return s.c1 * f_divergence(s.pd, s.pg, f1) + s.c2 * f_divergence(s.pd, s.pg, f2_dual);
}

double LimitReport::final_gap() const {
  if (steps.empty()) return kInf;
  return std::max(steps.back().forward_gap, steps.back().reverse_gap);
}

bool LimitReport::gaps_shrink() const {
  for (std::size_t i = 1; i < steps.size(); ++i) {
    const double prev = std::max(steps[i - 1].forward_gap, steps[i - 1].reverse_gap);
    const double cur = std::max(steps[i].forward_gap, steps[i].reverse_gap);
    if (cur > prev) return false;
  }
  return true;
}

LimitReport kl_limit_check(const GanTheorySetting& s) {
  s.validate();
  static constexpr std::pair<double, double> kLadder[] = {{1.1, 10.0}, {1.01, 100.0}, {1.001, 1e4}, {1.0 + 1e-5, 1e6}};
  LimitReport report;
  report.forward_target = s.c1 * std::log(s.c1) - s.c1 + s.c1 * kl_family(s.pd, s.pg, KlKind::kForward);
  report.reverse_target = s.c2 * std::log(s.c2) - s.c2 + s.c2 * kl_family(s.pg, s.pd, KlKind::kForward);
  for (const auto& [a1, a2] : kLadder) {
    LimitStep step{a1, a2, 0, 0, 0, 0};
    step.forward_value = s.c1 * f_divergence(s.pd, s.pg, fc_closed_form_generator(a1, a2, s.c1));
    step.reverse_value = s.c2 * f_divergence(s.pg, s.pd, fc_closed_form_generator(a1, a2, s.c2));
    step.forward_gap = std::abs(step.forward_value - report.forward_target);
    step.reverse_gap = std::abs(step.reverse_value - report.reverse_target);
    report.steps.push_back(step);
  }
  return report;
}

double mixed_alpha_root(double alpha1, double alpha2) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw DomainError("alpha values must be positive");
  if (alpha1 == alpha2) return 0.5;
  // g(D) = a2 log D - a1 log(1 - D) increases from -inf to +inf on (0, 1).
  auto g = [&](double d) { return alpha2 * std::log(d) - alpha1 * std::log(1.0 - d); };
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double v = g(mid);
    if (v == 0.0) return mid;
    (v < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DiscreteDistribution random_distribution(Rng& rng, std::size_t support, double floor) {
  std::vector<double> w(support);
  for (double& x : w) x = -std::log(1.0 - rng.uniform());
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x = std::max(x / total, floor);
  return DiscreteDistribution::from_weights(std::move(w));
}

}  // namespace d2gan
