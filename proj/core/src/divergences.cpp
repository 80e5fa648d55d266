#include "d2gan/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "d2gan/errors.hpp"
#include "d2gan/optimize1d.hpp"

namespace d2gan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same_support(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.size() != q.size()) {
    throw ShapeError("support mismatch: " + std::to_string(p.size()) + " vs " + std::to_string(q.size()));
  }
}

void check_alpha_ordering(double alpha1, double alpha2) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw DomainError("alpha values must be positive");
  if (!(alpha2 > alpha1)) {
    throw ConstraintViolation("closed form requires alpha2 > alpha1 (got alpha1=" + std::to_string(alpha1) +
                              ", alpha2=" + std::to_string(alpha2) + ")");
  }
  if (alpha1 == 1.0 || alpha2 == 1.0) {
    throw DomainError("closed form is singular at alpha = 1; use the log-loss limit instead");
  }
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("distribution needs a non-empty support");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("probabilities must be finite and non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("probabilities must sum to 1 (sum=" + std::to_string(total) + ")");
  }
}

DiscreteDistribution DiscreteDistribution::from_weights(std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw DomainError("weights must have positive total");
  for (double& w : weights) w /= total;
  return DiscreteDistribution(std::move(weights));
}

double f_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q, const ConvexGenerator& f) {
  check_same_support(p, q);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (qi == 0.0) {
      if (pi == 0.0) continue;
      if (!f.slope_at_infinity) return kInf;
      total += pi * *f.slope_at_infinity;
      continue;
    }
    total += qi * f(pi / qi);
  }
  return total;
}

namespace detail {

double fc_closed_form_shifted(double u, double alpha1, double alpha2, double c, double exponent_shift) {
  check_alpha_ordering(alpha1, alpha2);
  if (!(c > 0.0)) throw DomainError("c must be positive");
  if (!(u >= 0.0)) throw DomainError("u must be non-negative");
  const double a1 = alpha1 / (alpha1 - 1.0);
  const double a2 = alpha2 / (alpha2 - 1.0);
  const double e2 = (alpha1 * alpha2 - alpha2) / (alpha2 - alpha1);
  // e1 = e2 + 1, so c^e2 u^e1 = u (c u)^e2.
  const double e1 = e2 + 1.0 + exponent_shift;
  const double offset = 1.0 / (c * (alpha2 - 1.0));
  if (u == 0.0) return e1 > 0.0 ? offset : kInf;
  const double s = e2 * std::log(c) + (e1 - 1.0) * std::log(u);
  // u - c^e2 u^e1 = -u expm1(s)
  return a1 * u * std::expm1(s) - a2 * u * std::exp(s) + offset;
}

}  // namespace detail

double fc_closed_form(double u, double alpha1, double alpha2, double c) {
  return detail::fc_closed_form_shifted(u, alpha1, alpha2, c, 0.0);
}

double fc_generic(double u, const LossPair& pair, double c) {
  if (!(u > 0.0)) throw DomainError("u must be positive");
  if (!(c > 0.0)) throw DomainError("c must be positive");
  auto objective = [&](double t) { return -u * pair.l1(t) + (pair.l2(t) - 1.0) / c; };
  return maximize_log_grid(objective, {.lo = 1e-6, .hi = 1e6, .points = 2001, .tol = 1e-10}).value;
}

double arimoto_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q, double alpha) {
  check_same_support(p, q);
  if (!(alpha > 0.0)) throw DomainError("Arimoto divergence needs alpha > 0");
  if (alpha == 1.0) throw DomainError("Arimoto divergence is only defined here for alpha != 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double hi = std::max(p[i], q[i]);
    const double lo = std::min(p[i], q[i]);
    if (hi == 0.0) continue;
    // (p^a + q^a)^(1/a) = hi (1 + (lo/hi)^a)^(1/a), stable for large a.
    sum += hi * std::exp(std::log1p(std::pow(lo / hi, alpha)) / alpha);
  }
  return alpha / (alpha - 1.0) * (sum - std::exp2(1.0 / alpha));
}

double cpe_induced_f(double u, AlphaParam alpha) {
  if (!(u > 0.0)) throw DomainError("u must be positive");
  const LossFn loss = LossFn::alpha(alpha);
  auto objective = [&](double p) {
    const double pos = std::max(p, kLossInputMin);
    const double neg = std::max(1.0 - p, kLossInputMin);
    return -(loss(neg) + u * loss(pos));
  };
  return maximize_linear_grid(objective, {.lo = 0.0, .hi = 1.0, .points = 1001, .tol = 1e-10}).value;
}

double kl_family(const DiscreteDistribution& p, const DiscreteDistribution& q, KlKind kind) {
  switch (kind) {
    case KlKind::kForward:
      return f_divergence(p, q, kl_generator());
    case KlKind::kReverse:
      return f_divergence(q, p, kl_generator());
    case KlKind::kSymmetric:
      return kl_family(p, q, KlKind::kForward) + kl_family(p, q, KlKind::kReverse);
  }
  throw std::invalid_argument("unknown KL kind");
}

ConvexGenerator kl_generator() {
  return {[](double u) { return u == 0.0 ? 0.0 : u * std::log(u); }, GeneratorKind::kKl, std::nullopt};
}

ConvexGenerator reverse_kl_generator() {
  return {[](double u) { return -std::log(u); }, GeneratorKind::kReverseKl, 0.0};
}

ConvexGenerator fc_closed_form_generator(double alpha1, double alpha2, double c) {
  check_alpha_ordering(alpha1, alpha2);
  std::optional<double> slope;
  // e2 < 0 exactly when alpha1 < 1; then f(u)/u -> -alpha1/(alpha1-1).
  if (alpha1 < 1.0) slope = -alpha1 / (alpha1 - 1.0);
  return {[=](double u) { return fc_closed_form(u, alpha1, alpha2, c); }, GeneratorKind::kClosedFormAlpha, slope};
}

ConvexGenerator fc_generic_generator(LossPair pair, double c) {
  return {[pair = std::move(pair), c](double u) { return fc_generic(u, pair, c); }, GeneratorKind::kGenericSup,
          std::nullopt};
}

ConvexGenerator cpe_induced_generator(AlphaParam alpha) {
  return {[alpha](double u) { return u == 0.0 ? 0.0 : cpe_induced_f(u, alpha); }, GeneratorKind::kCpeInduced, 0.0};
}

ConvexGenerator perspective_dual(const ConvexGenerator& f) {
  auto inner = f.f;
  auto slope = f.slope_at_infinity;
  return {[inner, slope](double u) {
            if (u == 0.0) return slope ? *slope : kInf;
            return u * inner(1.0 / u);
          },
          f.kind, std::nullopt};
}

}  // namespace d2gan
