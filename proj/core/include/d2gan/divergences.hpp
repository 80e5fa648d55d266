#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "d2gan/losses.hpp"

namespace d2gan {

/// Probability vector over an indexed finite support.
class DiscreteDistribution {
 public:
  // Validates non-negativity and unit mass (|sum - 1| <= 1e-12).
  explicit DiscreteDistribution(std::vector<double> probs);
  // Normalizes non-negative weights with positive total.
  static DiscreteDistribution from_weights(std::vector<double> weights);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

 private:
  std::vector<double> probs_;
};

enum class GeneratorKind { kClosedFormAlpha, kGenericSup, kKl, kReverseKl, kCpeInduced, kCustom };

/// Convex f defining D_f(P||Q) = sum_x Q(x) f(P(x)/Q(x)).
struct ConvexGenerator {
  std::function<double(double)> f;
  GeneratorKind kind = GeneratorKind::kCustom;
  // lim_{u->inf} f(u)/u when finite; governs mass of P where Q vanishes.
  // Empty means the limit is +inf.
  std::optional<double> slope_at_infinity;

  double operator()(double u) const { return f(u); }
};

/// sum_x Q(x) f(P(x)/Q(x)). Terms with P = Q = 0 vanish; Q(x) = 0 < P(x)
/// contributes P(x) * slope_at_infinity, i.e. +inf for superlinear f.
/// Throws ShapeError on support mismatch.
double f_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q, const ConvexGenerator& f);

/// Closed-form supremum f_c(u) = sup_t [-u l_a1(t) + (l_a2(t) - 1) / c] for the
/// alpha-loss pair. Equals
///   -a1/(a1-1) (u - c^e2 u^e1) - a2/(a2-1) c^e2 u^e1 + 1/(c (a2-1)),
///   e1 = (a1 a2 - a1)/(a2 - a1),  e2 = (a1 a2 - a2)/(a2 - a1).
/// Requires a2 > a1 > 0 (ConstraintViolation otherwise) and neither equal to 1.
double fc_closed_form(double u, double alpha1, double alpha2, double c);

/// Same sup for an arbitrary loss pair, computed numerically: log-grid scan of
/// t in [1e-6, 1e6] (2001 points) then golden-section refinement to 1e-10.
/// Throws UnboundedObjective when the maximum escapes the scanned range.
double fc_generic(double u, const LossPair& pair, double c);

/// alpha/(alpha-1) * (sum_x (p^alpha + q^alpha)^(1/alpha) - 2^(1/alpha)), alpha > 0, alpha != 1.
double arimoto_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q, double alpha);

/// f(u) = -inf_{p in [0,1]} (l_alpha(1-p) + u l_alpha(p)); 1001-point scan plus golden section.
double cpe_induced_f(double u, AlphaParam alpha);

enum class KlKind { kForward, kReverse, kSymmetric };

/// Natural-log KL family; +inf when absolute continuity fails.
double kl_family(const DiscreteDistribution& p, const DiscreteDistribution& q, KlKind kind);

ConvexGenerator kl_generator();
ConvexGenerator reverse_kl_generator();
ConvexGenerator fc_closed_form_generator(double alpha1, double alpha2, double c);
ConvexGenerator fc_generic_generator(LossPair pair, double c);
ConvexGenerator cpe_induced_generator(AlphaParam alpha);

/// u -> u f(1/u), the generator of the reversed divergence: D_{f*}(P||Q) = D_f(Q||P).
ConvexGenerator perspective_dual(const ConvexGenerator& f);

namespace detail {
// fc_closed_form with the u-exponent shifted by `exponent_shift`. Only used by
// the verification suite's sensitivity check.
double fc_closed_form_shifted(double u, double alpha1, double alpha2, double c, double exponent_shift);
}  // namespace detail

}  // namespace d2gan
