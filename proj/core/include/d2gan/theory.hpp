#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "d2gan/divergences.hpp"
#include "d2gan/losses.hpp"

namespace d2gan {

class Rng;

/// Everything the dual-discriminator game needs on a finite support.
struct GanTheorySetting {
  DiscreteDistribution pd;
  DiscreteDistribution pg;
  double c1 = 1.0;
  double c2 = 1.0;
  LossPair pair = d2gan_pair();

  // Throws on support mismatch or non-positive weights.
  void validate() const;
};

/// Discriminator outputs per support point. Entries are positive; a point
/// whose density ratio has a zero denominator holds +inf.
struct DiscriminatorField {
  std::vector<double> values;
};

struct DiscriminatorPair {
  DiscriminatorField d1;
  DiscriminatorField d2;
};

/// Closed form D1 = (c1 Pd/Pg)^k, D2 = (c2 Pg/Pd)^k with
/// k = a1 a2 / (a2 - a1). Throws ConstraintViolation unless a2 > a1.
DiscriminatorPair optimal_discriminators(const GanTheorySetting& s, double alpha1, double alpha2);

struct PointwiseOptimum {
  double t_star;
  double h_star;
};

/// Maximizes h(t) = a (-l1(t)) + b (l2(t) - 1) over t in [1e-6, 1e6].
/// Throws UnboundedObjective when the maximum sits on the range boundary.
PointwiseOptimum pointwise_bruteforce_opt(double a, double b, const LossPair& pair);

/// c1 E_Pd[-l1(D1)] + E_Pg[l2(D1) - 1] + E_Pd[l2(D2) - 1] + c2 E_Pg[-l1(D2)] as finite sums.
double value_function(const GanTheorySetting& s, const DiscriminatorField& d1, const DiscriminatorField& d2);

/// Value at pointwise brute-force discriminators (each support point maximized
/// separately), i.e. the inner sup computed without any closed form.
double sup_value_bruteforce(const GanTheorySetting& s);

/// c1 D_{f_c1}(Pd||Pg) + c2 D_{f_c2}(Pg||Pd) with the closed-form alpha f_c.
double closed_form_divergence_sum(const GanTheorySetting& s, double alpha1, double alpha2);

/// Value of the game at Pg = Pd: c1 f_c1(1) + c2 f_c2(1), expanded as
///   -a1/(a1-1) (c1 + c2) + (a1/(a1-1) - a2/(a2-1)) (c1^e1 + c2^e1) + 2/(a2-1).
double equal_distribution_value(double c1, double c2, double alpha1, double alpha2);

/// c1 D_{f_c1}(Pd||Pg) + c2 D_{f_c2}(Pg||Pd) with f_c from the numerical sup;
/// the reverse term goes through the dual generator u f_c2(1/u).
double generic_divergence_sum(const GanTheorySetting& s);

struct LimitStep {
  double alpha1;
  double alpha2;
  double forward_value;  // c1 D_{f_c1}(Pd||Pg)
  double reverse_value;  // c2 D_{f_c2}(Pg||Pd)
  double forward_gap;
  double reverse_gap;
};

struct LimitReport {
  double forward_target;  // c1 log c1 - c1 + c1 KL(Pd||Pg)
  double reverse_target;  // c2 log c2 - c2 + c2 KL(Pg||Pd)
  std::vector<LimitStep> steps;

  double final_gap() const;
  bool gaps_shrink() const;
};

/// Walks (alpha1, alpha2) down the ladder (1.1,10), (1.01,100), (1.001,1e4),
/// (1+1e-5,1e6) and measures how far the alpha divergences are from the
/// log-loss/linear-loss KL form.
LimitReport kl_limit_check(const GanTheorySetting& s);

/// Root of D^a2 = (1-D)^a1 in (0,1) by bisection to 1e-12.
double mixed_alpha_root(double alpha1, double alpha2);

/// Dirichlet(1,...,1) draw with entries floored at `floor` and renormalized.
DiscreteDistribution random_distribution(Rng& rng, std::size_t support, double floor = 1e-4);

}  // namespace d2gan
