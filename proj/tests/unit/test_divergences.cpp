#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "d2gan/divergences.hpp"
#include "d2gan/errors.hpp"
#include "d2gan/rng.hpp"
#include "d2gan/theory.hpp"

using namespace d2gan;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

DiscreteDistribution dist(std::vector<double> p) { return DiscreteDistribution(std::move(p)); }

}  // namespace

TEST(DiscreteDistribution, ValidatesMass) {
  EXPECT_NO_THROW(dist({0.25, 0.75}));
  EXPECT_THROW(dist({0.5, 0.6}), DomainError);
  EXPECT_THROW(dist({-0.5, 1.5}), DomainError);
  EXPECT_THROW(dist({}), std::invalid_argument);
  EXPECT_EQ(DiscreteDistribution::from_weights({1, 3}), dist({0.25, 0.75}));
}

TEST(FDivergence, KlExamples) {
  const auto p = dist({0.5, 0.5});
  const auto q = dist({0.25, 0.75});
  EXPECT_EQ(f_divergence(p, p, kl_generator()), 0.0);
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  EXPECT_NEAR(f_divergence(p, q, kl_generator()), expected, 1e-15);
  EXPECT_NEAR(expected, 0.14384, 5e-6);
  EXPECT_NEAR(kl_family(p, q, KlKind::kForward), expected, 1e-15);
  EXPECT_EQ(kl_family(p, q, KlKind::kSymmetric), kl_family(p, q, KlKind::kForward) + kl_family(q, p, KlKind::kForward));
  EXPECT_EQ(kl_family(p, q, KlKind::kReverse), kl_family(q, p, KlKind::kForward));
  for (auto kind : {KlKind::kForward, KlKind::kReverse, KlKind::kSymmetric}) EXPECT_EQ(kl_family(q, q, kind), 0.0);
}

TEST(FDivergence, ZeroMassHandling) {
  const auto p = dist({1.0, 0.0});
  const auto q = dist({0.0, 1.0});
  EXPECT_EQ(kl_family(p, q, KlKind::kForward), kInf);
  EXPECT_EQ(f_divergence(dist({0.5, 0.5, 0.0}), dist({0.5, 0.5, 0.0}), kl_generator()), 0.0);
  EXPECT_THROW(f_divergence(dist({1.0}), dist({0.5, 0.5}), kl_generator()), ShapeError);
}

TEST(FDivergence, EqualDistributionsGiveGeneratorAtOne) {
  const auto p = dist({0.1, 0.2, 0.3, 0.4});
  const ConvexGenerator f = fc_closed_form_generator(0.6, 0.9, 1.5);
  EXPECT_NEAR(f_divergence(p, p, f), f(1.0), 1e-12);
}

TEST(FcClosedForm, UnitPointOfExponentialAndSquareRootPair) {
  // sup_t (-l_0.5(t) + l_2(t) - 1) = sup_t (2 - 1/t - 2 sqrt t), attained at t = 1.
  EXPECT_NEAR(fc_closed_form(1.0, 0.5, 2.0, 1.0), -1.0, 1e-14);
  EXPECT_NEAR(fc_generic(1.0, alpha_pair(0.5, 2.0), 1.0), -1.0, 1e-9);
}

TEST(FcClosedForm, MatchesGenericSupAtReferencePoints) {
  EXPECT_NEAR(fc_closed_form(1.0, 0.6, 0.9, 1.5), fc_generic(1.0, alpha_pair(0.6, 0.9), 1.5), 1e-8);
  EXPECT_NEAR(fc_closed_form(2.0, 0.5, 2.0, 1.0), fc_generic(2.0, alpha_pair(0.5, 2.0), 1.0), 1e-6);
}

TEST(FcClosedForm, RejectsBadOrdering) {
  EXPECT_THROW(fc_closed_form(1.0, 0.9, 0.6, 1.0), ConstraintViolation);
  EXPECT_THROW(fc_closed_form(1.0, 0.5, 0.5, 1.0), ConstraintViolation);
  EXPECT_THROW(fc_closed_form(1.0, 0.5, 1.0, 1.0), DomainError);
  EXPECT_THROW(fc_closed_form(1.0, 0.5, 2.0, 0.0), DomainError);
}

TEST(FcGeneric, LogAndLinearPairAtOne) {
  EXPECT_NEAR(fc_generic(1.0, d2gan_pair(), 1.0), -1.0, 1e-9);
}

TEST(FcGeneric, ObjectiveAtClosedFormMaximizerMatchesScan) {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const double a1 = 0.3 + 1.5 * rng.uniform();
    const double a2 = a1 + 0.3 + 2.0 * rng.uniform();
    if (std::abs(a1 - 1.0) < 1e-3 || std::abs(a2 - 1.0) < 1e-3) continue;
    const double u = std::exp(2.0 * rng.uniform() - 1.0);
    const double c = std::exp(2.0 * rng.uniform() - 1.0);
    const LossPair pair = alpha_pair(a1, a2);
    const double t_star = std::pow(u * c, a1 * a2 / (a2 - a1));
    const double at_star = -u * pair.l1(t_star) + (pair.l2(t_star) - 1.0) / c;
    EXPECT_NEAR(fc_generic(u, pair, c), at_star, 1e-8 * (1.0 + std::abs(at_star)));
  }
}

TEST(FcGeneric, MatchesClosedFormOnRandomTriples) {
  Rng rng(3);
  int checked = 0;
  while (checked < 50) {
    const double a1 = 0.2 + 2.0 * rng.uniform();
    const double a2 = a1 + 0.2 + 2.0 * rng.uniform();
    if (std::abs(a1 - 1.0) < 1e-2 || std::abs(a2 - 1.0) < 1e-2) continue;
    const double u = std::exp(3.0 * rng.uniform() - 1.5);
    const double c = std::exp(2.0 * rng.uniform() - 1.0);
    // Keep the maximizer inside the scanned range.
    if (std::abs(a1 * a2 / (a2 - a1) * std::log(u * c)) > 12.0) continue;
    const double closed = fc_closed_form(u, a1, a2, c);
    EXPECT_LT(std::abs(fc_generic(u, alpha_pair(a1, a2), c) - closed), 1e-6 * std::max(1.0, std::abs(closed)))
        << a1 << " " << a2 << " " << u << " " << c;
    ++checked;
  }
}

TEST(FcGeneric, ReportsUnboundedSup) {
  // With alpha2 < alpha1 the objective keeps growing towards an end of the range.
  EXPECT_THROW(fc_generic(1.0, alpha_pair(2.0, 0.5), 1.0), UnboundedObjective);
}

TEST(FcGeneric, ConvexInU) {
  const LossPair pairs[] = {alpha_pair(0.6, 0.9), alpha_pair(0.5, 2.0), d2gan_pair()};
  for (const LossPair& pair : pairs) {
    for (int i = 0; i < 40; ++i) {
      const double u1 = std::exp(-2.0 + 0.1 * i);
      const double u2 = u1 * 1.7;
      const double mid = fc_generic(0.5 * (u1 + u2), pair, 1.3);
      EXPECT_LE(mid, 0.5 * (fc_generic(u1, pair, 1.3) + fc_generic(u2, pair, 1.3)) + 1e-9);
    }
  }
}

TEST(ConvexGenerators, MidpointConvexOnLogGrid) {
  const std::vector<ConvexGenerator> gens = {kl_generator(),
                                             reverse_kl_generator(),
                                             fc_closed_form_generator(0.6, 0.9, 0.01),
                                             fc_closed_form_generator(0.6, 0.9, 1.5),
                                             fc_closed_form_generator(0.5, 2.0, 1.0),
                                             cpe_induced_generator(AlphaParam::finite(0.5)),
                                             cpe_induced_generator(AlphaParam::finite(3.0)),
                                             perspective_dual(fc_closed_form_generator(1.5, 4.0, 2.0))};
  for (const auto& f : gens) {
    for (int i = 0; i < 60; ++i) {
      const double u1 = 1e-3 * std::pow(1e6, i / 59.0);
      for (double r : {1.1, 3.0, 50.0}) {
        const double u2 = std::min(u1 * r, 1e3);
        EXPECT_LE(f(0.5 * (u1 + u2)), 0.5 * (f(u1) + f(u2)) + 1e-9 * (1.0 + std::abs(f(u2)))) << u1 << " " << u2;
      }
    }
  }
}

TEST(ConvexGenerators, DivergenceBoundedBelowByGeneratorAtOne) {
  Rng rng(99);
  const std::vector<ConvexGenerator> gens = {kl_generator(), reverse_kl_generator(),
                                             fc_closed_form_generator(0.6, 0.9, 1.5),
                                             fc_closed_form_generator(1.5, 3.0, 0.5),
                                             fc_generic_generator(d2gan_pair(), 1.2),
                                             cpe_induced_generator(AlphaParam::finite(2.0))};
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng.below(15);
    const auto p = random_distribution(rng, n);
    const auto q = random_distribution(rng, n);
    const auto& f = gens[i % gens.size()];
    EXPECT_GE(f_divergence(p, q, f), f(1.0) - 1e-9);
    EXPECT_NEAR(f_divergence(p, p, f), f(1.0), 1e-9 * (1.0 + std::abs(f(1.0))));
  }
}

TEST(PerspectiveDual, ReversesArguments) {
  const auto p = dist({0.1, 0.6, 0.3});
  const auto q = dist({0.5, 0.2, 0.3});
  const ConvexGenerator f = fc_closed_form_generator(0.6, 0.9, 1.5);
  EXPECT_NEAR(f_divergence(p, q, perspective_dual(f)), f_divergence(q, p, f), 1e-12);
  EXPECT_NEAR(f_divergence(p, q, perspective_dual(kl_generator())), kl_family(q, p, KlKind::kForward), 1e-12);
}

TEST(Arimoto, ZeroAtEquality) {
  const auto p = dist({0.2, 0.3, 0.5});
  for (double a : {0.3, 0.5, 2.0, 10.0}) EXPECT_NEAR(arimoto_divergence(p, p, a), 0.0, 1e-12);
}

TEST(Arimoto, DisjointSupportsNearLogLimit) {
  // As alpha -> 1 the divergence tends to 2 JSD, which is log 4 for disjoint supports.
  const auto p = dist({1.0, 0.0});
  const auto q = dist({0.0, 1.0});
  EXPECT_NEAR(arimoto_divergence(p, q, 1.0 + 1e-6), std::log(4.0), 1e-5);
  EXPECT_NEAR(arimoto_divergence(p, q, 1e6), 1.0, 1e-5);
}

TEST(Arimoto, SymmetricExactly) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_distribution(rng, 6);
    const auto q = random_distribution(rng, 6);
    const double a = 0.2 + 4.0 * rng.uniform();
    if (a == 1.0) continue;
    EXPECT_EQ(arimoto_divergence(p, q, a), arimoto_divergence(q, p, a));
  }
}

TEST(Arimoto, RejectsBadOrder) {
  const auto p = dist({0.5, 0.5});
  EXPECT_THROW(arimoto_divergence(p, p, 0.0), DomainError);
  EXPECT_THROW(arimoto_divergence(p, p, -1.0), DomainError);
  EXPECT_THROW(arimoto_divergence(p, p, 1.0), DomainError);
}

TEST(CpeInduced, LogLossAtOne) {
  // inf_p -log(1-p) - log p is attained at p = 1/2.
  EXPECT_NEAR(cpe_induced_f(1.0, AlphaParam::one()), -std::log(4.0), 1e-9);
}

TEST(CpeInduced, DivergenceEqualsArimotoUpToConstant) {
  Rng rng(17);
  for (double a : {0.5, 1.0 - 1e-6, 1.0 + 1e-6, 2.0}) {
    const ConvexGenerator f = cpe_induced_generator(AlphaParam::finite(a));
    for (int i = 0; i < 10; ++i) {
      const auto p = random_distribution(rng, 4);
      const auto q = random_distribution(rng, 4);
      EXPECT_NEAR(f_divergence(p, q, f) - f(1.0), arimoto_divergence(p, q, a), 1e-3) << a;
    }
  }
}
