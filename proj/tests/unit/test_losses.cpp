#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "d2gan/errors.hpp"
#include "d2gan/losses.hpp"

using namespace d2gan;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

}  // namespace

TEST(AlphaLoss, FormulaAtHalf) { EXPECT_NEAR(alpha_loss(AlphaParam::finite(0.5), 2.0), -0.5, 1e-15); }

TEST(AlphaLoss, VanishesAtOne) {
  for (double a : {0.1, 0.5, 0.9, 1.0, 1.5, 3.0, 100.0}) EXPECT_EQ(alpha_loss(AlphaParam::finite(a), 1.0), 0.0) << a;
  EXPECT_EQ(alpha_loss(AlphaParam::infinity(), 1.0), 0.0);
}

TEST(AlphaLoss, LimitCases) {
  EXPECT_DOUBLE_EQ(alpha_loss(AlphaParam::infinity(), 3.0), -2.0);
  EXPECT_DOUBLE_EQ(alpha_loss(AlphaParam::one(), 3.0), -std::log(3.0));
  EXPECT_EQ(AlphaParam::finite(1.0).kind(), AlphaParam::Kind::kOne);
  EXPECT_EQ(AlphaParam::finite(kInf).kind(), AlphaParam::Kind::kInfinity);
}

TEST(AlphaLoss, Derivatives) {
  EXPECT_DOUBLE_EQ(alpha_loss_deriv(AlphaParam::one(), 4.0), -0.25);
  EXPECT_DOUBLE_EQ(alpha_loss_deriv(AlphaParam::finite(0.5), 2.0), -0.25);
  EXPECT_DOUBLE_EQ(alpha_loss_deriv(AlphaParam::infinity(), 7.0), -1.0);
}

TEST(AlphaLoss, RejectsBadInputs) {
  EXPECT_THROW(alpha_loss(AlphaParam::finite(0.5), 0.0), DomainError);
  EXPECT_THROW(alpha_loss(AlphaParam::finite(0.5), -1.0), DomainError);
  EXPECT_THROW(alpha_loss_deriv(AlphaParam::one(), 0.0), DomainError);
  EXPECT_THROW(AlphaParam::finite(0.0), DomainError);
  EXPECT_THROW(AlphaParam::finite(-2.0), DomainError);
  EXPECT_THROW(AlphaParam::finite(std::nan("")), DomainError);
}

TEST(AlphaLoss, ContinuousInAlphaNearLimits) {
  for (double t : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    EXPECT_LT(std::abs(alpha_loss(AlphaParam::finite(1.0 + 1e-6), t) + std::log(t)), 1e-4) << t;
    EXPECT_LT(std::abs(alpha_loss(AlphaParam::finite(1.0 - 1e-6), t) + std::log(t)), 1e-4) << t;
    EXPECT_LT(std::abs(alpha_loss(AlphaParam::finite(1e8), t) - (1.0 - t)), 1e-4 * (1.0 + std::abs(t))) << t;
  }
}

TEST(AlphaLoss, DerivativeMatchesCentralDifferences) {
  for (double a : {0.2, 0.5, 0.6, 0.9, 1.0 + 1e-3, 2.0, 7.5}) {
    const AlphaParam alpha = AlphaParam::finite(a);
    for (double t : log_grid(1e-3, 1e3, 61)) {
      const double h = 1e-5 * t;
      const double fd = (alpha_loss(alpha, t + h) - alpha_loss(alpha, t - h)) / (2.0 * h);
      const double d = alpha_loss_deriv(alpha, t);
      // Round-off in the difference of two nearly equal loss values.
      const double noise = 1e-15 * (1.0 + std::abs(alpha_loss(alpha, t))) / h;
      EXPECT_LT(std::abs(fd - d), 1e-6 * std::abs(d) + noise) << "alpha " << a << " t " << t;
    }
  }
}

// For alpha < 1 the loss flattens to its asymptote in double precision, so
// only the derivative is required to stay strictly negative.
TEST(AlphaLoss, DecreasingAndFiniteOnClampRange) {
  for (double a : {0.3, 0.9, 1.0, 4.0, kInf}) {
    const AlphaParam alpha = a == kInf ? AlphaParam::infinity() : AlphaParam::finite(a);
    double prev = kInf;
    for (double t : log_grid(kLossInputMin, kLossInputMax, 241)) {
      const double v = alpha_loss(alpha, t);
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_TRUE(std::isfinite(alpha_loss_deriv(alpha, t)));
      EXPECT_LT(alpha_loss_deriv(alpha, t), 0.0);
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
}

TEST(AlphaLoss, ClampsExtremeInputs) {
  const AlphaParam a = AlphaParam::finite(0.6);
  EXPECT_EQ(alpha_loss(a, 1e-300), alpha_loss(a, kLossInputMin));
  EXPECT_EQ(alpha_loss(a, 1e300), alpha_loss(a, kLossInputMax));
}

TEST(LossFn, NamedLossesMatchAlphaLimits) {
  for (double t : {0.01, 0.5, 3.0}) {
    EXPECT_EQ(LossFn::neg_log()(t), alpha_loss(AlphaParam::one(), t));
    EXPECT_EQ(LossFn::one_minus_t()(t), 1.0 - t);
    EXPECT_EQ(LossFn::one_minus_t().deriv(t), -1.0);
  }
  EXPECT_EQ(LossFn::neg_log().order()->kind(), AlphaParam::Kind::kOne);
  EXPECT_EQ(LossFn::one_minus_t().order()->kind(), AlphaParam::Kind::kInfinity);
}

TEST(LossFn, CustomUsesSuppliedDerivative) {
  const LossFn sq = LossFn::custom("sq", [](double t) { return (t - 1) * (t - 1); }, [](double t) { return 2 * (t - 1); });
  EXPECT_DOUBLE_EQ(sq(3.0), 4.0);
  EXPECT_DOUBLE_EQ(sq.deriv(3.0), 4.0);
  EXPECT_FALSE(sq.order().has_value());
  EXPECT_THROW(sq.to_json(), std::invalid_argument);
  EXPECT_THROW(LossFn::custom("x", nullptr, nullptr), std::invalid_argument);
}

TEST(LossPair, DescriptorRoundTrip) {
  const LossPair p = make_loss_pair(nlohmann::json::parse(R"({"l1":{"kind":"alpha","alpha":0.6},"l2":{"kind":"alpha","alpha":0.9}})"));
  EXPECT_DOUBLE_EQ(p.l1.order()->value(), 0.6);
  EXPECT_DOUBLE_EQ(p.l2.order()->value(), 0.9);
  EXPECT_TRUE(p.satisfies_order_condition());
  const LossPair again = make_loss_pair(p.to_json());
  EXPECT_EQ(again.to_json(), p.to_json());

  const LossPair d2 = make_loss_pair(nlohmann::json::parse(R"([{"kind":"neglog"},{"kind":"oneminus"}])"));
  EXPECT_EQ(d2.l1.kind(), LossFn::Kind::kNegLog);
  EXPECT_EQ(d2.l2.kind(), LossFn::Kind::kOneMinusT);
  EXPECT_TRUE(d2.satisfies_order_condition());
}

TEST(LossPair, EqualAlphasAreValidButFailOrdering) {
  const LossPair p = alpha_pair(0.5, 0.5);
  EXPECT_FALSE(p.satisfies_order_condition());
  EXPECT_FALSE(alpha_pair(2.0, 0.5).satisfies_order_condition());
}

TEST(LossPair, RejectsMalformedDescriptors) {
  using nlohmann::json;
  EXPECT_THROW(make_loss_pair(json::parse(R"({"l1":{"kind":"alpha"}})")), std::invalid_argument);
  EXPECT_THROW(make_loss_pair(json::parse(R"([{"kind":"neglog"}])")), std::invalid_argument);
  EXPECT_THROW(make_loss_pair(json::parse(R"([{"kind":"hinge"},{"kind":"neglog"}])")), std::invalid_argument);
  EXPECT_THROW(make_loss_pair(json::parse(R"([{"kind":"alpha"},{"kind":"neglog"}])")), std::invalid_argument);
  EXPECT_THROW(make_loss_pair(json::parse(R"([{"kind":"alpha","alpha":-1},{"kind":"neglog"}])")), DomainError);
  EXPECT_THROW(make_loss_pair(json::parse("42")), std::invalid_argument);
}
