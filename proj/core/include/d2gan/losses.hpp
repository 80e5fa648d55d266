#pragma once

#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace d2gan {

// Inputs to every loss are clamped into this range before powering.
inline constexpr double kLossInputMin = 1e-12;
inline constexpr double kLossInputMax = 1e12;

double clamp_loss_input(double t);

/// Order parameter of the alpha-loss. The limits alpha -> 1 (log loss) and
/// alpha -> infinity (linear loss) are explicit cases so that they are
/// evaluated by their limit formulas, never by a nearby float.
class AlphaParam {
 public:
  enum class Kind { kFinite, kOne, kInfinity };

  // Throws DomainError for alpha <= 0 or NaN. Exactly 1.0 maps to one() and
  // +inf maps to infinity(); the general formula is singular there.
  static AlphaParam finite(double alpha);
  static AlphaParam one() { return AlphaParam(Kind::kOne, 1.0); }
  static AlphaParam infinity();

  Kind kind() const { return kind_; }
  // 1.0 for kOne, +inf for kInfinity.
  double value() const { return value_; }

  friend bool operator==(const AlphaParam&, const AlphaParam&) = default;

 private:
  AlphaParam(Kind kind, double value) : kind_(kind), value_(value) {}

  Kind kind_;
  double value_;
};

/// l_alpha(t) = alpha/(alpha-1) * (1 - t^((alpha-1)/alpha)) on t > 0.
/// Throws DomainError when t <= 0.
double alpha_loss(AlphaParam alpha, double t);

/// d/dt l_alpha(t) = -t^(-1/alpha).
double alpha_loss_deriv(AlphaParam alpha, double t);

/// A scalar loss on the positive reals with an analytic derivative.
class LossFn {
 public:
  enum class Kind { kAlpha, kNegLog, kOneMinusT, kCustom };
  using Scalar = std::function<double(double)>;

  static LossFn alpha(AlphaParam a);
  static LossFn alpha(double a) { return alpha(AlphaParam::finite(a)); }
  static LossFn neg_log();
  static LossFn one_minus_t();
  // The caller supplies the derivative; nothing is differentiated numerically.
  static LossFn custom(std::string name, Scalar eval, Scalar deriv);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  // Present for kAlpha; kNegLog and kOneMinusT report their limit order
  // (1 and infinity). Empty for custom losses.
  std::optional<AlphaParam> order() const;

  double operator()(double t) const;
  double deriv(double t) const;

  // {"kind": "alpha"|"neglog"|"oneminus", "alpha": number?}
  nlohmann::json to_json() const;
  static LossFn from_json(const nlohmann::json& j);

 private:
  LossFn(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  std::optional<AlphaParam> alpha_;
  Scalar eval_;
  Scalar deriv_;
};

struct LossPair {
  LossFn l1;
  LossFn l2;

  // True when both losses carry an alpha order with alpha2 > alpha1, the
  // condition under which the closed-form discriminators are maximizers.
  bool satisfies_order_condition() const;

  nlohmann::json to_json() const;
};

/// Builds a pair from {"l1": <loss>, "l2": <loss>} or a two-element array.
/// Throws std::invalid_argument on malformed descriptors.
LossPair make_loss_pair(const nlohmann::json& descriptor);

LossPair alpha_pair(double alpha1, double alpha2);
LossPair d2gan_pair();

}  // namespace d2gan
