#include "d2gan/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "d2gan/errors.hpp"

namespace d2gan {

namespace {

double checked_input(double t) {
  if (!(t > 0.0)) {
    throw DomainError("loss input must be positive, got " + std::to_string(t));
  }
  return clamp_loss_input(t);
}

}  // namespace

double clamp_loss_input(double t) { return std::clamp(t, kLossInputMin, kLossInputMax); }

AlphaParam AlphaParam::finite(double alpha) {
  if (std::isnan(alpha) || alpha <= 0.0) {
    throw DomainError("alpha must be positive, got " + std::to_string(alpha));
  }
  if (alpha == 1.0) return one();
  if (std::isinf(alpha)) return infinity();
  return AlphaParam(Kind::kFinite, alpha);
}

AlphaParam AlphaParam::infinity() {
  return AlphaParam(Kind::kInfinity, std::numeric_limits<double>::infinity());
}

double alpha_loss(AlphaParam alpha, double t) {
  t = checked_input(t);
  switch (alpha.kind()) {
    case AlphaParam::Kind::kOne:
      return -std::log(t);
    case AlphaParam::Kind::kInfinity:
      return 1.0 - t;
    case AlphaParam::Kind::kFinite:
      break;
  }
  // alpha/(alpha-1) * (1 - t^beta) with beta = (alpha-1)/alpha, written with
  // expm1 so that alpha close to 1 keeps full precision.
  const double a = alpha.value();
  const double beta = (a - 1.0) / a;
  return -std::expm1(beta * std::log(t)) / beta;
}

double alpha_loss_deriv(AlphaParam alpha, double t) {
  t = checked_input(t);
  switch (alpha.kind()) {
    case AlphaParam::Kind::kOne:
      return -1.0 / t;
    case AlphaParam::Kind::kInfinity:
      return -1.0;
    case AlphaParam::Kind::kFinite:
      break;
  }
  return -std::exp(-std::log(t) / alpha.value());
}

LossFn LossFn::alpha(AlphaParam a) {
  LossFn fn(Kind::kAlpha, "alpha");
  fn.alpha_ = a;
  return fn;
}

LossFn LossFn::neg_log() { return LossFn(Kind::kNegLog, "neglog"); }

LossFn LossFn::one_minus_t() { return LossFn(Kind::kOneMinusT, "oneminus"); }

LossFn LossFn::custom(std::string name, Scalar eval, Scalar deriv) {
  if (!eval || !deriv) throw std::invalid_argument("custom loss needs both eval and deriv");
  LossFn fn(Kind::kCustom, std::move(name));
  fn.eval_ = std::move(eval);
  fn.deriv_ = std::move(deriv);
  return fn;
}

std::optional<AlphaParam> LossFn::order() const {
  switch (kind_) {
    case Kind::kAlpha:
      return alpha_;
    case Kind::kNegLog:
      return AlphaParam::one();
    case Kind::kOneMinusT:
      return AlphaParam::infinity();
    case Kind::kCustom:
      break;
  }
  return std::nullopt;
}

double LossFn::operator()(double t) const {
  switch (kind_) {
    case Kind::kAlpha:
      return alpha_loss(*alpha_, t);
    case Kind::kNegLog:
      return alpha_loss(AlphaParam::one(), t);
    case Kind::kOneMinusT:
      return alpha_loss(AlphaParam::infinity(), t);
    case Kind::kCustom:
      break;
  }
  return eval_(checked_input(t));
}

double LossFn::deriv(double t) const {
  switch (kind_) {
    case Kind::kAlpha:
      return alpha_loss_deriv(*alpha_, t);
    case Kind::kNegLog:
      return alpha_loss_deriv(AlphaParam::one(), t);
    case Kind::kOneMinusT:
      return alpha_loss_deriv(AlphaParam::infinity(), t);
    case Kind::kCustom:
      break;
  }
  return deriv_(checked_input(t));
}

nlohmann::json LossFn::to_json() const {
  switch (kind_) {
    case Kind::kAlpha: {
      nlohmann::json j{{"kind", "alpha"}};
      // inf is not representable in JSON; the symbolic limits serialize by name.
      if (alpha_->kind() == AlphaParam::Kind::kInfinity) return {{"kind", "oneminus"}};
      j["alpha"] = alpha_->value();
      return j;
    }
    case Kind::kNegLog:
      return {{"kind", "neglog"}};
    case Kind::kOneMinusT:
      return {{"kind", "oneminus"}};
    case Kind::kCustom:
      break;
  }
  throw std::invalid_argument("custom loss '" + name_ + "' has no JSON descriptor");
}

LossFn LossFn::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw std::invalid_argument("loss descriptor must be an object with a string 'kind'");
  }
  const auto kind = j["kind"].get<std::string>();
  if (kind == "neglog") return neg_log();
  if (kind == "oneminus") return one_minus_t();
  if (kind == "alpha") {
    if (!j.contains("alpha") || !j["alpha"].is_number()) {
      throw std::invalid_argument("alpha loss descriptor needs a numeric 'alpha'");
    }
    return alpha(AlphaParam::finite(j["alpha"].get<double>()));
  }
  throw std::invalid_argument("unknown loss kind '" + kind + "'");
}

bool LossPair::satisfies_order_condition() const {
  const auto a1 = l1.order();
  const auto a2 = l2.order();
  if (!a1 || !a2) return false;
  return a2->value() > a1->value();
}

nlohmann::json LossPair::to_json() const { return {{"l1", l1.to_json()}, {"l2", l2.to_json()}}; }

LossPair make_loss_pair(const nlohmann::json& descriptor) {
  if (descriptor.is_array()) {
    if (descriptor.size() != 2) throw std::invalid_argument("loss pair array must have two entries");
    return {LossFn::from_json(descriptor[0]), LossFn::from_json(descriptor[1])};
  }
  if (descriptor.is_object() && descriptor.contains("l1") && descriptor.contains("l2")) {
    return {LossFn::from_json(descriptor["l1"]), LossFn::from_json(descriptor["l2"])};
  }
  throw std::invalid_argument("loss pair descriptor must be {\"l1\":..,\"l2\":..} or [l1, l2]");
}

LossPair alpha_pair(double alpha1, double alpha2) {
  return {LossFn::alpha(alpha1), LossFn::alpha(alpha2)};
}

LossPair d2gan_pair() { return {LossFn::neg_log(), LossFn::one_minus_t()}; }

}  // namespace d2gan
