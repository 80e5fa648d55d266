#include "d2gan/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "d2gan/errors.hpp"

namespace d2gan {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kSoftplus:
      return "softplus";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kIdentity:
      return "identity";
  }
  return "unknown";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "softplus") return Activation::kSoftplus;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "identity") return Activation::kIdentity;
  throw FormatError("unknown activation '" + name + "'");
}

namespace {

void apply_activation(Activation a, const Matrix& z, Matrix& out) {
  switch (a) {
    case Activation::kRelu:
      out = z.cwiseMax(0.0);
      return;
    case Activation::kSoftplus:
      out = z.unaryExpr([](double v) { return softplus(v); });
      return;
    case Activation::kSigmoid:
      out = z.unaryExpr([](double v) { return sigmoid(v); });
      return;
    case Activation::kIdentity:
      out = z;
      return;
  }
}

// Multiplies `grad` in place by the activation derivative at z.
void scale_by_derivative(Activation a, const Matrix& z, Matrix& grad) {
  switch (a) {
    case Activation::kRelu:
      grad = (z.array() > 0.0).select(grad, 0.0);
      return;
    case Activation::kSoftplus:
      grad.array() *= z.unaryExpr([](double v) { return sigmoid(v); }).array();
      return;
    case Activation::kSigmoid:
      grad.array() *= z.unaryExpr([](double v) {
                         const double s = sigmoid(v);
                         return s * (1.0 - s);
                       }).array();
      return;
    case Activation::kIdentity:
      return;
  }
}

}  // namespace

Network::Network(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("network needs at least one layer");
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerSpec& spec = layers_[l];
    if (spec.in_dim <= 0 || spec.out_dim <= 0) throw std::invalid_argument("layer dimensions must be positive");
    if (l > 0 && layers_[l - 1].out_dim != spec.in_dim) {
      throw ShapeError("layer " + std::to_string(l) + " input does not match previous output");
    }
    const std::size_t w = static_cast<std::size_t>(spec.in_dim) * spec.out_dim;
    layout_.push_back({offset, offset + w});
    offset += w + static_cast<std::size_t>(spec.out_dim);
  }
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(offset));
}

Eigen::Map<const Matrix> Network::weight(std::size_t layer) const {
  const auto& s = layers_.at(layer);
  return {params_.data() + layout_[layer].weight_offset, s.in_dim, s.out_dim};
}

Eigen::Map<const Eigen::RowVectorXd> Network::bias(std::size_t layer) const {
  return {params_.data() + layout_.at(layer).bias_offset, layers_[layer].out_dim};
}

Eigen::Map<Matrix> Network::weight(std::size_t layer) {
  const auto& s = layers_.at(layer);
  return {params_.data() + layout_[layer].weight_offset, s.in_dim, s.out_dim};
}

Eigen::Map<Eigen::RowVectorXd> Network::bias(std::size_t layer) {
  return {params_.data() + layout_.at(layer).bias_offset, layers_[layer].out_dim};
}

void Network::initialize(Rng& rng) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerSpec& s = layers_[l];
    const double sd = s.activation == Activation::kRelu ? std::sqrt(2.0 / s.in_dim)
                                                        : std::sqrt(2.0 / (s.in_dim + s.out_dim));
    auto w = weight(l);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = sd * rng.normal();
    bias(l).setZero();
  }
}

Network::Tape Network::forward_tape(const Matrix& batch) const {
  if (batch.cols() != input_dim()) {
    throw ShapeError("batch width " + std::to_string(batch.cols()) + " != input dim " + std::to_string(input_dim()));
  }
  Tape tape;
  tape.inputs.reserve(layers_.size());
  tape.preacts.reserve(layers_.size());
  Matrix current = batch;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = current * weight(l);
    z.rowwise() += bias(l);
    Matrix a;
    apply_activation(layers_[l].activation, z, a);
    tape.inputs.push_back(std::move(current));
    tape.preacts.push_back(std::move(z));
    current = std::move(a);
  }
  tape.output = std::move(current);
  return tape;
}

Matrix Network::forward(const Matrix& batch) const { return forward_tape(batch).output; }

Network::Gradients Network::backward(const Tape& tape, const Matrix& upstream, bool wrt_preactivation,
                                     bool need_input_grad) const {
  if (upstream.rows() != tape.output.rows() || upstream.cols() != tape.output.cols()) {
    throw ShapeError("upstream gradient shape does not match network output");
  }
  Gradients g;
  g.params = Eigen::VectorXd::Zero(params_.size());
  Matrix delta = upstream;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const LayerSpec& s = layers_[i];
    if (!(wrt_preactivation && i + 1 == layers_.size())) scale_by_derivative(s.activation, tape.preacts[i], delta);
    Eigen::Map<Matrix> gw(g.params.data() + layout_[i].weight_offset, s.in_dim, s.out_dim);
    Eigen::Map<Eigen::RowVectorXd> gb(g.params.data() + layout_[i].bias_offset, s.out_dim);
    gw.noalias() = tape.inputs[i].transpose() * delta;
    gb = delta.colwise().sum();
    if (i > 0 || need_input_grad) {
      Matrix prev = delta * weight(i).transpose();
      delta = std::move(prev);
    }
  }
  if (need_input_grad) g.input = std::move(delta);
  return g;
}

nlohmann::json Network::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& s : layers_) {
    layers.push_back({{"in", s.in_dim}, {"out", s.out_dim}, {"activation", to_string(s.activation)}});
  }
  return {{"layers", layers}, {"params", std::vector<double>(params_.data(), params_.data() + params_.size())}};
}

Network Network::from_json(const nlohmann::json& j) {
  try {
    std::vector<LayerSpec> layers;
    for (const auto& l : j.at("layers")) {
      layers.push_back({l.at("in").get<int>(), l.at("out").get<int>(),
                        activation_from_string(l.at("activation").get<std::string>())});
    }
    Network net(std::move(layers));
    const auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != net.param_count()) throw FormatError("parameter count does not match layer specs");
    net.params_ = Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed network JSON: ") + e.what());
  }
}

AdamState::AdamState(std::size_t n, AdamConfig cfg)
    : config(cfg),
      m(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))),
      v(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}

void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads, bool maximize) {
  if (grads.size() != params.size() || state.m.size() != params.size()) {
    throw ShapeError("Adam state, parameters and gradients must have equal length");
  }
  const AdamConfig& c = state.config;
  const double sign = maximize ? -1.0 : 1.0;
  ++state.step;
  state.m = c.beta1 * state.m + (1.0 - c.beta1) * sign * grads;
  state.v = c.beta2 * state.v + (1.0 - c.beta2) * grads.cwiseAbs2();
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  params.array() -= c.lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + c.eps);
}

Network make_generator(int noise_dim, int hidden) {
  return Network({{noise_dim, hidden, Activation::kRelu},
                  {hidden, hidden, Activation::kRelu},
                  {hidden, 2, Activation::kIdentity}});
}

Network make_discriminator(int hidden, Activation output) {
  return Network({{2, hidden, Activation::kRelu}, {hidden, 1, output}});
}

}  // namespace d2gan
