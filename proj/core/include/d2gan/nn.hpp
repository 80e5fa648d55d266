#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "d2gan/data.hpp"
#include "d2gan/rng.hpp"

namespace d2gan {

enum class Activation { kRelu, kSoftplus, kSigmoid, kIdentity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct LayerSpec {
  int in_dim = 0;
  int out_dim = 0;
  Activation activation = Activation::kIdentity;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Dense MLP whose weights and biases live in one flat parameter vector.
///
/// Layer l owns a row-major in x out weight block followed by an out-sized
/// bias block; `layout()` gives the offsets. A batch is n x in_dim with one
/// sample per row.
class Network {
 public:
  struct Slot {
    std::size_t weight_offset;
    std::size_t bias_offset;
  };

  // Values cached by forward_tape() for the backward pass.
  struct Tape {
    std::vector<Matrix> inputs;    // input to each layer
    std::vector<Matrix> preacts;   // affine output of each layer
    Matrix output;
  };

  struct Gradients {
    Eigen::VectorXd params;
    Matrix input;  // empty unless requested
  };

  Network() = default;
  explicit Network(std::vector<LayerSpec> layers);

  const std::vector<LayerSpec>& layers() const { return layers_; }
  const std::vector<Slot>& layout() const { return layout_; }
  int input_dim() const { return layers_.front().in_dim; }
  int output_dim() const { return layers_.back().out_dim; }
  std::size_t param_count() const { return static_cast<std::size_t>(params_.size()); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  Eigen::Map<const Matrix> weight(std::size_t layer) const;
  Eigen::Map<const Eigen::RowVectorXd> bias(std::size_t layer) const;
  Eigen::Map<Matrix> weight(std::size_t layer);
  Eigen::Map<Eigen::RowVectorXd> bias(std::size_t layer);

  // He-scaled normals for relu layers, Xavier-scaled for the rest; zero biases.
  void initialize(Rng& rng);

  Matrix forward(const Matrix& batch) const;
  Tape forward_tape(const Matrix& batch) const;

  // `upstream` is dL/d(output), or dL/d(last pre-activation) when
  // `wrt_preactivation` is set. ReLU uses subgradient 0 at 0.
  Gradients backward(const Tape& tape, const Matrix& upstream, bool wrt_preactivation = false,
                     bool need_input_grad = false) const;

  nlohmann::json to_json() const;
  static Network from_json(const nlohmann::json& j);

  friend bool operator==(const Network& a, const Network& b) {
    return a.layers_ == b.layers_ && a.params_.size() == b.params_.size() && a.params_ == b.params_;
  }

 private:
  std::vector<LayerSpec> layers_;
  std::vector<Slot> layout_;
  Eigen::VectorXd params_;
};

/// Numerically safe log(1 + e^z).
double softplus(double z);
double sigmoid(double z);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  Eigen::VectorXd m;
  Eigen::VectorXd v;

  AdamState() = default;
  AdamState(std::size_t n, AdamConfig cfg);
};

/// One bias-corrected Adam update in place. `maximize` ascends.
void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads, bool maximize);

/// Generator: noise_dim -> hidden (relu) -> hidden (relu) -> 2 (identity).
Network make_generator(int noise_dim, int hidden);
/// Discriminator: 2 -> hidden (relu) -> 1 with the given output activation.
Network make_discriminator(int hidden, Activation output);

}  // namespace d2gan
