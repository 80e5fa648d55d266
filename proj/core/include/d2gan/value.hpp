#pragma once

#include <optional>

#include <Eigen/Dense>

#include "d2gan/config.hpp"
#include "d2gan/losses.hpp"
#include "d2gan/nn.hpp"

namespace d2gan {

/// What the batch objective needs to know about a model.
struct ModelSpec {
  ModelKind kind = ModelKind::kD2Alpha;
  double c1 = 1.0;
  double c2 = 1.0;
  std::optional<LossPair> pair;  // D2 family
  bool non_saturating = false;   // vanilla only

  static ModelSpec from_config(const TrainConfig& config);
  bool dual() const { return kind != ModelKind::kVanilla; }
};

/// Generator and discriminators. `d2` is unused by the vanilla model, whose
/// single discriminator is `d1` with a sigmoid output.
struct Players {
  Network g;
  Network d1;
  Network d2;
};

Players make_players(const TrainConfig& config);

struct ValueGrads {
  double value = 0.0;
  // The quantity the generator descends: equal to `value` except for the
  // non-saturating vanilla variant.
  double generator_objective = 0.0;
  Eigen::VectorXd g;
  Eigen::VectorXd d1;
  Eigen::VectorXd d2;

  bool finite() const;
};

struct GradRequest {
  bool discriminators = true;
  bool generator = true;
};

/// Batch-mean estimate of the value function and its gradients.
///
/// Vanilla:  mean_d log D(x) + mean_g log(1 - D(G z)), with the logs taken
///           through the sigmoid logit and floored at log 1e-12.
/// D2 family: c1 mean_d[-l1(D1 x)] + mean_g[l2(D1 G z) - 1]
///          + mean_d[l2(D2 x) - 1] + c2 mean_g[-l1(D2 G z)],
///           every loss input clamped into [1e-12, 1e12] with zero gradient
///           outside that range.
/// Gradients are with respect to each network's flat parameters; the
/// generator gradient flows through G(z) into every term that sees fakes.
ValueGrads batch_value_and_grads(const ModelSpec& spec, const Players& players, const Matrix& data,
                                 const Matrix& noise, GradRequest request = {});

/// The same empirical value with explicit fake samples instead of G(z).
double value_on_samples(const ModelSpec& spec, const Players& players, const Matrix& data, const Matrix& fakes);

}  // namespace d2gan
