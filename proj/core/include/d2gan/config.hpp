#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "d2gan/data.hpp"
#include "d2gan/losses.hpp"
#include "d2gan/nn.hpp"

namespace d2gan {

enum class ModelKind { kVanilla, kD2, kD2Alpha, kD2General };

std::string to_string(ModelKind m);
ModelKind model_from_string(const std::string& name);

/// Everything that determines a training run.
///
/// JSON keys match the field names; `adam` and `ring` are nested objects and
/// `losses` is a loss-pair descriptor (only read for d2general). Unknown keys
/// are rejected so that typos do not silently fall back to defaults.
struct TrainConfig {
  ModelKind model = ModelKind::kD2Alpha;
  double alpha1 = 0.6;
  double alpha2 = 0.9;
  nlohmann::json losses;  // d2general only
  double c1 = 0.01;
  double c2 = 1.5;
  double lr = 1e-3;
  int batch_size = 512;
  int epochs = 25000;
  std::uint64_t seed = 712;
  int noise_dim = 256;
  int hidden = 128;
  int snapshot_every = 5000;
  int snapshot_size = 1000;
  int metric_every = 500;
  int eval_size = 512;
  int kl_draws = 10000;
  bool non_saturating = false;  // vanilla only
  AdamConfig adam{};            // adam.lr is ignored in favour of `lr`
  RingSpec ring{};
  std::string run_id;           // empty: assigned when the run starts

  /// Throws ConstraintViolation for alpha2 <= alpha1 on d2alpha and
  /// std::invalid_argument for any other bad field.
  void validate() const;

  /// The loss pair used by the D2-family models.
  LossPair loss_pair() const;

  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);

  /// Hex FNV-1a digest over the canonical JSON of every field that changes
  /// the training trajectory (all but epochs, run_id and reporting sizes).
  std::string hash() const;
};

/// Reference hyperparameters of the ring experiment: d2alpha (alpha 0.6/0.9, c 0.01/1.5,
/// lr 1e-3), d2 (c 1.2/1.0, lr 2e-4), vanilla (lr 1e-3), d2general with the
/// d2 losses and constants. All use seed 712, batch 512 and 25k epochs.
TrainConfig preset(ModelKind model);

TrainConfig load_config(const std::string& path);
void save_config(const TrainConfig& config, const std::string& path);

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace d2gan
