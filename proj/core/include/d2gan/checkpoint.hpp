#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "d2gan/config.hpp"
#include "d2gan/nn.hpp"
#include "d2gan/rng.hpp"
#include "d2gan/value.hpp"

namespace d2gan {

/// One row of metrics.csv. NaN marks a metric that could not be computed
/// (e.g. symmetric KL on collapsed samples).
struct MetricRow {
  int epoch = 0;
  double sym_kl = 0.0;
  double wasserstein = 0.0;
  int modes_covered = 0;
  double hq_fraction = 0.0;
  double value_fn = 0.0;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

nlohmann::json to_json(const MetricRow& row);
MetricRow metric_row_from_json(const nlohmann::json& j);

/// Complete training state at the end of an epoch.
struct TrainState {
  TrainConfig config;
  int epoch = 0;
  Players players;
  AdamState adam_g;
  AdamState adam_d1;
  AdamState adam_d2;
  Rng::State data_rng;
  Rng::State noise_rng;
  int nonfinite_streak = 0;
  std::vector<MetricRow> rows;
  std::vector<int> snapshot_epochs;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary checkpoint layout (little-endian as written by the host):
///
///   8 bytes   magic "D2GANCK\0"
///   u32       format version
///   u64       header length H
///   H bytes   UTF-8 JSON header: config, config_hash, epoch, networks
///             (layer specs and payload offsets), Adam step/betas/offsets,
///             RNG words and Box-Muller spare, metric rows, snapshot epochs
///   u64       payload length P (number of doubles)
///   P*8 bytes raw doubles: network parameters and Adam moments
///   u64       FNV-1a 64 over every preceding byte
///
/// The file is written to a temporary name and renamed into place.
void save_checkpoint(const TrainState& state, const std::string& path);

/// Throws FormatError on a bad magic, version, length or checksum; nothing is
/// returned unless the whole file validates.
TrainState load_checkpoint(const std::string& path);

}  // namespace d2gan
