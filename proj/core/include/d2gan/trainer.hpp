#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "d2gan/checkpoint.hpp"
#include "d2gan/config.hpp"
#include "d2gan/value.hpp"

namespace d2gan {

/// Batch values around one epoch's updates, each measured on the batch the
/// update used.
struct StepProbe {
  double d_before = 0.0;
  double d_after = 0.0;
  double g_before = 0.0;
  double g_after = 0.0;
};

/// In-memory training loop. One epoch is a joint ascent step for the
/// discriminators on a fresh batch followed by a descent step for the
/// generator on another fresh batch.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);
  explicit Trainer(TrainState state);

  const TrainConfig& config() const { return state_.config; }
  const ModelSpec& spec() const { return spec_; }
  int epoch() const { return state_.epoch; }
  const Players& players() const { return state_.players; }
  Players& players() { return state_.players; }
  const TrainState& state() const { return state_; }
  TrainState& state() { return state_; }

  /// Runs one epoch. A step whose value or gradients are non-finite is
  /// skipped; ten such steps in a row throw TrainingDiverged. With `probe`
  /// the batch values before and after each update are filled in.
  void step(StepProbe* probe = nullptr);

  /// Metrics on a fresh evaluation set drawn from a stream keyed by epoch.
  MetricRow evaluate(int epoch) const;

  /// n generator samples from a stream keyed by the current epoch.
  Matrix snapshot(int n) const;

 private:
  void note_step(bool finite, const char* which);

  TrainState state_;
  ModelSpec spec_;
};

struct RunRecord {
  TrainConfig config;
  std::filesystem::path run_dir;
  std::vector<MetricRow> rows;
  std::vector<std::filesystem::path> snapshots;
  std::vector<std::filesystem::path> checkpoints;
};

struct RunOptions {
  // Called after each metric row is recorded.
  std::function<void(const MetricRow&)> on_metrics;
};

/// Default run identifier `<model>_<seed>_<YYYYmmddTHHMMSS>`.
std::string default_run_id(const TrainConfig& config);

/// Trains from scratch into `<runs_root>/<run_id>/`, writing config.json,
/// metrics.csv, samples_epoch_<k>.csv and ckpt/epoch_<k>.ckpt. A metric row
/// is recorded at every multiple of metric_every and at the final epoch;
/// snapshots and checkpoints at every multiple of snapshot_every and at the
/// final epoch.
RunRecord train(TrainConfig config, const std::filesystem::path& runs_root, const RunOptions& options = {});

/// Continues a run from a checkpoint up to `config.epochs`, writing into the
/// run directory that holds the checkpoint. `config` must hash equal to the
/// checkpointed config (only epochs and reporting fields may differ).
RunRecord resume(const std::filesystem::path& checkpoint, const TrainConfig& config,
                 const RunOptions& options = {});

/// Reads metrics.csv of a finished run.
std::vector<MetricRow> read_metrics_csv(const std::filesystem::path& path);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricRow>& rows);

}  // namespace d2gan
