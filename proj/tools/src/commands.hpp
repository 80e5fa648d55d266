#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "d2gan/config.hpp"
#include "d2gan/trainer.hpp"

namespace d2gan::cli {

/// Output root: the explicit flag, else $D2GAN_OUT, else ./d2gan_out.
std::filesystem::path resolve_out_root(const std::string& flag);

struct TrainArgs {
  std::string config_path;
  std::optional<std::string> model;
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  std::optional<double> c1;
  std::optional<double> c2;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<int> noise_dim;
  std::optional<int> metric_every;
  std::optional<int> snapshot_every;
  bool non_saturating = false;
  std::string run_id;
  std::string resume;
  std::string out;
  bool quiet = false;
};

/// Config file (or the model preset) with command-line overrides applied.
TrainConfig build_train_config(const TrainArgs& args);
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);

struct VerifyArgs {
  int trials = 100;
  std::uint64_t seed = 712;
  std::string report;  // default <out>/verify_report.json
  std::string out;
  bool force_bug = false;
};

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);

/// Runs to execute, each with a unique run_id.
struct ExperimentManifest {
  std::vector<TrainConfig> runs;
  std::string out;
};

/// Manifest JSON:
///   {"out": "...",                       optional output root
///    "base": {<config fields>},          shared defaults
///    "grid": {"alpha1": [0.4, 0.6]},     optional cartesian product over base
///    "runs": [{"run_id": "a", ...}]}     optional explicit runs over base
/// Throws std::invalid_argument when the expansion is empty, run ids repeat
/// or a config fails validation.
ExperimentManifest parse_manifest(const nlohmann::json& j);

struct SweepArgs {
  std::string manifest;
  int jobs = 1;
  std::string out;
  std::string summary;  // default <out>/summary.csv
};

struct SweepResult {
  std::string run_id;
  std::string model;
  bool ok = false;
  std::string error;
  std::optional<MetricRow> final_row;
  std::filesystem::path run_dir;
};

/// Ranked by final Wasserstein, then final symmetric KL; failed runs last.
void rank_sweep_results(std::vector<SweepResult>& results);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);

struct ReportArgs {
  std::vector<std::string> runs;
  std::string out;
  std::string dest;  // default <out>/report
};

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and in-process tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace d2gan::cli
