#include "d2gan/trainer.hpp"

#include <chrono>
#include <ctime>

#include "d2gan/csv.hpp"
#include "d2gan/data.hpp"
#include "d2gan/errors.hpp"
#include "d2gan/metrics.hpp"

namespace d2gan {

namespace fs = std::filesystem;

namespace {

constexpr int kMaxNonfiniteSteps = 10;

bool dual_model(const TrainConfig& c) { return c.model != ModelKind::kVanilla; }

TrainState initial_state(TrainConfig config) {
  config.validate();
  config.adam.lr = config.lr;
  TrainState s;
  s.players = make_players(config);
  Rng init = make_stream(config.seed, StreamId::kInit);
  s.players.g.initialize(init);
  s.players.d1.initialize(init);
  if (dual_model(config)) s.players.d2.initialize(init);
  s.adam_g = AdamState(s.players.g.param_count(), config.adam);
  s.adam_d1 = AdamState(s.players.d1.param_count(), config.adam);
  if (dual_model(config)) s.adam_d2 = AdamState(s.players.d2.param_count(), config.adam);
  s.data_rng = make_stream(config.seed, StreamId::kData).state();
  s.noise_rng = make_stream(config.seed, StreamId::kNoise).state();
  s.config = std::move(config);
  return s;
}

}  // namespace

Trainer::Trainer(TrainConfig config) : Trainer(initial_state(std::move(config))) {}

Trainer::Trainer(TrainState state) : state_(std::move(state)), spec_(ModelSpec::from_config(state_.config)) {}

void Trainer::note_step(bool finite, const char* which) {
  if (finite) {
    state_.nonfinite_streak = 0;
    return;
  }
  if (++state_.nonfinite_streak >= kMaxNonfiniteSteps) {
    throw TrainingDiverged(std::string("training diverged at epoch ") + std::to_string(state_.epoch + 1) + ": " +
                           std::to_string(state_.nonfinite_streak) +
                           " consecutive steps with a non-finite value or gradient (first in last step: " + which +
                           " update)");
  }
}

void Trainer::step(StepProbe* probe) {
  const TrainConfig& c = state_.config;
  Rng data_rng(0);
  Rng noise_rng(0);
  data_rng.set_state(state_.data_rng);
  noise_rng.set_state(state_.noise_rng);
  Players& p = state_.players;
  const GradRequest nothing{false, false};
  const char* bad = nullptr;  // first update of this step that went non-finite

  {
    const Matrix x = sample_ring(c.ring, c.batch_size, data_rng);
    const Matrix z = sample_noise(c.batch_size, c.noise_dim, noise_rng);
    const ValueGrads vg = batch_value_and_grads(spec_, p, x, z, {true, false});
    const bool ok = vg.finite();
    if (ok) {
      adam_step(state_.adam_d1, p.d1.params(), vg.d1, true);
      if (spec_.dual()) adam_step(state_.adam_d2, p.d2.params(), vg.d2, true);
    }
    if (probe) {
      probe->d_before = vg.value;
      probe->d_after = batch_value_and_grads(spec_, p, x, z, nothing).value;
    }
    if (!ok) bad = "discriminator";
  }
  {
    const Matrix x = sample_ring(c.ring, c.batch_size, data_rng);
    const Matrix z = sample_noise(c.batch_size, c.noise_dim, noise_rng);
    const ValueGrads vg = batch_value_and_grads(spec_, p, x, z, {false, true});
    const bool ok = vg.finite();
    if (ok) adam_step(state_.adam_g, p.g.params(), vg.g, false);
    if (probe) {
      probe->g_before = vg.value;
      probe->g_after = batch_value_and_grads(spec_, p, x, z, nothing).value;
    }
    if (!ok && !bad) bad = "generator";
  }
  note_step(bad == nullptr, bad);
  state_.data_rng = data_rng.state();
  state_.noise_rng = noise_rng.state();
  ++state_.epoch;
}

MetricRow Trainer::evaluate(int epoch) const {
  const TrainConfig& c = state_.config;
  Rng rng = make_epoch_stream(c.seed, static_cast<std::uint64_t>(epoch), StreamId::kMetrics);
  const Matrix real = sample_ring(c.ring, c.eval_size, rng);
  const Matrix fake = state_.players.g.forward(sample_noise(c.eval_size, c.noise_dim, rng));
  MetricRow row;
  row.epoch = epoch;
  try {
    row.sym_kl = symmetric_kl(fake, c.ring, rng, c.kl_draws);
  } catch (const DegenerateSamples&) {
    row.sym_kl = std::numeric_limits<double>::quiet_NaN();
  }
  if (fake.allFinite()) {
    row.wasserstein = wasserstein(real, fake);
  } else {
    row.wasserstein = std::numeric_limits<double>::quiet_NaN();
  }
  const ModeReport modes = mode_coverage(fake, c.ring);
  row.modes_covered = modes.modes_covered;
  row.hq_fraction = modes.high_quality_fraction;
  row.value_fn = value_on_samples(spec_, state_.players, real, fake);
  return row;
}

Matrix Trainer::snapshot(int n) const {
  Rng rng = make_epoch_stream(state_.config.seed, static_cast<std::uint64_t>(state_.epoch), StreamId::kSnapshot);
  return state_.players.g.forward(sample_noise(n, state_.config.noise_dim, rng));
}

std::string default_run_id(const TrainConfig& config) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%S", &tm);
  return to_string(config.model) + "_" + std::to_string(config.seed) + "_" + stamp;
}

void write_metrics_csv(const fs::path& path, const std::vector<MetricRow>& rows) {
  CsvTable t{{"epoch", "sym_kl", "wasserstein", "modes_covered", "hq_fraction", "value_fn"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.epoch), format_double(r.sym_kl), format_double(r.wasserstein),
                      std::to_string(r.modes_covered), format_double(r.hq_fraction), format_double(r.value_fn)});
  }
  write_csv(path.string(), t);
}

std::vector<MetricRow> read_metrics_csv(const fs::path& path) {
  const CsvTable t = read_csv(path.string());
  const std::size_t ce = t.column("epoch");
  const std::size_t ck = t.column("sym_kl");
  const std::size_t cw = t.column("wasserstein");
  const std::size_t cm = t.column("modes_covered");
  const std::size_t ch = t.column("hq_fraction");
  const std::size_t cv = t.column("value_fn");
  std::vector<MetricRow> rows;
  for (const auto& f : t.rows) {
    MetricRow r;
    try {
      r.epoch = std::stoi(f[ce]);
      r.modes_covered = std::stoi(f[cm]);
    } catch (const std::exception&) {
      throw FormatError("bad integer field in " + path.string());
    }
    r.sym_kl = parse_double(f[ck]);
    r.wasserstein = parse_double(f[cw]);
    r.hq_fraction = parse_double(f[ch]);
    r.value_fn = parse_double(f[cv]);
    rows.push_back(r);
  }
  return rows;
}

namespace {

fs::path checkpoint_path(const fs::path& run_dir, int epoch) {
  return run_dir / "ckpt" / ("epoch_" + std::to_string(epoch) + ".ckpt");
}

fs::path snapshot_path(const fs::path& run_dir, int epoch) {
  return run_dir / ("samples_epoch_" + std::to_string(epoch) + ".csv");
}

RunRecord run_loop(Trainer& trainer, const fs::path& run_dir, const RunOptions& options) {
  const TrainConfig& c = trainer.config();
  fs::create_directories(run_dir / "ckpt");
  save_config(c, (run_dir / "config.json").string());
  TrainState& s = trainer.state();
  while (trainer.epoch() < c.epochs) {
    trainer.step();
    const int e = trainer.epoch();
    const bool last = e == c.epochs;
    if (e % c.metric_every == 0 || last) {
      s.rows.push_back(trainer.evaluate(e));
      write_metrics_csv(run_dir / "metrics.csv", s.rows);
      if (options.on_metrics) options.on_metrics(s.rows.back());
    }
    if (e % c.snapshot_every == 0 || last) {
      write_points_csv(snapshot_path(run_dir, e).string(), trainer.snapshot(c.snapshot_size));
      s.snapshot_epochs.push_back(e);
      save_checkpoint(s, checkpoint_path(run_dir, e).string());
    }
  }
  write_metrics_csv(run_dir / "metrics.csv", s.rows);

  RunRecord rec;
  rec.config = c;
  rec.run_dir = run_dir;
  rec.rows = s.rows;
  for (int e : s.snapshot_epochs) {
    rec.snapshots.push_back(snapshot_path(run_dir, e));
    rec.checkpoints.push_back(checkpoint_path(run_dir, e));
  }
  return rec;
}

}  // namespace

RunRecord train(TrainConfig config, const fs::path& runs_root, const RunOptions& options) {
  if (config.run_id.empty()) config.run_id = default_run_id(config);
  config.validate();
  const fs::path run_dir = runs_root / config.run_id;
  if (fs::exists(run_dir) && !fs::is_empty(run_dir)) {
    throw std::invalid_argument("run directory " + run_dir.string() + " already exists and is not empty");
  }
  Trainer trainer(std::move(config));
  return run_loop(trainer, run_dir, options);
}

RunRecord resume(const fs::path& checkpoint, const TrainConfig& config, const RunOptions& options) {
  TrainState state = load_checkpoint(checkpoint.string());
  TrainConfig next = config;
  if (next.run_id.empty()) next.run_id = state.config.run_id;
  next.validate();
  if (next.hash() != state.config.hash()) {
    throw ConstraintViolation("config hash mismatch: checkpoint was written with config " + state.config.hash() +
                              ", resume requested " + next.hash() +
                              " (only epochs and reporting fields may change on resume)");
  }
  next.adam.lr = next.lr;
  state.config = std::move(next);
  const fs::path run_dir = fs::absolute(checkpoint).parent_path().parent_path();
  Trainer trainer(std::move(state));
  return run_loop(trainer, run_dir, options);
}

}  // namespace d2gan
