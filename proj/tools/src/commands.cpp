#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "d2gan/csv.hpp"
#include "d2gan/data.hpp"
#include "d2gan/errors.hpp"
#include "d2gan/verify_suite.hpp"

namespace d2gan::cli {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path resolve_out_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("D2GAN_OUT"); env != nullptr && *env != '\0') return env;
  return "d2gan_out";
}

namespace {

void apply_overrides(TrainConfig& c, const TrainArgs& a) {
  if (a.alpha1) c.alpha1 = *a.alpha1;
  if (a.alpha2) c.alpha2 = *a.alpha2;
  if (a.c1) c.c1 = *a.c1;
  if (a.c2) c.c2 = *a.c2;
  if (a.lr) c.lr = *a.lr;
  if (a.seed) c.seed = *a.seed;
  if (a.epochs) c.epochs = *a.epochs;
  if (a.batch_size) c.batch_size = *a.batch_size;
  if (a.noise_dim) c.noise_dim = *a.noise_dim;
  if (a.metric_every) c.metric_every = *a.metric_every;
  if (a.snapshot_every) c.snapshot_every = *a.snapshot_every;
  if (a.non_saturating) c.non_saturating = true;
  if (!a.run_id.empty()) c.run_id = a.run_id;
  c.adam.lr = c.lr;
}

std::string describe(const MetricRow& r) {
  std::ostringstream s;
  s << "epoch " << r.epoch << "  sym_kl " << r.sym_kl << "  wasserstein " << r.wasserstein << "  modes "
    << r.modes_covered << "  hq " << r.hq_fraction << "  value " << r.value_fn;
  return s.str();
}

}  // namespace

TrainConfig build_train_config(const TrainArgs& args) {
  TrainConfig c;
  if (!args.config_path.empty()) {
    c = load_config(args.config_path);
    if (args.model) {
      const ModelKind m = model_from_string(*args.model);
      if (m != c.model) {
        const TrainConfig p = preset(m);
        c.model = m;
        c.c1 = p.c1;
        c.c2 = p.c2;
        c.lr = p.lr;
      }
    }
  } else if (!args.resume.empty()) {
    c = load_checkpoint(args.resume).config;
  } else {
    c = preset(args.model ? model_from_string(*args.model) : ModelKind::kD2Alpha);
  }
  apply_overrides(c, args);
  c.validate();
  return c;
}

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const TrainConfig config = build_train_config(args);
    RunOptions options;
    if (!args.quiet) options.on_metrics = [&out](const MetricRow& r) { out << describe(r) << std::endl; };
    RunRecord rec;
    if (!args.resume.empty()) {
      rec = resume(args.resume, config, options);
    } else {
      rec = train(config, resolve_out_root(args.out) / "runs", options);
    }
    out << "run " << rec.config.run_id << " finished: " << rec.run_dir.string() << '\n';
    if (!rec.rows.empty()) out << "final " << describe(rec.rows.back()) << '\n';
    return 0;
  } catch (const ConstraintViolation& e) {
    err << "invalid config: " << e.what() << '\n';
  } catch (const TrainingDiverged& e) {
    err << "training aborted: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "train failed: " << e.what() << '\n';
  }
  return 1;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.trials < 1) throw std::invalid_argument("--trials must be positive");
    VerifyOptions opts;
    opts.seed = args.seed;
    opts.trials = args.trials;
    if (args.force_bug) opts.fc_exponent_shift = 1e-3;
    const VerifyReport report = run_verification(opts);

    const fs::path path = args.report.empty() ? resolve_out_root(args.out) / "verify_report.json" : fs::path(args.report);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << report.to_json().dump(2) << '\n';

    for (const auto& id : report.identities) {
      out << (id.pass ? "PASS " : "FAIL ") << id.name << "  max_error " << id.max_error << "  tol " << id.tolerance
          << "  trials " << id.trials << '\n';
    }
    out << "report: " << path.string() << '\n';
    if (report.all_pass()) return 0;
    err << "failing identities:";
    for (const auto& name : report.failing()) err << ' ' << name;
    err << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "verify failed: " << e.what() << '\n';
    return 1;
  }
}

namespace {

std::string value_label(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return format_double(v.get<double>());
  return v.dump();
}

json merged(const json& base, const json& patch) {
  json out = base.is_null() ? json::object() : base;
  for (const auto& [k, v] : patch.items()) out[k] = v;
  return out;
}

}  // namespace

ExperimentManifest parse_manifest(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("manifest must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (k != "out" && k != "base" && k != "grid" && k != "runs") {
      throw std::invalid_argument("unknown manifest key '" + k + "'");
    }
  }
  ExperimentManifest m;
  if (j.contains("out")) m.out = j.at("out").get<std::string>();
  const json base = j.value("base", json::object());

  std::vector<json> expanded;
  if (j.contains("grid")) {
    const json& grid = j.at("grid");
    if (!grid.is_object() || grid.empty()) throw std::invalid_argument("grid must be a non-empty object of arrays");
    std::vector<std::pair<json, std::string>> partial = {{base, ""}};
    for (const auto& [key, values] : grid.items()) {
      if (!values.is_array() || values.empty()) throw std::invalid_argument("grid entry '" + key + "' must be a non-empty array");
      std::vector<std::pair<json, std::string>> next;
      for (const auto& [cfg, tag] : partial) {
        for (const auto& v : values) {
          json c = cfg;
          c[key] = v;
          next.emplace_back(std::move(c), tag + "_" + key + "-" + value_label(v));
        }
      }
      partial = std::move(next);
    }
    for (auto& [cfg, tag] : partial) {
      if (!cfg.contains("run_id")) {
        cfg["run_id"] = cfg.value("model", std::string("d2alpha")) + tag;
      } else {
        cfg["run_id"] = cfg["run_id"].get<std::string>() + tag;
      }
      expanded.push_back(cfg);
    }
  }
  if (j.contains("runs")) {
    const json& runs = j.at("runs");
    if (!runs.is_array()) throw std::invalid_argument("runs must be an array");
    for (std::size_t i = 0; i < runs.size(); ++i) {
      json c = merged(base, runs[i]);
      if (!c.contains("run_id")) c["run_id"] = c.value("model", std::string("d2alpha")) + "_run" + std::to_string(i);
      expanded.push_back(std::move(c));
    }
  }
  if (expanded.empty()) throw std::invalid_argument("manifest defines no runs");

  std::set<std::string> ids;
  for (const auto& c : expanded) {
    TrainConfig cfg = TrainConfig::from_json(c);
    try {
      cfg.validate();
    } catch (const std::exception& e) {
      throw std::invalid_argument("run '" + cfg.run_id + "': " + e.what());
    }
    if (!ids.insert(cfg.run_id).second) throw std::invalid_argument("duplicate run_id '" + cfg.run_id + "'");
    m.runs.push_back(std::move(cfg));
  }
  return m;
}

void rank_sweep_results(std::vector<SweepResult>& results) {
  auto key = [](const SweepResult& r) {
    const double inf = std::numeric_limits<double>::infinity();
    if (!r.ok || !r.final_row) return std::tuple(1, inf, inf);
    const double w = std::isnan(r.final_row->wasserstein) ? inf : r.final_row->wasserstein;
    const double k = std::isnan(r.final_row->sym_kl) ? inf : r.final_row->sym_kl;
    return std::tuple(0, w, k);
  };
  std::stable_sort(results.begin(), results.end(),
                   [&](const SweepResult& a, const SweepResult& b) { return key(a) < key(b); });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentManifest manifest;
  try {
    if (args.jobs < 1) throw std::invalid_argument("--jobs must be positive");
    std::ifstream in(args.manifest);
    if (!in) throw std::runtime_error("cannot open manifest " + args.manifest);
    json j;
    in >> j;
    manifest = parse_manifest(j);
  } catch (const std::exception& e) {
    err << "invalid manifest: " << e.what() << '\n';
    return 1;
  }
  const fs::path root = resolve_out_root(args.out.empty() ? manifest.out : args.out);
  const fs::path runs_root = root / "runs";

  std::vector<SweepResult> results(manifest.runs.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i = next++; i < manifest.runs.size(); i = next++) {
      const TrainConfig& c = manifest.runs[i];
      SweepResult& r = results[i];
      r.run_id = c.run_id;
      r.model = to_string(c.model);
      try {
        const RunRecord rec = train(c, runs_root);
        r.ok = true;
        r.run_dir = rec.run_dir;
        if (!rec.rows.empty()) r.final_row = rec.rows.back();
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      std::lock_guard lock(io);
      out << (r.ok ? "done   " : "FAILED ") << r.run_id;
      if (!r.ok) out << ": " << r.error;
      out << std::endl;
    }
  };
  const int n_threads = std::min<int>(args.jobs, static_cast<int>(manifest.runs.size()));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  rank_sweep_results(results);
  CsvTable table{{"rank", "run_id", "model", "status", "final_epoch", "final_wasserstein", "final_sym_kl",
                  "modes_covered", "hq_fraction", "value_fn"},
                 {}};
  for (std::size_t i = 0; i < results.size(); ++i) {
    const SweepResult& r = results[i];
    std::vector<std::string> row = {std::to_string(i + 1), r.run_id, r.model, r.ok ? "ok" : "failed"};
    if (r.final_row) {
      row.push_back(std::to_string(r.final_row->epoch));
      row.push_back(format_double(r.final_row->wasserstein));
      row.push_back(format_double(r.final_row->sym_kl));
      row.push_back(std::to_string(r.final_row->modes_covered));
      row.push_back(format_double(r.final_row->hq_fraction));
      row.push_back(format_double(r.final_row->value_fn));
    } else {
      row.resize(table.header.size());
    }
    table.rows.push_back(std::move(row));
  }
  const fs::path summary = args.summary.empty() ? root / "summary.csv" : fs::path(args.summary);
  if (summary.has_parent_path()) fs::create_directories(summary.parent_path());
  write_csv(summary.string(), table);
  out << "summary: " << summary.string() << '\n';

  const auto failed = std::count_if(results.begin(), results.end(), [](const SweepResult& r) { return !r.ok; });
  if (failed > 0) {
    err << failed << " of " << results.size() << " runs failed:\n";
    for (const auto& r : results) {
      if (!r.ok) err << "  " << r.run_id << ": " << r.error << '\n';
    }
    return 1;
  }
  return 0;
}

namespace {

struct LoadedRun {
  std::string id;
  fs::path dir;
  TrainConfig config;
  std::vector<MetricRow> rows;
  std::vector<std::pair<int, fs::path>> snapshots;
};

LoadedRun load_run(const std::string& name, const fs::path& runs_root) {
  LoadedRun run;
  fs::path dir = runs_root / name;
  if (!fs::is_directory(dir) && fs::is_directory(name)) dir = name;
  if (!fs::is_directory(dir)) throw std::runtime_error("run '" + name + "' not found under " + runs_root.string());
  run.dir = dir;
  run.config = load_config((dir / "config.json").string());
  run.id = run.config.run_id.empty() ? dir.filename().string() : run.config.run_id;
  run.rows = read_metrics_csv(dir / "metrics.csv");
  static const std::regex pattern(R"(samples_epoch_(\d+)\.csv)");
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string file = entry.path().filename().string();
    if (std::regex_match(file, m, pattern)) run.snapshots.emplace_back(std::stoi(m[1].str()), entry.path());
  }
  std::sort(run.snapshots.begin(), run.snapshots.end());
  return run;
}

void write_curve(const fs::path& path, const std::vector<LoadedRun>& runs, double MetricRow::*field) {
  std::set<int> epochs;
  for (const auto& r : runs) {
    for (const auto& row : r.rows) epochs.insert(row.epoch);
  }
  CsvTable t{{"epoch"}, {}};
  for (const auto& r : runs) t.header.push_back(r.id);
  for (int e : epochs) {
    std::vector<std::string> line = {std::to_string(e)};
    for (const auto& r : runs) {
      const auto it = std::find_if(r.rows.begin(), r.rows.end(), [e](const MetricRow& m) { return m.epoch == e; });
      line.push_back(it == r.rows.end() ? std::string() : format_double((*it).*field));
    }
    t.rows.push_back(std::move(line));
  }
  write_csv(path.string(), t);
}

}  // namespace

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.runs.empty()) throw std::invalid_argument("report needs at least one run id");
    const fs::path root = resolve_out_root(args.out);
    std::vector<LoadedRun> runs;
    for (const auto& name : args.runs) runs.push_back(load_run(name, root / "runs"));
    const fs::path dest = args.dest.empty() ? root / "report" : fs::path(args.dest);
    fs::create_directories(dest);

    write_curve(dest / "fig1_symkl.csv", runs, &MetricRow::sym_kl);
    write_curve(dest / "fig1_wasserstein.csv", runs, &MetricRow::wasserstein);

    std::map<std::string, int> per_model;
    for (const auto& r : runs) ++per_model[to_string(r.config.model)];
    std::size_t files = 2;
    for (const auto& r : runs) {
      const std::string model = to_string(r.config.model);
      const std::string label = per_model[model] > 1 ? model + "_" + r.id : model;
      for (const auto& [epoch, path] : r.snapshots) {
        write_points_csv((dest / ("fig2_epoch_" + std::to_string(epoch) + "_" + label + ".csv")).string(),
                         read_points_csv(path.string()));
        ++files;
      }
    }
    const TrainConfig& first = runs.front().config;
    Rng rng = make_stream(first.seed, StreamId::kSnapshot);
    write_points_csv((dest / "fig2_real.csv").string(), sample_ring(first.ring, first.snapshot_size, rng));
    out << "wrote " << files + 1 << " files to " << dest.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "report failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace d2gan::cli
