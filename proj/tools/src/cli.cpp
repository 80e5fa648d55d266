#include <CLI/CLI.hpp>

#include "commands.hpp"

namespace d2gan::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual-discriminator alpha-GAN experiments and theory checks"};
  app.name("d2gan");
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train one model and write its run directory");
  t->add_option("--config", train.config_path, "JSON config file")->check(CLI::ExistingFile);
  t->add_option("--model", train.model, "vanilla | d2 | d2alpha | d2general");
  t->add_option("--alpha1", train.alpha1);
  t->add_option("--alpha2", train.alpha2);
  t->add_option("--c1", train.c1);
  t->add_option("--c2", train.c2);
  t->add_option("--lr", train.lr);
  t->add_option("--seed", train.seed);
  t->add_option("--epochs", train.epochs);
  t->add_option("--batch-size", train.batch_size);
  t->add_option("--noise-dim", train.noise_dim);
  t->add_option("--metric-every", train.metric_every);
  t->add_option("--snapshot-every", train.snapshot_every);
  t->add_flag("--non-saturating", train.non_saturating, "Non-saturating generator loss (vanilla only)");
  t->add_option("--run-id", train.run_id);
  t->add_option("--resume", train.resume, "Continue from a checkpoint file")->check(CLI::ExistingFile);
  t->add_option("--out", train.out, "Output root (default: $D2GAN_OUT or ./d2gan_out)");
  t->add_flag("--quiet", train.quiet);

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check the closed-form identities against brute force");
  v->add_option("--trials", verify.trials);
  v->add_option("--seed", verify.seed);
  v->add_option("--report", verify.report, "JSON report path (default: <out>/verify_report.json)");
  v->add_option("--out", verify.out);
  v->add_flag("--force-bug", verify.force_bug, "Perturb the closed-form f_c exponent by 1e-3 (sensitivity check)")
      ->group("");

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "Run every config of a manifest and rank the results");
  s->add_option("manifest", sweep.manifest, "Manifest JSON")->required();
  s->add_option("--jobs", sweep.jobs, "Concurrent runs");
  s->add_option("--out", sweep.out);
  s->add_option("--summary", sweep.summary, "Summary CSV path (default: <out>/summary.csv)");

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Emit figure-ready CSVs for finished runs");
  r->add_option("runs", report.runs, "Run ids (or run directories)")->required();
  r->add_option("--out", report.out);
  r->add_option("--dest", report.dest, "Directory for the CSVs (default: <out>/report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (t->parsed()) return cmd_train(train, out, err);
  if (v->parsed()) return cmd_verify(verify, out, err);
  if (s->parsed()) return cmd_sweep(sweep, out, err);
  return cmd_report(report, out, err);
}

}  // namespace d2gan::cli
