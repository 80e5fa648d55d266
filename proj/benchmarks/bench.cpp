#include <benchmark/benchmark.h>

#include "d2gan/assignment.hpp"
#include "d2gan/data.hpp"
#include "d2gan/divergences.hpp"
#include "d2gan/metrics.hpp"
#include "d2gan/nn.hpp"
#include "d2gan/trainer.hpp"
#include "d2gan/value.hpp"

using namespace d2gan;

static void BM_GeneratorForward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  Network g = make_generator(256, 128);
  Rng rng(1);
  g.initialize(rng);
  const Matrix z = sample_noise(batch, 256, rng);
  for (auto _ : state) benchmark::DoNotOptimize(g.forward(z));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_GeneratorForward)->Arg(64)->Arg(512);

static void BM_GeneratorBackward(benchmark::State& state) {
  Network g = make_generator(256, 128);
  Rng rng(2);
  g.initialize(rng);
  const Matrix z = sample_noise(512, 256, rng);
  const auto tape = g.forward_tape(z);
  const Matrix up = Matrix::Ones(512, 2);
  for (auto _ : state) benchmark::DoNotOptimize(g.backward(tape, up));
}
BENCHMARK(BM_GeneratorBackward);

// One full value+gradient evaluation at the default batch, per model.
static void BM_ValueAndGrads(benchmark::State& state) {
  TrainConfig c = preset(static_cast<ModelKind>(state.range(0)));
  Players p = make_players(c);
  Rng rng(3);
  p.g.initialize(rng);
  p.d1.initialize(rng);
  if (c.model != ModelKind::kVanilla) p.d2.initialize(rng);
  const ModelSpec spec = ModelSpec::from_config(c);
  const Matrix x = sample_ring(c.ring, c.batch_size, rng);
  const Matrix z = sample_noise(c.batch_size, c.noise_dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(batch_value_and_grads(spec, p, x, z));
  state.SetLabel(to_string(c.model));
}
BENCHMARK(BM_ValueAndGrads)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_TrainerStep(benchmark::State& state) {
  Trainer t(preset(ModelKind::kD2Alpha));
  for (auto _ : state) t.step();
}
BENCHMARK(BM_TrainerStep)->Unit(benchmark::kMillisecond);

static void BM_Assignment(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  const Matrix a = sample_ring(RingSpec{}, n, rng);
  const Matrix b = sample_ring(RingSpec{}, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein(a, b));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Assignment)->RangeMultiplier(2)->Range(64, 512)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_FcGeneric(benchmark::State& state) {
  const LossPair pair = alpha_pair(0.6, 0.9);
  double u = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fc_generic(u, pair, 1.5));
    u = u < 3.0 ? u * 1.01 : 0.3;
  }
}
BENCHMARK(BM_FcGeneric);

static void BM_SymmetricKl(benchmark::State& state) {
  Rng rng(5);
  const RingSpec ring{};
  const Matrix g = sample_ring(ring, 512, rng);
  for (auto _ : state) {
    Rng r(6);
    benchmark::DoNotOptimize(symmetric_kl(g, ring, r, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_SymmetricKl)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
