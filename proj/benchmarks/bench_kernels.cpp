#include <benchmark/benchmark.h>

#include <numbers>

#include <rbelab/entangle.hpp>
#include <rbelab/rbe.hpp>
#include <rbelab/weakmeas.hpp>

namespace {

using namespace rbelab;

void BM_EncryptDecrypt(benchmark::State& state) {
  Rng rng(1);
  const auto space = rbe::KeySpace::continuous();
  for (auto _ : state) {
    const auto key = rbe::gen(space, rng);
    const int bit = rng.bit();
    benchmark::DoNotOptimize(rbe::dec(rbe::enc(bit, key), key, rng));
  }
}
BENCHMARK(BM_EncryptDecrypt);

void BM_EvalCnNot(benchmark::State& state) {
  const auto controls_count = static_cast<std::size_t>(state.range(0));
  const std::vector<int> controls(controls_count, 1);
  const auto c = rbe::enc(0, rbe::RbeKey(0.7, rbe::PhaseSign::plus));
  for (auto _ : state) benchmark::DoNotOptimize(rbe::eval_cn_not(controls, c));
}
BENCHMARK(BM_EvalCnNot)->DenseRange(1, 4);

void BM_DensityGap(benchmark::State& state) {
  const auto space = rbe::KeySpace::discrete(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rbe::density_gap(space));
}
BENCHMARK(BM_DensityGap)->Arg(64)->Arg(4096);

void BM_WeakBranches(benchmark::State& state) {
  const auto s = StateVector::normalized({0.6, Complex(0.0, 0.8)});
  const weakmeas::WeakStrength strength(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(weakmeas::weak_branches(s, 0, strength));
}
BENCHMARK(BM_WeakBranches);

void BM_MagicSquarePlay(benchmark::State& state) {
  const auto resource = entangle::FourQubitResource::canonical();
  Rng rng(2);
  for (auto _ : state) {
    const int i = 1 + static_cast<int>(rng.below(3));
    const int j = 1 + static_cast<int>(rng.below(3));
    benchmark::DoNotOptimize(entangle::magic_square_play(resource, i, j, rng));
  }
}
BENCHMARK(BM_MagicSquarePlay);

void BM_MagicSquareClassicalBound(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(entangle::magic_square_classical_bound());
}
BENCHMARK(BM_MagicSquareClassicalBound)->Unit(benchmark::kMillisecond);

}  // namespace
