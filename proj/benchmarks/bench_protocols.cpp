#include <benchmark/benchmark.h>

#include <rbelab/protocols.hpp>

namespace {

using namespace rbelab;
using protocols::Protocol;

protocols::EveStrategy attack_for(Protocol p, double eps) {
  switch (p) {
    case Protocol::bb84:
    case Protocol::bb84_informed:
      return protocols::wm_attack_bb84(eps);
    case Protocol::dl04:
      return protocols::wm_attack_dl04(eps);
    case Protocol::rbe_qkd:
      return protocols::wm_attack_rbe(eps);
  }
  return protocols::EveStrategy::none();
}

void BM_GameTrial(benchmark::State& state) {
  protocols::ProtocolConfig config;
  config.protocol = static_cast<Protocol>(state.range(0));
  const auto eve = attack_for(config.protocol, 0.5);
  constexpr std::uint64_t batch = 10000;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(protocols::key_bit_guessing_game(config, eve, batch, Execution{++seed, 1}));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * batch));
  state.SetLabel(std::string(protocols::to_string(config.protocol)));
}
BENCHMARK(BM_GameTrial)
    ->Arg(static_cast<int>(Protocol::bb84))
    ->Arg(static_cast<int>(Protocol::bb84_informed))
    ->Arg(static_cast<int>(Protocol::dl04))
    ->Arg(static_cast<int>(Protocol::rbe_qkd))
    ->Unit(benchmark::kMillisecond);

void BM_HonestRun(benchmark::State& state) {
  protocols::ProtocolConfig config;
  config.protocol = Protocol::rbe_qkd;
  config.n = static_cast<std::uint64_t>(state.range(0));
  Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(protocols::run_protocol(config, protocols::EveStrategy::none(), rng));
  }
}
BENCHMARK(BM_HonestRun)->RangeMultiplier(4)->Range(16, 1024);

}  // namespace

BENCHMARK_MAIN();
