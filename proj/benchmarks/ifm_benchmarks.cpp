#include "ifm/fock.hpp"
#include "ifm/interferometer.hpp"
#include "ifm/layout_dsl.hpp"

#include <benchmark/benchmark.h>

#include <fstream>
#include <numbers>
#include <sstream>

namespace {

void BM_VUnitary(benchmark::State& state) {
  const auto space = ifm::fock::build_space({"p", "Rp"}, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ifm::fock::v_unitary(space, {"p", "Rp"}, std::numbers::pi / 7));
  }
  state.SetLabel(std::to_string(space.dim()) + " states");
}
BENCHMARK(BM_VUnitary)->Arg(4)->Arg(6)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_RotationCheck(benchmark::State& state) {
  const auto space = ifm::fock::build_space({"p", "Rp"}, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ifm::fock::rotation_check(space, {"p", "Rp"}, 0.3));
  }
}
BENCHMARK(BM_RotationCheck)->Unit(benchmark::kMicrosecond);

void BM_PropagateAnalytic(benchmark::State& state) {
  const auto layout = ifm::mzi::with_obstruction(ifm::mzi::square_layout(), "lower", 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(ifm::mzi::propagate_analytic(layout));
}
BENCHMARK(BM_PropagateAnalytic);

void BM_RunShots(benchmark::State& state) {
  const auto layout = ifm::mzi::with_obstruction(ifm::mzi::square_layout(), "lower");
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ifm::mzi::run_shots(layout, 1'000'000, 1, threads));
  state.SetItemsProcessed(state.iterations() * 1'000'000);
}
BENCHMARK(BM_RunShots)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_ParseLayout(benchmark::State& state) {
  std::ifstream in(IFM_LAYOUT_DIR "/mzi_bomb.ifm");
  std::stringstream text;
  text << in.rdbuf();
  const std::string source = text.str();
  for (auto _ : state) benchmark::DoNotOptimize(ifm::dsl::parse_layout(source));
}
BENCHMARK(BM_ParseLayout);

}  // namespace

BENCHMARK_MAIN();
