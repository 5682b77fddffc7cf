// Serial reference path vs OpenMP path for every data-parallel kernel.
// Arg 0 selects Exec::serial, arg 1 Exec::parallel.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "casbox/analysis.hpp"
#include "casbox/boolfn.hpp"
#include "casbox/gf2n.hpp"
#include "casbox/rulesearch.hpp"
#include "casbox/sbox.hpp"

namespace {

using namespace casbox;

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

const SBox& selected_sbox() {
  static const SBox s = build_sbox(LayerSpec::eleven_layer(BooleanRule::from_number(kSelectedRuleNumber)));
  return s;
}

// Balanced rules from one 1/4096 slice of the rule space.
const std::vector<std::uint32_t>& balanced_slice() {
  static const std::vector<std::uint32_t> rules = [] {
    const search::Shard shard{4096, 1234};
    search::BalancedEnumerator e(shard.begin(), shard.end());
    std::vector<std::uint32_t> out;
    while (auto r = e.next()) out.push_back(*r);
    return out;
  }();
  return rules;
}

void bm_ddt(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ddt(selected_sbox(), exec_of(state)));
}

void bm_lat(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lat(selected_sbox(), exec_of(state)));
}

void bm_bct(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bct(selected_sbox(), exec_of(state)));
}

void bm_component_degrees(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(component_degrees(selected_sbox(), exec_of(state)));
}

void bm_interpolation(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(interpolation_coefficients(selected_sbox(), kModulus10, exec_of(state)));
}

void bm_stage_filter_ci1(benchmark::State& state) {
  const auto& rules = balanced_slice();
  for (auto _ : state)
    benchmark::DoNotOptimize(search::stage_filter(rules, search::Stage::ci1, nullptr, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rules.size()));
}

void bm_enumerate_shard(benchmark::State& state) {
  const search::Shard shard{4096, 1234};
  const std::vector<search::Stage> then = {search::Stage::ci1, search::Stage::nonlinear, search::Stage::sac};
  for (auto _ : state) benchmark::DoNotOptimize(search::enumerate_balanced_filtered(shard, then, exec_of(state)));
}

}  // namespace

BENCHMARK(bm_ddt)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_lat)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_bct)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_component_degrees)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_interpolation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_stage_filter_ci1)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_enumerate_shard)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
