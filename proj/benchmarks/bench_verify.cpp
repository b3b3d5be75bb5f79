// Copyright 2026 The HEC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "hec/corpus.hpp"
#include "hec/frontend.hpp"
#include "hec/runner.hpp"
#include "hec/static_rules.hpp"

namespace {

hec::Function gemm(int64_t n, hec::LoopTransform t = {}) {
  return hec::parse_module_text(hec::kernel_source(hec::Kernel::Gemm, n, t)).functions.at(0);
}

// Full verification of gemm against its unrolled form; the factor is the argument.
void BM_GemmUnroll(benchmark::State& state) {
  hec::Function a = gemm(64);
  hec::Function b = gemm(64, {hec::LoopTransform::Kind::Unroll, state.range(0)});
  size_t classes = 0;
  for (auto _ : state) {
    auto r = hec::verify_functions(a, b);
    if (r.verdict.kind != hec::VerdictKind::Equivalent) state.SkipWithError("not equivalent");
    classes = r.e_classes;
  }
  state.counters["e_classes"] = static_cast<double>(classes);
}
BENCHMARK(BM_GemmUnroll)->RangeMultiplier(2)->Range(2, 64)->Unit(benchmark::kMillisecond);

void BM_GemmTile(benchmark::State& state) {
  hec::Function a = gemm(64);
  hec::Function b = gemm(64, {hec::LoopTransform::Kind::Tile, state.range(0)});
  for (auto _ : state) benchmark::DoNotOptimize(hec::verify_functions(a, b));
}
BENCHMARK(BM_GemmTile)->RangeMultiplier(2)->Range(2, 16)->Unit(benchmark::kMillisecond);

// Static saturation over one program whose body repeats the same datapath.
void BM_StaticSaturation(benchmark::State& state) {
  hec::Function f = gemm(16, {hec::LoopTransform::Kind::Unroll, state.range(0)});
  hec::Term t = hec::graph_to_term(hec::build_graph(f));
  auto rules = hec::to_rewrites(hec::default_ruleset());
  for (auto _ : state) {
    hec::EGraph g;
    g.set_folder(hec::fold_constant);
    g.add(t);
    benchmark::DoNotOptimize(g.saturate(rules, {}));
  }
}
BENCHMARK(BM_StaticSaturation)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SoundnessGate(benchmark::State& state) {
  std::vector<std::string> types;
  for (int w = 1; w <= 8; ++w) types.push_back("i" + std::to_string(w));
  auto rules = hec::default_ruleset(types);
  for (auto _ : state)
    for (const auto& r : rules) benchmark::DoNotOptimize(hec::check_rule_sound(r));
}
BENCHMARK(BM_SoundnessGate)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
