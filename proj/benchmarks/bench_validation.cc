// Copyright 2026 The Patchval Authors
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

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "patchval/engine.h"
#include "patchval/harness.h"
#include "patchval/interceptor.h"

namespace patchval {
namespace {

// A test with a long prefix loop followed by one patched statement.
std::string Source(int loop) {
  return "var acc := 0; var k := 0; var r := 0;\n"
         "def prefix() { k := 0; while (k < " + std::to_string(loop) +
         ") { acc := acc + k; k := k + 1; } }\n"
         "def patched() { r := (k - k) + 0; }\n"
         "def test() { prefix(); patched(); assert(r = 0); }\n";
}

ProjectManifest Manifest(int patches, int classes, Config config) {
  ProjectManifest m;
  m.sources = {SourceFile{"bench.imp", Source(1000), ""}};
  m.tests = {TestCase{"test", "test", false, ""}};
  for (int i = 0; i < patches; ++i) {
    m.patches.push_back(Patch{"D" + std::to_string(i),
                              {Edit{"patched:0", "r := (k - k) + " +
                                                     std::to_string(i % classes) + ";"}}});
  }
  m.config = config;
  return m;
}

void BM_Interpreter(benchmark::State& state) {
  const Program p = Parse(Source(static_cast<int>(state.range(0))));
  Engine e(p);
  std::int64_t steps = 0;
  for (auto _ : state) steps += e.RunTest("test", INT64_MAX).steps;
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps),
                                                 benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Interpreter)->Arg(100)->Arg(10000);

// Validation runs on worker threads; wall time is the meaningful measure.
void BM_Scheduled(benchmark::State& state) {
  const ProjectManifest m = Manifest(static_cast<int>(state.range(0)), 4, Config{});
  for (auto _ : state) benchmark::DoNotOptimize(RunValidation(m));
}
BENCHMARK(BM_Scheduled)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Plain(benchmark::State& state) {
  const ProjectManifest m = Manifest(static_cast<int>(state.range(0)), 4, Config{});
  for (auto _ : state) benchmark::DoNotOptimize(RunPlain(m));
}
BENCHMARK(BM_Plain)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_WeaveAndCompile(benchmark::State& state) {
  const Program base = Parse(Source(10));
  std::vector<WovenPatch> patches;
  for (int i = 0; i < state.range(0); ++i) {
    patches.push_back(WovenPatch{
        "D" + std::to_string(i),
        ParseEdits(base, Patch{"D" + std::to_string(i),
                               {Edit{"patched:0", "r := " + std::to_string(i) + ";"}}})});
  }
  for (auto _ : state) {
    MetaProgram meta = Weave(base, patches);
    CompileMeta(meta);
    benchmark::DoNotOptimize(meta);
  }
}
BENCHMARK(BM_WeaveAndCompile)->Arg(1)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace patchval

BENCHMARK_MAIN();
