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

// Shared helpers for the test binaries.

#ifndef PATCHVAL_TESTS_SUPPORT_FIXTURES_H_
#define PATCHVAL_TESTS_SUPPORT_FIXTURES_H_

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "generators.h"
#include "patchval/engine.h"
#include "patchval/harness.h"
#include "patchval/interceptor.h"
#include "ref_interp.h"

namespace patchval::testing {

std::string DataPath(const std::string& relative);
std::string ReadText(const std::string& path);

// The worked example: program, patches P1-P5 and its single test.
struct RunningExample {
  Program program;
  std::vector<Patch> patches;
  std::vector<TestCase> tests;
};
RunningExample LoadRunningExample();

ProjectManifest ManifestFor(const std::string& source,
                            const std::vector<Patch>& patches,
                            const std::vector<TestCase>& tests,
                            const Config& config = {});

// Parses every patch, weaves and compiles. The returned object owns the woven
// program and an engine over it.
struct WovenFixture {
  Program base;
  MetaProgram meta;
  std::unique_ptr<Engine> engine;
};
std::unique_ptr<WovenFixture> WeaveAll(const Program& base,
                                       const std::vector<Patch>& patches,
                                       const ScopeOptions& scope = {});

// The dispatch site woven at `loc`.
const SiteStmt& SiteAt(const MetaProgram& meta, const std::string& loc);

// Patches whose edits all parse against `base`.
std::vector<Patch> ParseablePatches(const Program& base,
                                    const std::vector<Patch>& patches);

// Compilable patches the pipeline would schedule: no bypass reason and no
// site whose execution can reach a location the patch edits.
std::vector<std::string> EligiblePatches(const WovenFixture& w,
                                         const std::vector<Patch>& patches,
                                         const ScopeOptions& scope = {});

// Data state observed when execution reached a woven site.
struct SiteState {
  Location site;
  DataState globals;
  std::vector<std::pair<std::string, Value>> frame;
};

// Runs each test on the woven engine with original code at every site and
// records the state at each site visit, up to `cap` states.
std::vector<SiteState> ReachableSiteStates(WovenFixture& w,
                                           const std::vector<TestCase>& tests,
                                           std::int64_t limit,
                                           std::size_t cap);

// Capture then replay of one patch at a recorded state, compared with direct
// execution of the patched statement on the patched program.
struct ReplayCheck {
  bool skipped = false;  // the patch's capture reaches one of its own sites
  bool neutral = true;   // capture left the data state unchanged
  bool equivalent = true;
  bool timed_out = false;
  std::int64_t direct_steps = 0;  // interpreter steps, direct execution
  std::int64_t woven_steps = 0;   // interpreter steps, capture plus replay
  std::size_t scope_size = 0;
  std::string detail;
};
ReplayCheck CheckCaptureReplay(WovenFixture& w, const Program& applied,
                               const SiteState& state,
                               const std::string& patch_id,
                               std::int64_t limit);

std::vector<std::string> Ids(const std::vector<Patch>& patches);
std::map<std::string, std::string> StatusById(
    const std::vector<PatchVerdict>& verdicts);

// Locations edited by each patch.
std::map<std::string, std::set<Location>> EditedLocations(
    const std::vector<Patch>& patches);

struct TracedPatch {
  std::vector<TraceEvent> trace;
  std::set<Location> edits;
};
// Rounds needed to explore one test: one per distinct complete trace, plus one
// per trace prefix whose every continuation times out inside a patched
// statement (that round ends without a leaf).
int PredictedRounds(const std::vector<TracedPatch>& patches);

}  // namespace patchval::testing

#endif  // PATCHVAL_TESTS_SUPPORT_FIXTURES_H_
