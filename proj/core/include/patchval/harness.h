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

#ifndef PATCHVAL_HARNESS_H_
#define PATCHVAL_HARNESS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patchval/interceptor.h"
#include "patchval/patch.h"
#include "patchval/program.h"

namespace patchval {

inline constexpr const char* kTechniqueDedup = "dedup";
inline constexpr const char* kTechniqueSchemata = "schemata";
inline constexpr const char* kTechniquePrioritization = "prioritization";
inline constexpr const char* kTechniqueVirtualization = "virtualization";

// Failing tests first, then tests of a patched group, then the rest; stable
// within each tier.
std::vector<TestCase> PrioritizeTests(const std::vector<TestCase>& tests,
                                      const std::set<std::string>& groups);

struct Config {
  int workers = 1;
  ScopeOptions scope;
  BudgetConfig budget;
  std::uint64_t seed = 0;
  bool unstable_seed = false;
  std::set<std::string> disabled;
  // Validate bypassed and unstable patches with the plain method.
  bool fallback = true;
  int max_depth = 10000;
  bool compare_plain = false;
  bool dump_tree = false;
  bool dump_woven = false;
  // Fault locations whose patch set fails on purpose (containment checks).
  std::set<std::string> inject_crash;

  bool Enabled(const std::string& technique) const {
    return !disabled.contains(technique);
  }
};

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProjectManifest {
  std::vector<SourceFile> sources;
  std::vector<TestCase> tests;
  // Patches of all patch files, in file order.
  std::vector<Patch> patches;
  Config config;
};

// Relative paths resolve against `base_dir`.
ProjectManifest ManifestFromJson(const nlohmann::json& j,
                                 const std::string& base_dir);
ProjectManifest LoadManifest(const std::string& path);
Config ConfigFromJson(const nlohmann::json& j, Config config = {});
// Throws ManifestError if a test entry does not resolve.
Program LoadProgram(const ProjectManifest& manifest);

struct PatchSet {
  std::string fault_location;
  std::vector<Patch> patches;
};

// Groups patches by their smallest edit location, ordered by that key.
std::vector<PatchSet> GroupPatchSets(const std::vector<Patch>& patches);

struct SetCounters {
  std::int64_t rounds = 0;
  std::int64_t test_executions = 0;
  std::int64_t interpreter_steps = 0;
  std::int64_t semantic_steps = 0;
  std::int64_t compile_rounds = 0;
  std::int64_t parse_count = 0;
  std::int64_t fallback_count = 0;
  std::int64_t unstable_count = 0;
  std::int64_t bypass_count = 0;
};

struct SetResult {
  std::string fault_location;
  std::vector<PatchVerdict> verdicts;
  SetCounters counters;
  nlohmann::json trees = nlohmann::json::array();
  std::vector<std::string> unstable_tests;
  std::string woven;
  std::string error;
};

struct ValidationReport {
  std::string mode;
  std::vector<SetResult> sets;
  double wall_time_ms = 0;
  std::int64_t offline_steps = 0;
  std::optional<std::int64_t> plain_oracle_steps;
  std::vector<std::string> verdict_diff;

  std::int64_t TotalSteps() const;
  std::int64_t InterpreterSteps() const;
  std::vector<PatchVerdict> AllVerdicts() const;
};

ValidationReport RunValidation(const ProjectManifest& manifest);
// Plain validation of every patch (the oracle).
ValidationReport RunPlain(const ProjectManifest& manifest);

struct AblationRow {
  std::string name;
  ValidationReport report;
};
struct AblationResult {
  std::vector<AblationRow> rows;
  // Verdict disagreements between configurations (empty when sound).
  std::vector<std::string> divergence;
};
AblationResult AblationMatrix(const ProjectManifest& manifest);

nlohmann::json ReportToJson(const ValidationReport& report,
                            bool include_wall_time = true);
std::string ReportToCsv(const ValidationReport& report);
nlohmann::json AblationToJson(const AblationResult& result);
nlohmann::json VerdictToJson(const PatchVerdict& verdict);

// Runs `fn` on a thread with a stack large enough for deep IMP+ recursion.
void RunWithLargeStack(const std::function<void()>& fn,
                       std::size_t stack_bytes = std::size_t{256} << 20);

}  // namespace patchval

#endif  // PATCHVAL_HARNESS_H_
