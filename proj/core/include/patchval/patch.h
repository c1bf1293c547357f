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

#ifndef PATCHVAL_PATCH_H_
#define PATCHVAL_PATCH_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "patchval/ast.h"
#include "patchval/engine.h"
#include "patchval/program.h"

namespace patchval {

struct Edit {
  // `<method>:<path>`; `var:<name>` denotes a global declaration edit, which
  // is outside the statement-level patch model.
  std::string location;
  std::string replacement;
};

struct Patch {
  std::string id;
  std::vector<Edit> edits;
};

// A patch that cannot be expressed as statement replacements.
class PatchLimitationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ParsedEdits = std::vector<std::pair<Location, StmtPtr>>;

// Parses every replacement at its location. Throws PatchLimitationError,
// NotFoundError (dangling location) or ParseError.
ParsedEdits ParseEdits(const Program& base, const Patch& patch);

// Returns `program` with the statements at the given locations replaced.
// Locations must not overlap.
Program ReplaceStatements(const Program& program, const ParsedEdits& edits);

Program ApplyPatch(const Program& base, const Patch& patch);

// Patch files hold one patch object or an array of them.
std::vector<Patch> PatchesFromJson(const nlohmann::json& j);
std::vector<Patch> LoadPatchFile(const std::string& path);
nlohmann::json PatchToJson(const Patch& patch);

struct TestCase {
  std::string name;
  std::string entry;
  bool failing = false;
  std::string group;
};

enum class VerdictStatus : std::uint8_t {
  kPlausible,
  kImplausible,
  kUncompilable,
  kFailsToValidate,
};

const char* VerdictStatusName(VerdictStatus status);

struct PatchVerdict {
  std::string patch_id;
  VerdictStatus status = VerdictStatus::kPlausible;
  // Outcomes of the tests that were run, keyed by test name.
  std::map<std::string, TestOutcome> per_test;
  bool via_fallback = false;
  // Test executions spent on this patch.
  std::int64_t test_executions = 0;
  std::string note;

  friend bool operator==(const PatchVerdict&, const PatchVerdict&) = default;
};

struct BudgetConfig {
  std::int64_t base = 5000;
  double factor = 1.5;
};

std::int64_t BudgetFor(std::int64_t original_steps, const BudgetConfig& config);

// Budget per test entry, measured by running the unpatched program.
struct TestBudgets {
  std::map<std::string, std::int64_t> limit;
  // Semantic steps spent measuring (offline cost).
  std::int64_t offline_steps = 0;
};

TestBudgets MeasureBudgets(const Program& base,
                           const std::vector<TestCase>& tests,
                           const BudgetConfig& config, std::uint64_t seed);

struct PlainOptions {
  std::uint64_t seed = 0;
  int max_depth = 10000;
};

struct PlainStats {
  std::int64_t test_executions = 0;
  std::int64_t semantic_steps = 0;
  std::int64_t interpreter_steps = 0;
  std::int64_t parse_count = 0;
  std::int64_t check_count = 0;
};

// Validates each patch independently: apply, check, then run tests in order
// until the first failure.
std::vector<PatchVerdict> PlainValidate(const Program& base,
                                        const std::vector<Patch>& patches,
                                        const std::vector<TestCase>& tests,
                                        const TestBudgets& budgets,
                                        const PlainOptions& options = {},
                                        PlainStats* stats = nullptr);

// Runs the tests on an already-patched, checked program.
PatchVerdict RunTestsOn(const Program& program, const std::string& patch_id,
                        const std::vector<TestCase>& tests,
                        const TestBudgets& budgets, const PlainOptions& options,
                        PlainStats* stats);

}  // namespace patchval

#endif  // PATCHVAL_PATCH_H_
