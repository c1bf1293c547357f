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

#ifndef PATCHVAL_SCHEDULER_H_
#define PATCHVAL_SCHEDULER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patchval/engine.h"
#include "patchval/interceptor.h"
#include "patchval/patch.h"

namespace patchval {

enum class NodeStatus : std::uint8_t { kNotVisited, kVisited, kTestFinished };

const char* NodeStatusName(NodeStatus status);

struct SttNode {
  NodeStatus status = NodeStatus::kNotVisited;
  std::vector<std::string> patches;
  std::map<CapturedChange, std::unique_ptr<SttNode>> edges;
  // Site and data-state hash seen on the first visit.
  std::optional<Location> site;
  std::uint64_t state_hash = 0;
  // Shared outcome of a finished leaf (steps exclude capture costs).
  std::optional<TestOutcome> outcome;
  // Semantic steps each patch's capture took at this node.
  std::map<std::string, std::int64_t> capture_cost;
  // Patches whose capture ran out of budget here.
  std::vector<std::string> timed_out;

  bool HasNotVisited() const;
  std::size_t LeafCount() const;
};

nlohmann::json TreeToJson(const SttNode& root);

struct SchedulerOptions {
  std::uint64_t seed = 0;
  // Vary the seed per test execution (exposes nondeterministic tests).
  bool unstable_seed = false;
};

struct RoundTrace {
  std::vector<Location> sites;
  std::vector<std::string> evaluated;
  std::int64_t steps = 0;
};

struct OneTestResult {
  std::map<std::string, TestOutcome> outcomes;
  int rounds = 0;
  bool unstable = false;
  std::string unstable_reason;
  std::vector<RoundTrace> traces;
  std::unique_ptr<SttNode> tree;
};

// Called before every round; returns the engine to run it on (lets callers
// reboot between rounds).
using EngineForRound = std::function<Engine&()>;

// Explores the state-transition tree of one test over the given patches.
// `executions` counts test executions across calls and drives per-execution
// seeds.
OneTestResult ScheduledValidateOneTest(const EngineForRound& engine_for_round,
                                       const std::vector<std::string>& patches,
                                       const std::string& entry,
                                       std::int64_t limit,
                                       const SchedulerOptions& options,
                                       std::int64_t& executions);

struct SuiteResult {
  std::map<std::string, PatchVerdict> verdicts;
  // Patches to validate with the plain method instead.
  std::vector<std::string> fallback;
  std::int64_t rounds = 0;
  int unstable_count = 0;
  std::vector<std::string> unstable_tests;
  nlohmann::json trees = nlohmann::json::array();
};

// Runs the tests in order; each test only sees the patches that passed all
// previous ones.
SuiteResult ValidateSuite(const EngineForRound& engine_for_round,
                          const std::vector<std::string>& patches,
                          const std::vector<TestCase>& tests,
                          const TestBudgets& budgets,
                          const SchedulerOptions& options, bool dump_tree,
                          std::int64_t& executions);

}  // namespace patchval

#endif  // PATCHVAL_SCHEDULER_H_
