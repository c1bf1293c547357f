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

#ifndef PATCHVAL_ENGINE_H_
#define PATCHVAL_ENGINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patchval/ast.h"
#include "patchval/program.h"
#include "patchval/value.h"

namespace patchval {

// Global bindings, including `$` instrumentation temporaries.
using DataState = std::map<std::string, Value, std::less<>>;

enum class ControlKind : std::uint8_t {
  kNormal,
  kBreak,
  kContinue,
  kReturn,
  kException,
};

struct ControlState {
  ControlKind kind = ControlKind::kNormal;
  // Payload of Return and Exception; Unit otherwise.
  Value value;

  static ControlState Normal() { return {}; }
  static ControlState Break() { return {ControlKind::kBreak, Value()}; }
  static ControlState Continue() { return {ControlKind::kContinue, Value()}; }
  static ControlState Return(Value v) {
    return {ControlKind::kReturn, std::move(v)};
  }
  static ControlState Exception(Value v) {
    return {ControlKind::kException, std::move(v)};
  }

  bool is_normal() const { return kind == ControlKind::kNormal; }
  std::string ToString() const;

  friend bool operator==(const ControlState&, const ControlState&) = default;
};

// Thrown when the semantic step budget is exhausted.
class TimeoutError : public std::runtime_error {
 public:
  TimeoutError() : std::runtime_error("step budget exhausted") {}
};

// Broken engine invariant (weaving bug, reentrant capture, ...).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class ChangeKind : std::uint8_t {
  kNormal,
  kBreak,
  kContinue,
  kReturn,
  kException,
  kTimeout,
};

const char* ChangeKindName(ChangeKind kind);

// State change of one statement execution: control effect plus the new values
// of the variables it modified, sorted by name.
struct CapturedChange {
  ChangeKind control = ChangeKind::kNormal;
  Value payload;
  std::vector<std::pair<std::string, Value>> writes;

  std::string ToString() const;

  friend bool operator==(const CapturedChange&, const CapturedChange&) =
      default;
  friend std::strong_ordering operator<=>(const CapturedChange& a,
                                          const CapturedChange& b);
};

struct TestOutcome {
  enum class Status : std::uint8_t { kPassed, kFailed };
  enum class Reason : std::uint8_t { kNone, kException, kTimeout };

  Status status = Status::kPassed;
  Reason reason = Reason::kNone;
  // Uncaught exception value when reason is kException.
  Value exception;
  // Semantic steps; equals the budget limit on timeout.
  std::int64_t steps = 0;

  bool passed() const { return status == Status::kPassed; }
  static TestOutcome Passed(std::int64_t steps);
  static TestOutcome Failed(Value exception, std::int64_t steps);
  static TestOutcome Timeout(std::int64_t limit);
  std::string ToString() const;

  friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

struct CaptureResult {
  CapturedChange change;
  // Semantic steps spent by the captured statement.
  std::int64_t semantic_steps = 0;
};

class Engine;

// Scheduler hook consulted at every woven site outside capture components.
class SiteHandler {
 public:
  virtual ~SiteHandler() = default;
  // Returns nullopt to execute the original statement inline, otherwise the
  // change to replay at the site.
  virtual std::optional<CapturedChange> OnSite(Engine& engine,
                                               const SiteStmt& site) = 0;
};

struct EngineOptions {
  int max_depth = 10000;
  std::uint64_t seed = 0;
};

class Engine {
 public:
  explicit Engine(const Program& program, EngineOptions options = {});

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const Program& program() const { return *program_; }
  // Swaps in another program; the caller keeps it alive.
  void set_program(const Program& program) { program_ = &program; }

  // Resets globals to their declared values and drops all frames.
  void ResetData();
  void Reseed(std::uint64_t seed);

  // Runs the entry method from freshly reset data.
  TestOutcome RunTest(std::string_view entry, std::int64_t limit);

  // Statement-level access (used by tests and the interceptor). Timeouts
  // propagate as TimeoutError.
  void PushFrame(const std::vector<std::pair<std::string, Value>>& bindings);
  void PopFrame();
  ControlState Execute(const Stmt& stmt);
  // Evaluates into `out`; returns Normal or the raised Exception.
  ControlState EvalControl(const Expr& expr, Value* out);

  // Runs the capture component of `patch_id` at `site` ("" selects the
  // original statement). The data state is left unchanged.
  CaptureResult Capture(const SiteStmt& site, std::string_view patch_id,
                        std::int64_t semantic_limit);
  // Applies a recorded change at `site`.
  ControlState Replay(const SiteStmt& site, const CapturedChange& change);

  // Patch executed at woven sites when no handler is installed.
  void set_selected_patch(std::string patch_id) {
    selected_patch_ = std::move(patch_id);
  }
  const std::string& selected_patch() const { return selected_patch_; }
  void set_site_handler(SiteHandler* handler) { handler_ = handler; }

  void set_semantic_limit(std::int64_t limit) { semantic_limit_ = limit; }
  std::int64_t semantic_limit() const { return semantic_limit_; }
  std::int64_t semantic_steps() const { return semantic_used_; }
  void set_semantic_steps(std::int64_t used) { semantic_used_ = used; }
  // All executed nodes, instrumentation included. Never reset by RunTest.
  std::int64_t interpreter_steps() const { return interpreter_steps_; }
  // Non-instrumentation nodes executed over the engine's lifetime, captures
  // included.
  std::int64_t total_semantic_steps() const { return total_semantic_steps_; }

  const DataState& globals() const { return globals_; }
  DataState& mutable_globals() { return globals_; }
  // Innermost frame bindings (empty outside of any call).
  std::vector<std::pair<std::string, Value>> frame() const;
  // Globals without `$` temporaries plus the innermost frame.
  DataState VisibleState() const;
  std::uint64_t StateHash() const;

 private:
  struct Frame {
    std::vector<std::pair<std::string, Value>> vars;
    Value* Find(std::string_view name);
  };

  void Charge(bool synthetic);
  Value Lookup(std::string_view name);
  void Assign(const std::string& name, Value v);
  Value EvalIn(const Expr& expr, bool synthetic);
  ControlState ExecCall(const Stmt& s, const CallStmt& call);
  ControlState ExecSite(const Stmt& s, const SiteStmt& site);
  void ClearChannel();

  const Program* program_;
  EngineOptions options_;
  std::mt19937_64 rng_;
  DataState globals_;
  std::vector<Frame> frames_;
  int user_depth_ = 0;

  std::string selected_patch_;
  SiteHandler* handler_ = nullptr;
  // Set while a capture component runs.
  std::optional<std::string> active_patch_;

  std::int64_t semantic_limit_ = INT64_MAX;
  std::int64_t semantic_used_ = 0;
  std::int64_t interpreter_steps_ = 0;
  std::int64_t total_semantic_steps_ = 0;
};

}  // namespace patchval

#endif  // PATCHVAL_ENGINE_H_
