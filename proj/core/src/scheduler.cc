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

#include "patchval/scheduler.h"

#include <algorithm>

namespace patchval {
namespace {

// Every capture at a node ran out of budget; the round has nothing to follow.
struct AbortRound {};

struct UnstableSignal {
  std::string reason;
};

class TreeHandler : public SiteHandler {
 public:
  TreeHandler(SttNode* root, std::int64_t limit,
              std::map<std::string, TestOutcome>* outcomes)
      : root_(root), limit_(limit), outcomes_(outcomes) {}

  void BeginRound(RoundTrace* trace) {
    cur_ = root_;
    trace_ = trace;
    offsets_.clear();
    for (const std::string& p : root_->patches) offsets_[p] = 0;
  }

  SttNode* cur() const { return cur_; }
  std::int64_t offset(const std::string& p) const { return offsets_.at(p); }

  std::optional<CapturedChange> OnSite(Engine& engine,
                                       const SiteStmt& site) override {
    const bool patched = std::any_of(
        cur_->patches.begin(), cur_->patches.end(),
        [&](const std::string& p) { return site.FindCapture(p) != nullptr; });
    if (!patched) return std::nullopt;
    trace_->sites.push_back(site.site);

    if (cur_->status == NodeStatus::kNotVisited) {
      Expand(engine, site);
    } else if (cur_->status == NodeStatus::kVisited) {
      if (cur_->site != site.site) {
        throw UnstableSignal{"expected site " + cur_->site->ToString() +
                             " but reached " + site.site.ToString()};
      }
      if (cur_->state_hash != engine.StateHash()) {
        throw UnstableSignal{"state differs from the recorded one at " +
                             site.site.ToString()};
      }
    } else {
      throw InternalError("reached a finished node at " + site.site.ToString());
    }

    for (auto& [change, child] : cur_->edges) {
      if (!child->HasNotVisited()) continue;
      for (const std::string& p : child->patches) {
        offsets_[p] += cur_->capture_cost.at(p);
      }
      cur_ = child.get();
      std::int64_t min_offset = INT64_MAX;
      for (const std::string& p : cur_->patches) {
        min_offset = std::min(min_offset, offsets_[p]);
      }
      engine.set_semantic_limit(limit_ - min_offset);
      return change;
    }
    throw InternalError("no unexplored child at " + site.site.ToString());
  }

 private:
  void Expand(Engine& engine, const SiteStmt& site) {
    cur_->status = NodeStatus::kVisited;
    cur_->site = site.site;
    cur_->state_hash = engine.StateHash();
    const std::int64_t shared = engine.semantic_steps();

    std::int64_t orig_limit = INT64_MIN;
    for (const std::string& p : cur_->patches) {
      if (site.FindCapture(p) == nullptr) {
        orig_limit = std::max(orig_limit, limit_ - shared - offsets_[p]);
      }
    }
    std::optional<CaptureResult> orig;
    for (const std::string& p : cur_->patches) {
      const std::int64_t limit_p = limit_ - shared - offsets_[p];
      CaptureResult r;
      if (site.FindCapture(p) != nullptr) {
        r = engine.Capture(site, p, limit_p);
        trace_->evaluated.push_back(p);
      } else {
        if (!orig) {
          orig = engine.Capture(site, "", orig_limit);
          trace_->evaluated.push_back("");
        }
        r = *orig;
        if (r.semantic_steps > limit_p) r.change.control = ChangeKind::kTimeout;
      }
      if (r.change.control == ChangeKind::kTimeout) {
        (*outcomes_)[p] = TestOutcome::Timeout(limit_);
        cur_->timed_out.push_back(p);
        continue;
      }
      auto& child = cur_->edges[r.change];
      if (!child) child = std::make_unique<SttNode>();
      child->patches.push_back(p);
      cur_->capture_cost[p] = r.semantic_steps;
    }
    if (cur_->edges.empty()) {
      cur_->status = NodeStatus::kTestFinished;
      throw AbortRound{};
    }
  }

  SttNode* root_;
  std::int64_t limit_;
  std::map<std::string, TestOutcome>* outcomes_;
  SttNode* cur_ = nullptr;
  RoundTrace* trace_ = nullptr;
  std::map<std::string, std::int64_t> offsets_;
};

nlohmann::json NodeToJson(const SttNode& node, int& next_id) {
  nlohmann::json j;
  j["id"] = next_id++;
  j["status"] = NodeStatusName(node.status);
  j["patches"] = node.patches;
  if (node.site) j["site"] = node.site->ToString();
  if (node.outcome) j["outcome"] = node.outcome->ToString();
  if (!node.timed_out.empty()) j["timedOut"] = node.timed_out;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [change, child] : node.edges) {
    edges.push_back({{"change", change.ToString()},
                     {"child", NodeToJson(*child, next_id)}});
  }
  j["edges"] = std::move(edges);
  return j;
}

}  // namespace

const char* NodeStatusName(NodeStatus status) {
  switch (status) {
    case NodeStatus::kNotVisited:
      return "not-visited";
    case NodeStatus::kVisited:
      return "visited";
    case NodeStatus::kTestFinished:
      return "test-finished";
  }
  return "?";
}

bool SttNode::HasNotVisited() const {
  if (status == NodeStatus::kNotVisited) return true;
  if (status == NodeStatus::kTestFinished) return false;
  for (const auto& [change, child] : edges) {
    if (child->HasNotVisited()) return true;
  }
  return false;
}

std::size_t SttNode::LeafCount() const {
  if (edges.empty()) return 1;
  std::size_t n = 0;
  for (const auto& [change, child] : edges) n += child->LeafCount();
  return n;
}

nlohmann::json TreeToJson(const SttNode& root) {
  int next_id = 0;
  return NodeToJson(root, next_id);
}

OneTestResult ScheduledValidateOneTest(const EngineForRound& engine_for_round,
                                       const std::vector<std::string>& patches,
                                       const std::string& entry,
                                       std::int64_t limit,
                                       const SchedulerOptions& options,
                                       std::int64_t& executions) {
  OneTestResult result;
  result.tree = std::make_unique<SttNode>();
  SttNode* root = result.tree.get();
  root->patches = patches;
  if (patches.empty()) return result;

  TreeHandler handler(root, limit, &result.outcomes);
  auto unstable = [&result](std::string reason) {
    result.unstable = true;
    result.unstable_reason = std::move(reason);
    result.outcomes.clear();
  };

  while (root->HasNotVisited()) {
    if (result.rounds >= static_cast<int>(patches.size())) {
      unstable("more rounds than patches");
      return result;
    }
    Engine& engine = engine_for_round();
    ++executions;
    engine.Reseed(options.unstable_seed
                      ? options.seed + static_cast<std::uint64_t>(executions)
                      : options.seed);
    RoundTrace& trace = result.traces.emplace_back();
    handler.BeginRound(&trace);
    engine.set_site_handler(&handler);
    ++result.rounds;
    TestOutcome outcome;
    bool aborted = false;
    try {
      outcome = engine.RunTest(entry, limit);
    } catch (AbortRound&) {
      aborted = true;
    } catch (UnstableSignal& u) {
      engine.set_site_handler(nullptr);
      unstable(std::move(u.reason));
      return result;
    } catch (...) {
      engine.set_site_handler(nullptr);
      throw;
    }
    engine.set_site_handler(nullptr);
    if (aborted) continue;
    trace.steps = outcome.steps;

    SttNode* cur = handler.cur();
    if (cur->status == NodeStatus::kVisited) {
      unstable("test finished at a visited node (" + cur->site->ToString() +
               ")");
      return result;
    }
    if (cur->status != NodeStatus::kNotVisited) {
      throw InternalError("round ended at a finished node");
    }
    cur->status = NodeStatus::kTestFinished;
    cur->outcome = outcome;
    for (const std::string& p : cur->patches) {
      if (outcome.reason == TestOutcome::Reason::kTimeout) {
        result.outcomes[p] = TestOutcome::Timeout(limit);
        continue;
      }
      const std::int64_t total = outcome.steps + handler.offset(p);
      if (total > limit) {
        result.outcomes[p] = TestOutcome::Timeout(limit);
      } else {
        TestOutcome o = outcome;
        o.steps = total;
        result.outcomes[p] = o;
      }
    }
  }
  return result;
}

SuiteResult ValidateSuite(const EngineForRound& engine_for_round,
                          const std::vector<std::string>& patches,
                          const std::vector<TestCase>& tests,
                          const TestBudgets& budgets,
                          const SchedulerOptions& options, bool dump_tree,
                          std::int64_t& executions) {
  SuiteResult suite;
  std::vector<std::string> survivors = patches;
  for (const std::string& p : patches) {
    suite.verdicts[p].patch_id = p;
  }
  for (const TestCase& t : tests) {
    if (survivors.empty()) break;
    OneTestResult r =
        ScheduledValidateOneTest(engine_for_round, survivors, t.entry,
                                 budgets.limit.at(t.entry), options, executions);
    suite.rounds += r.rounds;
    if (dump_tree) {
      suite.trees.push_back({{"test", t.name},
                             {"rounds", r.rounds},
                             {"unstable", r.unstable},
                             {"root", TreeToJson(*r.tree)}});
    }
    if (r.unstable) {
      ++suite.unstable_count;
      suite.unstable_tests.push_back(t.name + ": " + r.unstable_reason);
      for (const std::string& p : survivors) {
        suite.fallback.push_back(p);
        suite.verdicts.erase(p);
      }
      survivors.clear();
      break;
    }
    std::vector<std::string> next;
    for (const std::string& p : survivors) {
      PatchVerdict& v = suite.verdicts[p];
      const TestOutcome& o = r.outcomes.at(p);
      v.per_test[t.name] = o;
      ++v.test_executions;
      if (o.passed()) {
        next.push_back(p);
      } else {
        v.status = VerdictStatus::kImplausible;
      }
    }
    survivors = std::move(next);
  }
  return suite;
}

}  // namespace patchval
