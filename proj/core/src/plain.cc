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

#include "patchval/patch.h"

namespace patchval {

PatchVerdict RunTestsOn(const Program& program, const std::string& patch_id,
                        const std::vector<TestCase>& tests,
                        const TestBudgets& budgets, const PlainOptions& options,
                        PlainStats* stats) {
  PatchVerdict verdict;
  verdict.patch_id = patch_id;
  Engine engine(program, EngineOptions{options.max_depth, options.seed});
  for (const TestCase& t : tests) {
    engine.Reseed(options.seed);
    const TestOutcome o = engine.RunTest(t.entry, budgets.limit.at(t.entry));
    ++verdict.test_executions;
    if (stats != nullptr) {
      ++stats->test_executions;
      stats->semantic_steps += o.steps;
    }
    verdict.per_test[t.name] = o;
    if (!o.passed()) {
      verdict.status = VerdictStatus::kImplausible;
      break;
    }
  }
  if (stats != nullptr) stats->interpreter_steps += engine.interpreter_steps();
  return verdict;
}

std::vector<PatchVerdict> PlainValidate(const Program& base,
                                        const std::vector<Patch>& patches,
                                        const std::vector<TestCase>& tests,
                                        const TestBudgets& budgets,
                                        const PlainOptions& options,
                                        PlainStats* stats) {
  std::vector<PatchVerdict> out;
  out.reserve(patches.size());
  for (const Patch& p : patches) {
    PatchVerdict v;
    v.patch_id = p.id;
    Program patched;
    try {
      if (stats != nullptr) ++stats->parse_count;
      patched = ApplyPatch(base, p);
    } catch (const PatchLimitationError& e) {
      v.status = VerdictStatus::kFailsToValidate;
      v.note = e.what();
      out.push_back(std::move(v));
      continue;
    } catch (const ParseError& e) {
      v.status = VerdictStatus::kUncompilable;
      v.note = e.what();
      out.push_back(std::move(v));
      continue;
    } catch (const NotFoundError& e) {
      v.status = VerdictStatus::kUncompilable;
      v.note = e.what();
      out.push_back(std::move(v));
      continue;
    }
    if (stats != nullptr) ++stats->check_count;
    const std::vector<Diagnostic> diags = StaticCheck(patched);
    if (!diags.empty()) {
      v.status = VerdictStatus::kUncompilable;
      v.note = diags.front().ToString();
      out.push_back(std::move(v));
      continue;
    }
    out.push_back(RunTestsOn(patched, p.id, tests, budgets, options, stats));
  }
  return out;
}

}  // namespace patchval
