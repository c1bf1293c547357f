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

#include "patchval/harness.h"

namespace patchval {

std::vector<TestCase> PrioritizeTests(const std::vector<TestCase>& tests,
                                      const std::set<std::string>& groups) {
  std::vector<TestCase> out;
  out.reserve(tests.size());
  for (const TestCase& t : tests) {
    if (t.failing) out.push_back(t);
  }
  for (const TestCase& t : tests) {
    if (!t.failing && groups.contains(t.group)) out.push_back(t);
  }
  for (const TestCase& t : tests) {
    if (!t.failing && !groups.contains(t.group)) out.push_back(t);
  }
  return out;
}

}  // namespace patchval
