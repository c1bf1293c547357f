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

#ifndef PATCHVAL_INTERCEPTOR_H_
#define PATCHVAL_INTERCEPTOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "patchval/ast.h"
#include "patchval/patch.h"
#include "patchval/program.h"

namespace patchval {

struct ChangeScope {
  // Variables the statement may modify: globals, plus frame names of the site
  // that the statement assigns.
  std::set<std::string> vars;
  bool calls_impure = false;
  bool oversized = false;
  bool uses_nondet = false;
  // Frame names of the site referenced by the statement, split by whether the
  // statement assigns them.
  std::vector<std::string> lifted_read;
  std::vector<std::string> lifted_written;
  // A frame name read by the statement also names a global a callee writes.
  bool shadow_conflict = false;
};

struct ScopeOptions {
  int max_vars = 8;
  // Value kinds a scope variable may hold (by its declared initializer).
  std::set<ValueKind> allowed_kinds = {ValueKind::kInt, ValueKind::kBool,
                                       ValueKind::kStr, ValueKind::kUnit};
};

// Names a statement references and assigns, not counting its own handler
// variables.
struct FreeNames {
  std::set<std::string> reads;
  std::set<std::string> writes;
  std::set<std::string> calls;
  bool nondet = false;
};
FreeNames CollectFreeNames(const Stmt& stmt);

// Globals a method may modify, transitively through its callees. Unknown
// callees make the result nullopt.
std::optional<std::set<std::string>> MethodWrites(const Program& program,
                                                  const std::string& method);

bool IsPure(const Program& program, const std::string& method);

// `frame_names` are the names bound in the frame at the statement's site.
ChangeScope AnalyzeChangeScope(const Program& program, const Stmt& stmt,
                               const std::vector<std::string>& frame_names = {},
                               const ScopeOptions& options = {});

// Reason the patch must skip the scheduler, or nullopt.
std::optional<std::string> BypassReason(const Program& base,
                                        const ChangeScope& scope,
                                        const ScopeOptions& options);

// Methods that executing `stmt` may enter, transitively.
std::set<std::string> ReachableMethods(const Program& program,
                                       const Stmt& stmt);

// True if executing `stmt` (located at `stmt.loc` in `program` when it is
// original code) can reach any of `targets`.
bool Reaches(const Program& program, const Stmt& stmt, bool is_original,
             const std::set<Location>& targets);

struct GeneratedCapture {
  std::string method;  // entry component name
  std::string source;  // both generated methods, IMP+ text
  // Call statement placed at the site (reserved syntax).
  std::string call;
};

GeneratedCapture GenerateCapture(const std::string& method_name,
                                 const Stmt& stmt, const ChangeScope& scope,
                                 bool in_loop);

// Replay block over the union of the scopes at a site.
std::string GenerateReplay(const std::vector<std::string>& vars, bool in_loop);

std::string SanitizeId(const std::string& id);
std::uint32_t LocationHash(const Location& loc);

struct WeaveOptions {
  ScopeOptions scope;
};

struct WovenPatch {
  std::string id;
  ParsedEdits edits;
};

struct MetaProgram {
  Program woven;
  // (patch id, location) -> capture component method.
  std::map<std::pair<std::string, Location>, std::string> component_index;
  // Generated method -> owning patch ("" for original-code components).
  std::map<std::string, std::string> method_owner;
  std::map<std::string, ChangeScope> scopes;  // keyed by generated method
  std::vector<Location> sites;
  std::map<std::string, std::set<Location>> patch_locations;
  std::set<std::string> uncompilable;
  std::map<std::string, std::string> uncompilable_reason;
  int compile_rounds = 0;
};

// Builds one program holding the base code, a dispatch site per patched
// location and the capture components of every patch.
MetaProgram Weave(const Program& base, const std::vector<WovenPatch>& patches,
                  const WeaveOptions& options = {});

// Two-round compilation. Throws InternalError if diagnostics remain outside
// patch components.
void CompileMeta(MetaProgram& meta);

// Removes the given patches' components and dispatch entries.
void RemovePatches(MetaProgram& meta, const std::set<std::string>& ids);

}  // namespace patchval

#endif  // PATCHVAL_INTERCEPTOR_H_
