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

#include <algorithm>
#include <deque>
#include <type_traits>

#include "patchval/interceptor.h"

namespace patchval {
namespace {

void ExprNames(const Expr& e, const std::set<std::string>& bound,
               FreeNames& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          if (!bound.contains(n.name)) out.reads.insert(n.name);
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          ExprNames(*n.operand, bound, out);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          ExprNames(*n.lhs, bound, out);
          ExprNames(*n.rhs, bound, out);
        } else if constexpr (std::is_same_v<T, NondetExpr>) {
          out.nondet = true;
          ExprNames(*n.bound, bound, out);
        }
      },
      e.node);
}

void StmtNames(const Stmt& s, std::set<std::string>& bound, FreeNames& out) {
  auto write = [&](const std::string& target) {
    if (target != kIgnoreVar && !bound.contains(target)) {
      out.writes.insert(target);
    }
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BlockStmt>) {
          for (const auto& c : n.stmts) StmtNames(*c, bound, out);
        } else if constexpr (std::is_same_v<T, AssignStmt>) {
          ExprNames(*n.value, bound, out);
          write(n.target);
        } else if constexpr (std::is_same_v<T, CallStmt>) {
          for (const auto& a : n.args) ExprNames(*a, bound, out);
          out.calls.insert(n.method);
          write(n.target);
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          ExprNames(*n.cond, bound, out);
          StmtNames(*n.then_branch, bound, out);
          StmtNames(*n.else_branch, bound, out);
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          StmtNames(*n.body, bound, out);
          const bool fresh = bound.insert(n.var).second;
          StmtNames(*n.handler, bound, out);
          if (fresh) bound.erase(n.var);
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          ExprNames(*n.cond, bound, out);
          StmtNames(*n.body, bound, out);
        } else if constexpr (std::is_same_v<T, ReturnStmt> ||
                             std::is_same_v<T, ThrowStmt>) {
          ExprNames(*n.value, bound, out);
        } else if constexpr (std::is_same_v<T, SiteStmt>) {
          StmtNames(*n.original, bound, out);
        }
      },
      s.node);
}

struct Closure {
  std::set<std::string> methods;
  std::set<std::string> writes;
  bool unknown = false;
  bool nondet = false;
};

Closure CallClosure(const Program& program,
                    const std::set<std::string>& roots) {
  Closure c;
  std::deque<std::string> work(roots.begin(), roots.end());
  while (!work.empty()) {
    const std::string name = work.front();
    work.pop_front();
    if (!c.methods.insert(name).second) continue;
    const Method* m = program.FindMethod(name);
    if (m == nullptr) {
      c.unknown = true;
      continue;
    }
    std::set<std::string> bound(m->params.begin(), m->params.end());
    FreeNames fn;
    StmtNames(*m->body, bound, fn);
    c.nondet = c.nondet || fn.nondet;
    for (const std::string& w : fn.writes) {
      if (!IsReservedName(w)) c.writes.insert(w);
    }
    for (const std::string& callee : fn.calls) work.push_back(callee);
  }
  return c;
}

}  // namespace

FreeNames CollectFreeNames(const Stmt& stmt) {
  FreeNames out;
  std::set<std::string> bound;
  StmtNames(stmt, bound, out);
  return out;
}

std::optional<std::set<std::string>> MethodWrites(const Program& program,
                                                  const std::string& method) {
  const Closure c = CallClosure(program, {method});
  if (c.unknown) return std::nullopt;
  return c.writes;
}

bool IsPure(const Program& program, const std::string& method) {
  const auto writes = MethodWrites(program, method);
  return writes && writes->empty();
}

ChangeScope AnalyzeChangeScope(const Program& program, const Stmt& stmt,
                               const std::vector<std::string>& frame_names,
                               const ScopeOptions& options) {
  ChangeScope scope;
  const FreeNames fn = CollectFreeNames(stmt);
  const Closure callees = CallClosure(program, fn.calls);
  scope.calls_impure = callees.unknown || !callees.writes.empty();
  scope.uses_nondet = fn.nondet || callees.nondet;
  const std::set<std::string> frame(frame_names.begin(), frame_names.end());
  for (const std::string& name : frame_names) {
    if (fn.writes.contains(name)) {
      scope.lifted_written.push_back(name);
    } else if (fn.reads.contains(name)) {
      scope.lifted_read.push_back(name);
    }
  }
  for (const std::string& w : fn.writes) {
    if (IsReservedName(w)) continue;
    if (frame.contains(w) || program.FindGlobal(w) != nullptr) {
      scope.vars.insert(w);
    }
  }
  for (const std::string& w : callees.writes) {
    if (frame.contains(w)) scope.shadow_conflict = true;
    if (program.FindGlobal(w) != nullptr) scope.vars.insert(w);
  }
  scope.oversized = scope.calls_impure ||
                    static_cast<int>(scope.vars.size()) > options.max_vars;
  return scope;
}

std::optional<std::string> BypassReason(const Program& base,
                                        const ChangeScope& scope,
                                        const ScopeOptions& options) {
  if (scope.calls_impure) return "calls an impure method";
  if (static_cast<int>(scope.vars.size()) > options.max_vars) {
    return "change scope has " + std::to_string(scope.vars.size()) +
           " variables (limit " + std::to_string(options.max_vars) + ")";
  }
  for (const std::string& v : scope.vars) {
    const GlobalDecl* g = base.FindGlobal(v);
    if (g != nullptr && !options.allowed_kinds.contains(g->init.kind())) {
      return "variable " + v + " holds a " + ValueKindName(g->init.kind()) +
             " value outside the allow-list";
    }
  }
  if (scope.uses_nondet) return "uses nondet";
  if (scope.shadow_conflict) return "a callee writes a global shadowed at the site";
  return std::nullopt;
}

std::set<std::string> ReachableMethods(const Program& program,
                                       const Stmt& stmt) {
  Closure c = CallClosure(program, CollectFreeNames(stmt).calls);
  std::erase_if(c.methods, [&](const std::string& m) {
    return program.FindMethod(m) == nullptr;
  });
  return c.methods;
}

bool Reaches(const Program& program, const Stmt& stmt, bool is_original,
             const std::set<Location>& targets) {
  if (is_original) {
    for (const Location& t : targets) {
      if (stmt.loc.Contains(t)) return true;
    }
  }
  const std::set<std::string> methods = ReachableMethods(program, stmt);
  return std::any_of(targets.begin(), targets.end(), [&](const Location& t) {
    return methods.contains(t.method);
  });
}

}  // namespace patchval
