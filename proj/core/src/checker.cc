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

#include <set>
#include <type_traits>

#include "patchval/program.h"

namespace patchval {
namespace {

using NameSet = std::set<std::string, std::less<>>;

// Channel globals the engine writes before running a replay component.
bool SetByReplay(std::string_view name) {
  return name == "$ctl" || name == "$retval" || name == "$exc" ||
         name.starts_with("$has_") || name.starts_with("$chg_");
}

void CollectReserved(const Stmt& s, NameSet& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AssignStmt> ||
                      std::is_same_v<T, CallStmt>) {
          if (IsReservedName(n.target)) out.insert(n.target);
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          if (IsReservedName(n.var)) out.insert(n.var);
        } else if constexpr (std::is_same_v<T, SiteStmt>) {
          CollectReserved(*n.original, out);
          if (n.original_capture) CollectReserved(*n.original_capture, out);
          for (const auto& c : n.captures) CollectReserved(*c.call, out);
          if (n.replay) CollectReserved(*n.replay, out);
        }
      },
      s.node);
  for (const StmtPtr& c : StmtChildren(s)) CollectReserved(*c, out);
}

class MethodChecker {
 public:
  MethodChecker(const Program& program, const Method& method,
                const NameSet& reserved, std::vector<Diagnostic>& out)
      : program_(program), method_(method), reserved_(reserved), out_(out) {
    for (const GlobalDecl& g : program.globals()) scope_.insert(g.name);
    for (const std::string& p : method.params) scope_.insert(p);
  }

  void Run() { CheckStmt(*method_.body, 0); }

 private:
  void Report(DiagnosticKind kind, const Location& loc, std::string message) {
    out_.push_back(
        Diagnostic{method_.name, kind, loc.ToString(), std::move(message)});
  }

  bool Declared(const std::string& name) const {
    if (IsReservedName(name)) {
      return reserved_.contains(name) || SetByReplay(name);
    }
    return scope_.contains(name);
  }

  void CheckName(const std::string& name, const Location& loc) {
    if (name == kIgnoreVar) return;
    if (!Declared(name)) {
      Report(DiagnosticKind::kUndeclaredVariable, loc,
             "variable '" + name + "' is not declared");
    }
  }

  void CheckExpr(const Expr& e, const Location& loc) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarExpr>) {
            CheckName(n.name, loc);
          } else if constexpr (std::is_same_v<T, UnaryExpr>) {
            CheckExpr(*n.operand, loc);
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            CheckExpr(*n.lhs, loc);
            CheckExpr(*n.rhs, loc);
          } else if constexpr (std::is_same_v<T, NondetExpr>) {
            CheckExpr(*n.bound, loc);
          }
        },
        e.node);
  }

  void CheckStmt(const Stmt& s, int loop_depth) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, BlockStmt>) {
            for (const auto& c : n.stmts) CheckStmt(*c, loop_depth);
          } else if constexpr (std::is_same_v<T, AssignStmt>) {
            CheckExpr(*n.value, s.loc);
            CheckName(n.target, s.loc);
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            for (const auto& a : n.args) CheckExpr(*a, s.loc);
            CheckName(n.target, s.loc);
            const Method* callee = program_.FindMethod(n.method);
            if (callee == nullptr) {
              Report(DiagnosticKind::kUndefinedMethod, s.loc,
                     "method '" + n.method + "' is not defined");
            } else if (callee->params.size() != n.args.size()) {
              Report(DiagnosticKind::kArityMismatch, s.loc,
                     "method '" + n.method + "' expects " +
                         std::to_string(callee->params.size()) +
                         " arguments, got " + std::to_string(n.args.size()));
            }
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            CheckExpr(*n.cond, s.loc);
            CheckStmt(*n.then_branch, loop_depth);
            CheckStmt(*n.else_branch, loop_depth);
          } else if constexpr (std::is_same_v<T, TryStmt>) {
            CheckStmt(*n.body, loop_depth);
            const bool fresh = scope_.insert(n.var).second;
            CheckStmt(*n.handler, loop_depth);
            if (fresh) scope_.erase(n.var);
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            CheckExpr(*n.cond, s.loc);
            CheckStmt(*n.body, loop_depth + 1);
          } else if constexpr (std::is_same_v<T, BreakStmt>) {
            if (loop_depth == 0) {
              Report(DiagnosticKind::kBreakOutsideLoop, s.loc,
                     "'break' outside of a loop");
            }
          } else if constexpr (std::is_same_v<T, ContinueStmt>) {
            if (loop_depth == 0) {
              Report(DiagnosticKind::kContinueOutsideLoop, s.loc,
                     "'continue' outside of a loop");
            }
          } else if constexpr (std::is_same_v<T, ReturnStmt> ||
                               std::is_same_v<T, ThrowStmt>) {
            CheckExpr(*n.value, s.loc);
          } else if constexpr (std::is_same_v<T, SiteStmt>) {
            CheckStmt(*n.original, loop_depth);
            if (n.original_capture) CheckStmt(*n.original_capture, loop_depth);
            for (const auto& c : n.captures) CheckStmt(*c.call, loop_depth);
            if (n.replay) CheckStmt(*n.replay, loop_depth);
          }
        },
        s.node);
  }

  const Program& program_;
  const Method& method_;
  const NameSet& reserved_;
  std::vector<Diagnostic>& out_;
  NameSet scope_;
};

}  // namespace

std::vector<Diagnostic> StaticCheckMethods(
    const Program& program, const std::vector<std::string>& methods) {
  NameSet reserved;
  for (const Method& m : program.methods()) CollectReserved(*m.body, reserved);
  std::vector<Diagnostic> out;
  for (const std::string& name : methods) {
    const Method* m = program.FindMethod(name);
    if (m == nullptr) continue;
    MethodChecker(program, *m, reserved, out).Run();
  }
  return out;
}

std::vector<Diagnostic> StaticCheck(const Program& program) {
  std::vector<std::string> names;
  for (const Method& m : program.methods()) names.push_back(m.name);
  return StaticCheckMethods(program, names);
}

}  // namespace patchval
