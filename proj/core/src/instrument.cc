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

#include <sstream>
#include <type_traits>

#include "patchval/interceptor.h"

namespace patchval {
namespace {

using RenameMap = std::map<std::string, std::string>;

ExprPtr RenameExpr(const ExprPtr& e, const RenameMap& names) {
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          const auto it = names.find(n.name);
          return it == names.end() ? e : MakeVar(it->second);
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          return MakeUnary(n.op, RenameExpr(n.operand, names));
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          return MakeBinary(n.op, RenameExpr(n.lhs, names),
                            RenameExpr(n.rhs, names));
        } else if constexpr (std::is_same_v<T, NondetExpr>) {
          return MakeNondet(RenameExpr(n.bound, names));
        } else {
          return e;
        }
      },
      e->node);
}

std::string RenameName(const std::string& name, const RenameMap& names) {
  const auto it = names.find(name);
  return it == names.end() ? name : it->second;
}

// Renames free occurrences; handler variables shadow the map.
StmtPtr RenameStmt(const StmtPtr& s, const RenameMap& names) {
  if (names.empty()) return s;
  auto out = std::make_shared<Stmt>(*s);
  std::visit(
      [&](auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BlockStmt>) {
          for (auto& c : n.stmts) c = RenameStmt(c, names);
        } else if constexpr (std::is_same_v<T, AssignStmt>) {
          n.value = RenameExpr(n.value, names);
          n.target = RenameName(n.target, names);
        } else if constexpr (std::is_same_v<T, CallStmt>) {
          for (auto& a : n.args) a = RenameExpr(a, names);
          n.target = RenameName(n.target, names);
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          n.cond = RenameExpr(n.cond, names);
          n.then_branch = RenameStmt(n.then_branch, names);
          n.else_branch = RenameStmt(n.else_branch, names);
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          n.body = RenameStmt(n.body, names);
          RenameMap inner = names;
          inner.erase(n.var);
          n.handler = RenameStmt(n.handler, inner);
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          n.cond = RenameExpr(n.cond, names);
          n.body = RenameStmt(n.body, names);
        } else if constexpr (std::is_same_v<T, ReturnStmt> ||
                             std::is_same_v<T, ThrowStmt>) {
          n.value = RenameExpr(n.value, names);
        } else if constexpr (std::is_same_v<T, SiteStmt>) {
          n.original = RenameStmt(n.original, names);
        }
      },
      out->node);
  return out;
}

std::string JoinNames(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ", ";
    out += names[i];
  }
  return out;
}

}  // namespace

std::string SanitizeId(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

std::uint32_t LocationHash(const Location& loc) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : loc.ToString()) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

GeneratedCapture GenerateCapture(const std::string& method_name,
                                 const Stmt& stmt, const ChangeScope& scope,
                                 bool in_loop) {
  const std::string ret_name = method_name + "_ret";
  RenameMap renamed;
  for (const std::string& w : scope.lifted_written) renamed[w] = "$loc_" + w;
  StmtPtr body = RenameStmt(std::make_shared<Stmt>(stmt), renamed);

  std::vector<std::string> lifted = scope.lifted_read;
  lifted.insert(lifted.end(), scope.lifted_written.begin(),
                scope.lifted_written.end());
  std::vector<std::string> globals;
  for (const std::string& v : scope.vars) {
    if (!renamed.contains(v)) globals.push_back(v);
  }

  std::ostringstream src;
  src << "def " << method_name << "(" << JoinNames(lifted) << ") {\n";
  for (const std::string& w : scope.lifted_written) {
    src << "  $loc_" << w << " := " << w << ";\n";
  }
  for (const std::string& g : globals) {
    src << "  $old_" << g << " := " << g << ";\n";
  }
  src << "  try {\n"
      << "    $rv := " << ret_name << "(" << JoinNames(scope.lifted_read)
      << ");\n"
      << "    if ($rv != $sentinel) {\n"
      << "      $ctl := \"return\";\n"
      << "      $retval := $rv;\n"
      << "    }\n"
      << "  } catch ($e) {\n"
      << "    $ctl := \"exc\";\n"
      << "    $exc := $e;\n"
      << "  }\n";
  for (const std::string& g : globals) {
    src << "  if ($old_" << g << " != " << g << ") {\n"
        << "    $chg_" << g << " := " << g << ";\n"
        << "    " << g << " := $old_" << g << ";\n"
        << "  }\n";
  }
  for (const std::string& w : scope.lifted_written) {
    src << "  if ($loc_" << w << " != " << w << ") {\n"
        << "    $chg_" << w << " := $loc_" << w << ";\n"
        << "  }\n";
  }
  src << "}\n\n";

  src << "def " << ret_name << "(" << JoinNames(scope.lifted_read) << ") {\n";
  if (in_loop) {
    src << "  $flag := 0;\n"
        << "  while (true) {\n"
        << "    $flag := $flag + 1;\n"
        << "    if ($flag > 1) {\n"
        << "      break;\n"
        << "    }\n"
        << "    $patch {\n"
        << PrintStmt(*body, 3) << "    }\n"
        << "    $flag := $flag + 1;\n"
        << "  }\n"
        << "  if ($flag = 1) {\n"
        << "    $ctl := \"break\";\n"
        << "  }\n"
        << "  if ($flag = 2) {\n"
        << "    $ctl := \"continue\";\n"
        << "  }\n";
  } else {
    src << "  $patch {\n" << PrintStmt(*body, 2) << "  }\n";
  }
  src << "  return $sentinel;\n}\n";

  GeneratedCapture out;
  out.method = method_name;
  out.source = src.str();
  out.call = "$ignore := " + method_name + "(" + JoinNames(lifted) + ");";
  return out;
}

std::string GenerateReplay(const std::vector<std::string>& vars, bool in_loop) {
  std::ostringstream src;
  src << "{\n";
  for (const std::string& v : vars) {
    src << "  if ($has_" << v << ") {\n"
        << "    " << v << " := $chg_" << v << ";\n"
        << "  }\n";
  }
  src << "  if ($ctl = \"exc\") {\n    throw $exc;\n  }\n"
      << "  if ($ctl = \"return\") {\n    return $retval;\n  }\n";
  if (in_loop) {
    src << "  if ($ctl = \"continue\") {\n    continue;\n  }\n"
        << "  if ($ctl = \"break\") {\n    break;\n  }\n";
  }
  src << "}\n";
  return src.str();
}

}  // namespace patchval
