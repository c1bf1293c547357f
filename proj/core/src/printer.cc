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

#include "patchval/program.h"

namespace patchval {
namespace {

std::string Pad(int indent) { return std::string(2 * indent, ' '); }

std::string PrintArgs(const std::vector<ExprPtr>& args) {
  std::string out = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) out += ", ";
    out += PrintExpr(*args[i]);
  }
  return out + ")";
}

void PrintBlockBody(std::ostringstream& out, const Stmt& s, int indent);

void PrintInto(std::ostringstream& out, const Stmt& s, int indent) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BlockStmt>) {
          out << Pad(indent) << "{\n";
          for (const auto& c : n.stmts) PrintInto(out, *c, indent + 1);
          out << Pad(indent) << "}\n";
        } else if constexpr (std::is_same_v<T, AssignStmt>) {
          out << Pad(indent) << n.target << " := " << PrintExpr(*n.value)
              << ";\n";
        } else if constexpr (std::is_same_v<T, CallStmt>) {
          out << Pad(indent);
          if (n.target != kIgnoreVar) out << n.target << " := ";
          out << n.method << PrintArgs(n.args) << ";\n";
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          out << Pad(indent) << "if (" << PrintExpr(*n.cond) << ") {\n";
          PrintBlockBody(out, *n.then_branch, indent + 1);
          out << Pad(indent) << "}";
          const auto* else_block = std::get_if<BlockStmt>(&n.else_branch->node);
          if (else_block == nullptr || !else_block->stmts.empty()) {
            out << " else {\n";
            PrintBlockBody(out, *n.else_branch, indent + 1);
            out << Pad(indent) << "}";
          }
          out << "\n";
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          out << Pad(indent) << "try {\n";
          PrintBlockBody(out, *n.body, indent + 1);
          out << Pad(indent) << "} catch (" << n.var << ") {\n";
          PrintBlockBody(out, *n.handler, indent + 1);
          out << Pad(indent) << "}\n";
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          out << Pad(indent) << "while (" << PrintExpr(*n.cond) << ") {\n";
          PrintBlockBody(out, *n.body, indent + 1);
          out << Pad(indent) << "}\n";
        } else if constexpr (std::is_same_v<T, BreakStmt>) {
          out << Pad(indent) << "break;\n";
        } else if constexpr (std::is_same_v<T, ContinueStmt>) {
          out << Pad(indent) << "continue;\n";
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          const auto* lit = std::get_if<LiteralExpr>(&n.value->node);
          if (lit != nullptr && lit->value.kind() == ValueKind::kUnit) {
            out << Pad(indent) << "return;\n";
          } else {
            out << Pad(indent) << "return " << PrintExpr(*n.value) << ";\n";
          }
        } else if constexpr (std::is_same_v<T, ThrowStmt>) {
          out << Pad(indent) << "throw " << PrintExpr(*n.value) << ";\n";
        } else if constexpr (std::is_same_v<T, SkipStmt>) {
          out << Pad(indent) << "skip;\n";
        } else {
          out << Pad(indent) << "$site " << QuoteString(n.site.ToString())
              << " {\n";
          PrintBlockBody(out, *n.original, indent + 1);
          out << Pad(indent) << "}";
          for (const auto& c : n.captures) {
            out << " capture " << QuoteString(c.patch_id) << " {\n";
            PrintBlockBody(out, *c.call, indent + 1);
            out << Pad(indent) << "}";
          }
          if (n.replay) {
            out << " replay {\n";
            PrintBlockBody(out, *n.replay, indent + 1);
            out << Pad(indent) << "}";
          }
          out << "\n";
        }
      },
      s.node);
}

// Prints the statements of a block without its braces; other statements are
// printed as-is.
void PrintBlockBody(std::ostringstream& out, const Stmt& s, int indent) {
  if (const auto* b = std::get_if<BlockStmt>(&s.node)) {
    for (const auto& c : b->stmts) PrintInto(out, *c, indent);
    return;
  }
  PrintInto(out, s, indent);
}

}  // namespace

std::string PrintExpr(const Expr& expr) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LiteralExpr>) {
          return n.value.ToString();
        } else if constexpr (std::is_same_v<T, VarExpr>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          if (n.op == UnaryOp::kNeg) return "-(" + PrintExpr(*n.operand) + ")";
          return "not (" + PrintExpr(*n.operand) + ")";
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          return "(" + PrintExpr(*n.lhs) + " " + BinaryOpSymbol(n.op) + " " +
                 PrintExpr(*n.rhs) + ")";
        } else {
          return "nondet(" + PrintExpr(*n.bound) + ")";
        }
      },
      expr.node);
}

std::string PrintStmt(const Stmt& stmt, int indent) {
  std::ostringstream out;
  PrintInto(out, stmt, indent);
  return out.str();
}

std::string PrintMethod(const Method& method) {
  std::ostringstream out;
  if (method.is_test) out << "test ";
  out << "def " << method.name << "(";
  for (std::size_t i = 0; i < method.params.size(); ++i) {
    if (i > 0) out << ", ";
    out << method.params[i];
  }
  out << ") {\n";
  PrintBlockBody(out, *method.body, 1);
  out << "}\n";
  return out.str();
}

std::string Print(const Program& program) {
  std::ostringstream out;
  for (const GlobalDecl& g : program.globals()) {
    out << "var " << g.name << " := " << g.init.ToString() << ";\n";
  }
  for (const Method& m : program.methods()) {
    out << "\n" << PrintMethod(m);
  }
  return out.str();
}

}  // namespace patchval
