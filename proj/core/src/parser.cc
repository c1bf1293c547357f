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

#include <charconv>
#include <limits>
#include <set>
#include <utility>

#include "lexer.h"
#include "patchval/program.h"

namespace patchval {
namespace {

using internal::Tok;
using internal::Token;

const std::set<std::string, std::less<>>& Keywords() {
  static const std::set<std::string, std::less<>> kKeywords = {
      "var",  "def",    "if",       "else",   "while",
      "try",  "catch",  "break",  "continue", "return", "throw",
      "assert", "skip", "true",   "false",    "and",    "or",
      "not",  "nondet", "package", "unit"};
  return kKeywords;
}

class Parser {
 public:
  Parser(std::string_view source, const ParseOptions& options)
      : tokens_(internal::Lex(source)), options_(options) {
    synthetic_ = options.allow_reserved;
  }

  Program ParseProgram() {
    std::string group = options_.default_group;
    if (IsKeyword("package")) {
      Next();
      group = ExpectIdent("package name");
      Expect(";");
    }
    std::vector<GlobalDecl> globals;
    std::vector<Method> methods;
    std::set<std::string, std::less<>> names;
    while (Peek().kind != Tok::kEnd) {
      if (IsKeyword("var")) {
        const Token start = Next();
        GlobalDecl g;
        g.name = ExpectIdent("global name");
        if (!names.insert(g.name).second) {
          Fail(start, "duplicate declaration of '" + g.name + "'");
        }
        Expect(":=");
        g.init = ParseLiteral();
        Expect(";");
        globals.push_back(std::move(g));
        continue;
      }
      const Token& start = Peek();
      Method m = ParseMethodDecl();
      m.group = group;
      if (!names.insert(m.name).second) {
        Fail(start, "duplicate declaration of '" + m.name + "'");
      }
      methods.push_back(std::move(m));
    }
    return Program(std::move(globals), std::move(methods));
  }

  Method ParseMethodDecl() {
    bool is_test = false;
    // `test` is a modifier only when followed by `def`; it stays a valid name.
    if (IsKeyword("test") && IsKeyword("def", 1)) {
      Next();
      is_test = true;
    }
    if (!IsKeyword("def")) Fail(Peek(), "expected 'var' or 'def'");
    Next();
    Method m;
    m.is_test = is_test;
    m.name = ExpectIdent("method name");
    method_ = m.name;
    Expect("(");
    std::set<std::string> seen;
    if (!IsPunct(")")) {
      while (true) {
        const Token& at = Peek();
        std::string p = ExpectIdent("parameter name");
        if (!seen.insert(p).second) {
          Fail(at, "duplicate parameter '" + p + "'");
        }
        m.params.push_back(std::move(p));
        if (IsPunct(",")) {
          Next();
          continue;
        }
        break;
      }
    }
    Expect(")");
    m.body = ParseBlock(Location{m.name, {}});
    method_.clear();
    return m;
  }

  StmtPtr ParseStatementList(const Location& loc) {
    std::vector<StmtPtr> stmts;
    while (Peek().kind != Tok::kEnd) {
      stmts.push_back(ParseStmt(loc.Child(static_cast<int>(stmts.size()))));
    }
    if (stmts.size() == 1) return Relocate(*stmts.front(), loc);
    auto block = std::make_shared<Stmt>();
    block->node = BlockStmt{std::move(stmts)};
    block->loc = loc;
    block->synthetic = synthetic_;
    return block;
  }

  void ExpectEnd() {
    if (Peek().kind != Tok::kEnd) Fail(Peek(), "unexpected trailing input");
  }

  void set_method(std::string name) { method_ = std::move(name); }

 private:
  const Token& Peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  Token Next() {
    const Token& t = Peek();
    if (t.kind == Tok::kBad) Fail(t, t.text);
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  [[noreturn]] void Fail(const Token& at, const std::string& message,
                         DiagnosticKind kind = DiagnosticKind::kSyntaxError) {
    Diagnostic d;
    d.isolation_unit = method_;
    d.kind = kind;
    d.location = std::to_string(at.line) + ":" + std::to_string(at.column);
    d.message = message;
    throw ParseError(std::move(d));
  }

  bool IsPunct(std::string_view p, std::size_t ahead = 0) const {
    const Token& t = Peek(ahead);
    return t.kind == Tok::kPunct && t.text == p;
  }
  bool IsKeyword(std::string_view k, std::size_t ahead = 0) const {
    const Token& t = Peek(ahead);
    return t.kind == Tok::kIdent && t.text == k;
  }
  void Expect(std::string_view p) {
    if (!IsPunct(p)) {
      const Token& t = Peek();
      if (t.kind == Tok::kBad) Fail(t, t.text);
      Fail(t, "expected '" + std::string(p) + "' but found '" +
                  (t.kind == Tok::kEnd ? std::string("end of input") : t.text) +
                  "'");
    }
    Next();
  }

  // A user-visible identifier (not a keyword). Reserved names are accepted
  // only in instrumentation mode.
  bool IsNameToken(const Token& t) const {
    return t.kind == Tok::kIdent && !Keywords().contains(t.text) &&
           t.text != "$sentinel" && t.text != "$patch";
  }
  std::string ExpectIdent(std::string_view what) {
    const Token& t = Peek();
    if (!IsNameToken(t)) {
      if (t.kind == Tok::kBad) Fail(t, t.text);
      Fail(t, "expected " + std::string(what));
    }
    CheckReserved(t);
    return Next().text;
  }
  void CheckReserved(const Token& t) {
    if (!options_.allow_reserved && IsReservedName(t.text)) {
      Fail(t, "identifier '" + t.text + "' uses the reserved prefix '$'",
           DiagnosticKind::kReservedIdentifier);
    }
  }

  Value ParseLiteral() {
    const Token& t = Peek();
    if (IsPunct("-") && Peek(1).kind == Tok::kInt) {
      Next();
      return Value::Int(ParseIntDigits(Next(), /*negative=*/true));
    }
    if (t.kind == Tok::kInt) return Value::Int(ParseIntDigits(Next(), false));
    if (t.kind == Tok::kString) return Value::Str(Next().text);
    if (IsKeyword("true")) {
      Next();
      return Value::Bool(true);
    }
    if (IsKeyword("false")) {
      Next();
      return Value::Bool(false);
    }
    if (IsKeyword("unit")) {
      Next();
      return Value::MakeUnit();
    }
    Fail(t, "expected a literal");
  }

  std::int64_t ParseIntDigits(const Token& t, bool negative) {
    std::uint64_t magnitude = 0;
    const auto [ptr, ec] = std::from_chars(
        t.text.data(), t.text.data() + t.text.size(), magnitude);
    const std::uint64_t limit =
        static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) +
        (negative ? 1 : 0);
    if (ec != std::errc() || magnitude > limit) {
      Fail(t, "integer literal out of range");
    }
    if (negative) return static_cast<std::int64_t>(0 - magnitude);
    return static_cast<std::int64_t>(magnitude);
  }

  StmtPtr MakeStmt(decltype(Stmt::node) node, const Location& loc) {
    auto s = std::make_shared<Stmt>();
    s->node = std::move(node);
    s->loc = loc;
    s->synthetic = synthetic_;
    return s;
  }

  StmtPtr ParseBlock(const Location& loc) {
    Expect("{");
    BlockStmt block;
    while (!IsPunct("}")) {
      if (Peek().kind == Tok::kEnd) Fail(Peek(), "expected '}'");
      block.stmts.push_back(
          ParseStmt(loc.Child(static_cast<int>(block.stmts.size()))));
    }
    Expect("}");
    return MakeStmt(std::move(block), loc);
  }

  std::vector<ExprPtr> ParseArgs() {
    Expect("(");
    std::vector<ExprPtr> args;
    if (!IsPunct(")")) {
      while (true) {
        args.push_back(ParseExpr());
        if (IsPunct(",")) {
          Next();
          continue;
        }
        break;
      }
    }
    Expect(")");
    return args;
  }

  StmtPtr ParseStmt(const Location& loc) {
    const Token& t = Peek();
    if (IsPunct("{")) return ParseBlock(loc);
    if (options_.allow_reserved && IsKeyword("$patch")) {
      Next();
      const bool saved = synthetic_;
      synthetic_ = false;
      StmtPtr inner = ParseBlock(loc);
      synthetic_ = saved;
      auto wrapper = std::make_shared<Stmt>(*inner);
      wrapper->synthetic = true;
      return wrapper;
    }
    if (IsKeyword("if")) return ParseIf(loc);
    if (IsKeyword("while")) {
      Next();
      Expect("(");
      ExprPtr cond = ParseExpr();
      Expect(")");
      StmtPtr body = ParseBlock(loc.Child(0));
      return MakeStmt(WhileStmt{std::move(cond), std::move(body)}, loc);
    }
    if (IsKeyword("try")) {
      Next();
      StmtPtr body = ParseBlock(loc.Child(0));
      if (!IsKeyword("catch")) Fail(Peek(), "expected 'catch'");
      Next();
      Expect("(");
      std::string var = ExpectIdent("catch variable");
      Expect(")");
      StmtPtr handler = ParseBlock(loc.Child(1));
      return MakeStmt(TryStmt{std::move(body), std::move(var), std::move(handler)},
                      loc);
    }
    if (IsKeyword("break")) {
      Next();
      Expect(";");
      return MakeStmt(BreakStmt{}, loc);
    }
    if (IsKeyword("continue")) {
      Next();
      Expect(";");
      return MakeStmt(ContinueStmt{}, loc);
    }
    if (IsKeyword("return")) {
      Next();
      ExprPtr value = IsPunct(";") ? MakeLiteral(Value::MakeUnit()) : ParseExpr();
      Expect(";");
      return MakeStmt(ReturnStmt{std::move(value)}, loc);
    }
    if (IsKeyword("throw")) {
      Next();
      ExprPtr value = ParseExpr();
      Expect(";");
      return MakeStmt(ThrowStmt{std::move(value)}, loc);
    }
    if (IsKeyword("skip")) {
      Next();
      Expect(";");
      return MakeStmt(SkipStmt{}, loc);
    }
    if (IsKeyword("assert")) {
      Next();
      Expect("(");
      ExprPtr cond = ParseExpr();
      Expect(")");
      Expect(";");
      // assert(e) is if (not e) { throw "assertion failed"; } else { skip; }
      BlockStmt then_block;
      then_block.stmts.push_back(
          MakeStmt(ThrowStmt{MakeLiteral(Value::Str("assertion failed"))},
                   loc.Child(0).Child(0)));
      BlockStmt else_block;
      else_block.stmts.push_back(MakeStmt(SkipStmt{}, loc.Child(1).Child(0)));
      return MakeStmt(IfStmt{MakeUnary(UnaryOp::kNot, std::move(cond)),
                             MakeStmt(std::move(then_block), loc.Child(0)),
                             MakeStmt(std::move(else_block), loc.Child(1))},
                      loc);
    }
    if (IsNameToken(t)) {
      CheckReserved(t);
      if (IsPunct("(", 1)) {
        std::string method = Next().text;
        std::vector<ExprPtr> args = ParseArgs();
        Expect(";");
        return MakeStmt(
            CallStmt{std::string(kIgnoreVar), std::move(method), std::move(args)},
            loc);
      }
      std::string target = Next().text;
      Expect(":=");
      if (IsNameToken(Peek()) && IsPunct("(", 1)) {
        CheckReserved(Peek());
        std::string method = Next().text;
        std::vector<ExprPtr> args = ParseArgs();
        Expect(";");
        return MakeStmt(
            CallStmt{std::move(target), std::move(method), std::move(args)},
            loc);
      }
      ExprPtr value = ParseExpr();
      Expect(";");
      return MakeStmt(AssignStmt{std::move(target), std::move(value)}, loc);
    }
    if (t.kind == Tok::kBad) Fail(t, t.text);
    if (t.kind == Tok::kIdent && IsReservedName(t.text)) CheckReserved(t);
    Fail(t, t.kind == Tok::kEnd ? "unexpected end of input"
                                : "unexpected '" + t.text + "'");
  }

  StmtPtr ParseIf(const Location& loc) {
    Next();  // if
    Expect("(");
    ExprPtr cond = ParseExpr();
    Expect(")");
    StmtPtr then_branch = ParseBlock(loc.Child(0));
    StmtPtr else_branch;
    if (IsKeyword("else")) {
      Next();
      if (IsKeyword("if")) {
        BlockStmt wrapper;
        wrapper.stmts.push_back(ParseIf(loc.Child(1).Child(0)));
        else_branch = MakeStmt(std::move(wrapper), loc.Child(1));
      } else {
        else_branch = ParseBlock(loc.Child(1));
      }
    } else {
      else_branch = MakeStmt(BlockStmt{}, loc.Child(1));
    }
    return MakeStmt(
        IfStmt{std::move(cond), std::move(then_branch), std::move(else_branch)},
        loc);
  }

  ExprPtr ParseExpr() { return ParseOr(); }

  ExprPtr ParseOr() {
    ExprPtr lhs = ParseAnd();
    while (IsKeyword("or")) {
      Next();
      lhs = MakeBinary(BinaryOp::kOr, std::move(lhs), ParseAnd());
    }
    return lhs;
  }
  ExprPtr ParseAnd() {
    ExprPtr lhs = ParseNot();
    while (IsKeyword("and")) {
      Next();
      lhs = MakeBinary(BinaryOp::kAnd, std::move(lhs), ParseNot());
    }
    return lhs;
  }
  ExprPtr ParseNot() {
    if (IsKeyword("not")) {
      Next();
      return MakeUnary(UnaryOp::kNot, ParseNot());
    }
    return ParseCompare();
  }
  ExprPtr ParseCompare() {
    ExprPtr lhs = ParseAdditive();
    static constexpr std::pair<std::string_view, BinaryOp> kOps[] = {
        {"=", BinaryOp::kEq},  {"!=", BinaryOp::kNe}, {"<", BinaryOp::kLt},
        {"<=", BinaryOp::kLe}, {">", BinaryOp::kGt},  {">=", BinaryOp::kGe}};
    for (const auto& [sym, op] : kOps) {
      if (IsPunct(sym)) {
        Next();
        ExprPtr rhs = ParseAdditive();
        for (const auto& [sym2, op2] : kOps) {
          if (IsPunct(sym2)) Fail(Peek(), "comparisons do not chain");
        }
        return MakeBinary(op, std::move(lhs), std::move(rhs));
      }
    }
    return lhs;
  }
  ExprPtr ParseAdditive() {
    ExprPtr lhs = ParseMultiplicative();
    while (IsPunct("+") || IsPunct("-")) {
      const BinaryOp op = Next().text == "+" ? BinaryOp::kAdd : BinaryOp::kSub;
      lhs = MakeBinary(op, std::move(lhs), ParseMultiplicative());
    }
    return lhs;
  }
  ExprPtr ParseMultiplicative() {
    ExprPtr lhs = ParseUnary();
    while (IsPunct("*") || IsPunct("/")) {
      const BinaryOp op = Next().text == "*" ? BinaryOp::kMul : BinaryOp::kDiv;
      lhs = MakeBinary(op, std::move(lhs), ParseUnary());
    }
    return lhs;
  }
  ExprPtr ParseUnary() {
    if (IsPunct("-")) {
      Next();
      if (Peek().kind == Tok::kInt) {
        return MakeLiteral(Value::Int(ParseIntDigits(Next(), true)));
      }
      return MakeUnary(UnaryOp::kNeg, ParseUnary());
    }
    return ParsePrimary();
  }
  ExprPtr ParsePrimary() {
    const Token& t = Peek();
    if (t.kind == Tok::kInt) return MakeLiteral(Value::Int(ParseIntDigits(Next(), false)));
    if (t.kind == Tok::kString) return MakeLiteral(Value::Str(Next().text));
    if (IsKeyword("true")) {
      Next();
      return MakeLiteral(Value::Bool(true));
    }
    if (IsKeyword("false")) {
      Next();
      return MakeLiteral(Value::Bool(false));
    }
    if (IsKeyword("unit")) {
      Next();
      return MakeLiteral(Value::MakeUnit());
    }
    if (IsKeyword("nondet")) {
      Next();
      Expect("(");
      ExprPtr bound = ParseExpr();
      Expect(")");
      return MakeNondet(std::move(bound));
    }
    if (IsKeyword("$sentinel")) {
      if (!options_.allow_reserved) CheckReserved(t);
      Next();
      return MakeLiteral(Value::MakeSentinel());
    }
    if (IsPunct("(")) {
      Next();
      ExprPtr inner = ParseExpr();
      Expect(")");
      return inner;
    }
    if (IsNameToken(t)) {
      CheckReserved(t);
      if (IsPunct("(", 1)) {
        Fail(t, "method calls are only allowed as statements");
      }
      return MakeVar(Next().text);
    }
    if (t.kind == Tok::kBad) Fail(t, t.text);
    if (t.kind == Tok::kIdent && IsReservedName(t.text)) CheckReserved(t);
    Fail(t, t.kind == Tok::kEnd ? "expected an expression"
                                : "expected an expression but found '" +
                                      t.text + "'");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ParseOptions options_;
  std::string method_;
  bool synthetic_ = false;
};

}  // namespace

ParseError::ParseError(Diagnostic diag)
    : std::runtime_error(diag.ToString()), diag_(std::move(diag)) {}

Program Parse(std::string_view source, const ParseOptions& options) {
  Parser parser(source, options);
  return parser.ParseProgram();
}

Program ParseSources(const std::vector<SourceFile>& sources) {
  std::vector<GlobalDecl> globals;
  std::vector<Method> methods;
  std::set<std::string, std::less<>> names;
  for (const SourceFile& file : sources) {
    ParseOptions options;
    options.default_group = file.default_group;
    Program part = Parse(file.text, options);
    for (const GlobalDecl& g : part.globals()) {
      if (!names.insert(g.name).second) {
        throw ParseError(Diagnostic{"", DiagnosticKind::kSyntaxError, file.name,
                                    "duplicate declaration of '" + g.name + "'"});
      }
      globals.push_back(g);
    }
    for (const Method& m : part.methods()) {
      if (!names.insert(m.name).second) {
        throw ParseError(Diagnostic{m.name, DiagnosticKind::kSyntaxError,
                                    file.name,
                                    "duplicate declaration of '" + m.name + "'"});
      }
      methods.push_back(m);
    }
  }
  return Program(std::move(globals), std::move(methods));
}

StmtPtr ParseStatements(std::string_view text, const Location& loc,
                        const ParseOptions& options) {
  Parser parser(text, options);
  parser.set_method(loc.method);
  StmtPtr stmt = parser.ParseStatementList(loc);
  parser.ExpectEnd();
  return stmt;
}

Method ParseMethod(std::string_view text) {
  ParseOptions options;
  options.allow_reserved = true;
  Parser parser(text, options);
  Method m = parser.ParseMethodDecl();
  parser.ExpectEnd();
  return m;
}

}  // namespace patchval
