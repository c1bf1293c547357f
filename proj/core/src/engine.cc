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

#include "patchval/engine.h"

#include <functional>
#include <type_traits>

namespace patchval {
namespace {

// An IMP+ exception raised while evaluating an expression.
struct Raised {
  Value value;
};

[[noreturn]] void Raise(const char* what) { throw Raised{Value::Str(what)}; }

std::int64_t Wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

constexpr std::string_view kCtl = "$ctl";
constexpr std::string_view kRetval = "$retval";
constexpr std::string_view kExc = "$exc";
constexpr std::string_view kChgPrefix = "$chg_";
constexpr std::string_view kHasPrefix = "$has_";

std::string WritesToString(
    const std::vector<std::pair<std::string, Value>>& writes) {
  std::string out = "{";
  for (std::size_t i = 0; i < writes.size(); ++i) {
    if (i > 0) out += ", ";
    out += writes[i].first + "=" + writes[i].second.ToString();
  }
  return out + "}";
}

}  // namespace

std::string ControlState::ToString() const {
  switch (kind) {
    case ControlKind::kNormal:
      return "normal";
    case ControlKind::kBreak:
      return "break";
    case ControlKind::kContinue:
      return "continue";
    case ControlKind::kReturn:
      return "return(" + value.ToString() + ")";
    case ControlKind::kException:
      return "exception(" + value.ToString() + ")";
  }
  return "?";
}

const char* ChangeKindName(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::kNormal:
      return "normal";
    case ChangeKind::kBreak:
      return "break";
    case ChangeKind::kContinue:
      return "continue";
    case ChangeKind::kReturn:
      return "return";
    case ChangeKind::kException:
      return "exception";
    case ChangeKind::kTimeout:
      return "timeout";
  }
  return "?";
}

std::string CapturedChange::ToString() const {
  std::string out = ChangeKindName(control);
  if (control == ChangeKind::kReturn || control == ChangeKind::kException) {
    out += "(" + payload.ToString() + ")";
  }
  return out + " " + WritesToString(writes);
}

std::strong_ordering operator<=>(const CapturedChange& a,
                                 const CapturedChange& b) {
  if (auto c = a.control <=> b.control; c != 0) return c;
  if (auto c = a.payload <=> b.payload; c != 0) return c;
  return a.writes <=> b.writes;
}

TestOutcome TestOutcome::Passed(std::int64_t steps) {
  TestOutcome o;
  o.steps = steps;
  return o;
}

TestOutcome TestOutcome::Failed(Value exception, std::int64_t steps) {
  TestOutcome o;
  o.status = Status::kFailed;
  o.reason = Reason::kException;
  o.exception = std::move(exception);
  o.steps = steps;
  return o;
}

TestOutcome TestOutcome::Timeout(std::int64_t limit) {
  TestOutcome o;
  o.status = Status::kFailed;
  o.reason = Reason::kTimeout;
  o.steps = limit;
  return o;
}

std::string TestOutcome::ToString() const {
  if (passed()) return "passed";
  if (reason == Reason::kTimeout) return "failed(timeout)";
  return "failed(" + exception.ToString() + ")";
}

Value* Engine::Frame::Find(std::string_view name) {
  for (auto& [k, v] : vars) {
    if (k == name) return &v;
  }
  return nullptr;
}

Engine::Engine(const Program& program, EngineOptions options)
    : program_(&program), options_(options), rng_(options.seed) {
  ResetData();
}

void Engine::ResetData() {
  globals_.clear();
  for (const GlobalDecl& g : program_->globals()) globals_[g.name] = g.init;
  frames_.assign(1, Frame{});
  user_depth_ = 0;
  active_patch_.reset();
}

void Engine::Reseed(std::uint64_t seed) { rng_.seed(seed); }

void Engine::Charge(bool synthetic) {
  ++interpreter_steps_;
  if (synthetic) return;
  if (semantic_used_ >= semantic_limit_) throw TimeoutError();
  ++semantic_used_;
  ++total_semantic_steps_;
}

Value Engine::Lookup(std::string_view name) {
  if (Value* v = frames_.back().Find(name)) return *v;
  const auto it = globals_.find(name);
  if (it == globals_.end()) Raise("unbound-variable");
  return it->second;
}

void Engine::Assign(const std::string& name, Value v) {
  if (name == kIgnoreVar) return;
  if (Value* slot = frames_.back().Find(name)) {
    *slot = std::move(v);
    return;
  }
  globals_.insert_or_assign(name, std::move(v));
}

Value Engine::EvalIn(const Expr& expr, bool synthetic) {
  Charge(synthetic);
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LiteralExpr>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, VarExpr>) {
          return Lookup(n.name);
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          Value v = EvalIn(*n.operand, synthetic);
          if (n.op == UnaryOp::kNeg) {
            if (!v.is_int()) Raise("type-error");
            return Value::Int(Wrap(0 - static_cast<std::uint64_t>(v.as_int())));
          }
          if (!v.is_bool()) Raise("type-error");
          return Value::Bool(!v.as_bool());
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          Value lhs = EvalIn(*n.lhs, synthetic);
          if (n.op == BinaryOp::kAnd || n.op == BinaryOp::kOr) {
            if (!lhs.is_bool()) Raise("type-error");
            const bool short_value = n.op == BinaryOp::kOr;
            if (lhs.as_bool() == short_value) return lhs;
            Value rhs = EvalIn(*n.rhs, synthetic);
            if (!rhs.is_bool()) Raise("type-error");
            return rhs;
          }
          Value rhs = EvalIn(*n.rhs, synthetic);
          if (n.op == BinaryOp::kEq) return Value::Bool(lhs == rhs);
          if (n.op == BinaryOp::kNe) return Value::Bool(lhs != rhs);
          if (!lhs.is_int() || !rhs.is_int()) Raise("type-error");
          const std::int64_t a = lhs.as_int();
          const std::int64_t b = rhs.as_int();
          const auto ua = static_cast<std::uint64_t>(a);
          const auto ub = static_cast<std::uint64_t>(b);
          switch (n.op) {
            case BinaryOp::kAdd:
              return Value::Int(Wrap(ua + ub));
            case BinaryOp::kSub:
              return Value::Int(Wrap(ua - ub));
            case BinaryOp::kMul:
              return Value::Int(Wrap(ua * ub));
            case BinaryOp::kDiv:
              if (b == 0) Raise("div-by-zero");
              if (b == -1) return Value::Int(Wrap(0 - ua));
              return Value::Int(a / b);
            case BinaryOp::kLt:
              return Value::Bool(a < b);
            case BinaryOp::kLe:
              return Value::Bool(a <= b);
            case BinaryOp::kGt:
              return Value::Bool(a > b);
            case BinaryOp::kGe:
              return Value::Bool(a >= b);
            default:
              break;
          }
          Raise("type-error");
        } else {
          Value bound = EvalIn(*n.bound, synthetic);
          if (!bound.is_int()) Raise("type-error");
          if (bound.as_int() <= 0) Raise("nondet-bound");
          const auto k = static_cast<std::uint64_t>(bound.as_int());
          return Value::Int(static_cast<std::int64_t>(rng_() % k));
        }
      },
      expr.node);
}

ControlState Engine::EvalControl(const Expr& expr, Value* out) {
  try {
    *out = EvalIn(expr, false);
    return ControlState::Normal();
  } catch (Raised& r) {
    return ControlState::Exception(std::move(r.value));
  }
}

ControlState Engine::Execute(const Stmt& s) {
  const bool syn = s.synthetic;
  try {
    return std::visit(
        [&](const auto& n) -> ControlState {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, SiteStmt>) {
            return ExecSite(s, n);
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            return ExecCall(s, n);
          } else {
            // Blocks only sequence their children and cost nothing.
            if constexpr (!std::is_same_v<T, BlockStmt>) Charge(syn);
            if constexpr (std::is_same_v<T, BlockStmt>) {
              for (const StmtPtr& c : n.stmts) {
                ControlState r = Execute(*c);
                if (!r.is_normal()) return r;
              }
              return ControlState::Normal();
            } else if constexpr (std::is_same_v<T, AssignStmt>) {
              Assign(n.target, EvalIn(*n.value, syn));
              return ControlState::Normal();
            } else if constexpr (std::is_same_v<T, IfStmt>) {
              Value c = EvalIn(*n.cond, syn);
              if (!c.is_bool()) Raise("type-error");
              return Execute(c.as_bool() ? *n.then_branch : *n.else_branch);
            } else if constexpr (std::is_same_v<T, TryStmt>) {
              ControlState r = Execute(*n.body);
              if (r.kind != ControlKind::kException) return r;
              Frame& frame = frames_.back();
              std::optional<Value> shadowed;
              if (Value* old = frame.Find(n.var)) {
                shadowed = *old;
                *old = r.value;
              } else {
                frame.vars.emplace_back(n.var, r.value);
              }
              ControlState h = Execute(*n.handler);
              Frame& after = frames_.back();
              if (shadowed) {
                *after.Find(n.var) = std::move(*shadowed);
              } else {
                std::erase_if(after.vars,
                              [&](const auto& kv) { return kv.first == n.var; });
              }
              return h;
            } else if constexpr (std::is_same_v<T, WhileStmt>) {
              while (true) {
                Value c = EvalIn(*n.cond, syn);
                if (!c.is_bool()) Raise("type-error");
                if (!c.as_bool()) return ControlState::Normal();
                ControlState r = Execute(*n.body);
                if (r.kind == ControlKind::kBreak) return ControlState::Normal();
                if (r.kind == ControlKind::kReturn ||
                    r.kind == ControlKind::kException) {
                  return r;
                }
              }
            } else if constexpr (std::is_same_v<T, BreakStmt>) {
              return ControlState::Break();
            } else if constexpr (std::is_same_v<T, ContinueStmt>) {
              return ControlState::Continue();
            } else if constexpr (std::is_same_v<T, ReturnStmt>) {
              return ControlState::Return(EvalIn(*n.value, syn));
            } else if constexpr (std::is_same_v<T, ThrowStmt>) {
              return ControlState::Exception(EvalIn(*n.value, syn));
            } else {
              static_assert(std::is_same_v<T, SkipStmt>);
              return ControlState::Normal();
            }
          }
        },
        s.node);
  } catch (Raised& r) {
    return ControlState::Exception(std::move(r.value));
  }
}

ControlState Engine::ExecCall(const Stmt& s, const CallStmt& call) {
  Charge(s.synthetic);
  std::vector<Value> args;
  args.reserve(call.args.size());
  for (const ExprPtr& a : call.args) args.push_back(EvalIn(*a, s.synthetic));
  const Method* callee = program_->FindMethod(call.method);
  if (callee == nullptr) Raise("undefined-method");
  if (callee->params.size() != args.size()) Raise("arity-mismatch");
  const bool user = !IsReservedName(callee->name);
  if (user && user_depth_ >= options_.max_depth) {
    return ControlState::Exception(Value::Str("stack-overflow"));
  }
  Frame frame;
  frame.vars.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    frame.vars.emplace_back(callee->params[i], std::move(args[i]));
  }
  frames_.push_back(std::move(frame));
  if (user) ++user_depth_;
  ControlState r;
  try {
    r = Execute(*callee->body);
  } catch (...) {
    frames_.pop_back();
    if (user) --user_depth_;
    throw;
  }
  frames_.pop_back();
  if (user) --user_depth_;
  Value result;
  switch (r.kind) {
    case ControlKind::kException:
      return r;
    case ControlKind::kReturn:
      result = std::move(r.value);
      break;
    case ControlKind::kNormal:
      break;
    default:
      throw InternalError("loop control escaped method " + callee->name);
  }
  Assign(call.target, std::move(result));
  return ControlState::Normal();
}

ControlState Engine::ExecSite(const Stmt& s, const SiteStmt& site) {
  Charge(true);
  (void)s;
  if (active_patch_) {
    if (site.FindCapture(*active_patch_) != nullptr) {
      throw InternalError("patch " + *active_patch_ + " reaches its own site " +
                          site.site.ToString() + " during capture");
    }
    return Execute(*site.original);
  }
  if (handler_ != nullptr) {
    std::optional<CapturedChange> change = handler_->OnSite(*this, site);
    if (!change) return Execute(*site.original);
    return Replay(site, *change);
  }
  if (!selected_patch_.empty() && site.FindCapture(selected_patch_) != nullptr) {
    CaptureResult r =
        Capture(site, selected_patch_, semantic_limit_ - semantic_used_);
    if (r.change.control == ChangeKind::kTimeout) {
      semantic_used_ = semantic_limit_;
      throw TimeoutError();
    }
    semantic_used_ += r.semantic_steps;
    return Replay(site, r.change);
  }
  return Execute(*site.original);
}

void Engine::ClearChannel() {
  for (auto it = globals_.begin(); it != globals_.end();) {
    if (IsReservedName(it->first)) {
      it = globals_.erase(it);
    } else {
      ++it;
    }
  }
}

CaptureResult Engine::Capture(const SiteStmt& site, std::string_view patch_id,
                              std::int64_t semantic_limit) {
  if (active_patch_) throw InternalError("reentrant capture");
  const Stmt* call = nullptr;
  if (patch_id.empty()) {
    call = site.original_capture.get();
  } else if (const SiteStmt::Capture* c = site.FindCapture(patch_id)) {
    call = c->call.get();
  }
  if (call == nullptr) {
    throw InternalError("no capture component for '" + std::string(patch_id) +
                        "' at " + site.site.ToString());
  }
  ClearChannel();
  const DataState saved_globals = globals_;
  const std::size_t saved_frames = frames_.size();
  const Frame saved_frame = frames_.back();
  const int saved_depth = user_depth_;
  const std::int64_t saved_used = semantic_used_;
  const std::int64_t saved_limit = semantic_limit_;
  semantic_used_ = 0;
  semantic_limit_ = std::max<std::int64_t>(semantic_limit, 0);
  active_patch_ = std::string(patch_id);

  CaptureResult result;
  try {
    ControlState r = Execute(*call);
    if (!r.is_normal()) {
      throw InternalError("capture component at " + site.site.ToString() +
                          " leaked " + r.ToString());
    }
    CapturedChange& ch = result.change;
    const auto ctl = globals_.find(kCtl);
    const std::string ctl_text =
        ctl == globals_.end() || !ctl->second.is_str() ? "" : ctl->second.as_str();
    if (ctl_text == "return") {
      ch.control = ChangeKind::kReturn;
      ch.payload = globals_.at(std::string(kRetval));
    } else if (ctl_text == "exc") {
      ch.control = ChangeKind::kException;
      ch.payload = globals_.at(std::string(kExc));
    } else if (ctl_text == "break") {
      ch.control = ChangeKind::kBreak;
    } else if (ctl_text == "continue") {
      ch.control = ChangeKind::kContinue;
    }
    for (auto it = globals_.lower_bound(kChgPrefix);
         it != globals_.end() && it->first.starts_with(kChgPrefix); ++it) {
      ch.writes.emplace_back(it->first.substr(kChgPrefix.size()), it->second);
    }
  } catch (TimeoutError&) {
    result.change = CapturedChange{ChangeKind::kTimeout, Value(), {}};
    globals_ = saved_globals;
    frames_.resize(saved_frames);
    frames_.back() = saved_frame;
    user_depth_ = saved_depth;
  } catch (...) {
    active_patch_.reset();
    semantic_used_ = saved_used;
    semantic_limit_ = saved_limit;
    throw;
  }
  result.semantic_steps = semantic_used_;
  semantic_used_ = saved_used;
  semantic_limit_ = saved_limit;
  active_patch_.reset();
  ClearChannel();
  return result;
}

ControlState Engine::Replay(const SiteStmt& site, const CapturedChange& change) {
  if (change.control == ChangeKind::kTimeout) {
    throw InternalError("a timed-out change cannot be replayed");
  }
  if (!site.replay) {
    throw InternalError("no replay component at " + site.site.ToString());
  }
  ClearChannel();
  const char* ctl = "normal";
  switch (change.control) {
    case ChangeKind::kBreak:
      ctl = "break";
      break;
    case ChangeKind::kContinue:
      ctl = "continue";
      break;
    case ChangeKind::kReturn:
      ctl = "return";
      globals_[std::string(kRetval)] = change.payload;
      break;
    case ChangeKind::kException:
      ctl = "exc";
      globals_[std::string(kExc)] = change.payload;
      break;
    default:
      break;
  }
  globals_[std::string(kCtl)] = Value::Str(ctl);
  std::size_t matched = 0;
  for (const std::string& var : site.replay_vars) {
    const auto it = std::find_if(change.writes.begin(), change.writes.end(),
                                 [&](const auto& w) { return w.first == var; });
    const bool has = it != change.writes.end();
    globals_[std::string(kHasPrefix) + var] = Value::Bool(has);
    if (has) {
      globals_[std::string(kChgPrefix) + var] = it->second;
      ++matched;
    }
  }
  if (matched != change.writes.size()) {
    throw InternalError("change writes variables outside the replay scope at " +
                        site.site.ToString());
  }
  ControlState r = Execute(*site.replay);
  ClearChannel();
  return r;
}

TestOutcome Engine::RunTest(std::string_view entry, std::int64_t limit) {
  const Method* m = program_->FindMethod(entry);
  if (m == nullptr) throw NotFoundError("no test entry '" + std::string(entry) + "'");
  ResetData();
  semantic_used_ = 0;
  semantic_limit_ = limit;
  Frame frame;
  for (const std::string& p : m->params) frame.vars.emplace_back(p, Value());
  frames_.push_back(std::move(frame));
  user_depth_ = 1;
  ControlState r;
  try {
    r = Execute(*m->body);
  } catch (TimeoutError&) {
    ResetData();
    return TestOutcome::Timeout(limit);
  }
  const std::int64_t steps = semantic_used_;
  ResetData();
  if (r.kind == ControlKind::kException) {
    return TestOutcome::Failed(std::move(r.value), steps);
  }
  if (r.kind == ControlKind::kBreak || r.kind == ControlKind::kContinue) {
    throw InternalError("loop control escaped test " + m->name);
  }
  return TestOutcome::Passed(steps);
}

void Engine::PushFrame(
    const std::vector<std::pair<std::string, Value>>& bindings) {
  frames_.push_back(Frame{bindings});
}

void Engine::PopFrame() {
  if (frames_.size() <= 1) throw InternalError("frame underflow");
  frames_.pop_back();
}

std::vector<std::pair<std::string, Value>> Engine::frame() const {
  return frames_.back().vars;
}

DataState Engine::VisibleState() const {
  DataState out;
  for (const auto& [k, v] : globals_) {
    if (!IsReservedName(k)) out.emplace(k, v);
  }
  for (const auto& [k, v] : frames_.back().vars) out.insert_or_assign(k, v);
  return out;
}

std::uint64_t Engine::StateHash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::string_view text) {
    for (unsigned char c : text) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  for (const auto& [k, v] : globals_) {
    if (IsReservedName(k)) continue;
    mix(k);
    mix(v.ToString());
  }
  for (const Frame& f : frames_) {
    mix("|");
    for (const auto& [k, v] : f.vars) {
      mix(k);
      mix(v.ToString());
    }
  }
  return h;
}

}  // namespace patchval
