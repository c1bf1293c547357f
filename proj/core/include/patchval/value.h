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

#ifndef PATCHVAL_VALUE_H_
#define PATCHVAL_VALUE_H_

#include <compare>
#include <cstdint>
#include <string>
#include <variant>

namespace patchval {

struct Unit {
  auto operator<=>(const Unit&) const = default;
};

// Return value of a capture wrapper method when the patched statement fell
// through. No IMP+ expression written by a user can produce it.
struct Sentinel {
  auto operator<=>(const Sentinel&) const = default;
};

enum class ValueKind : std::uint8_t { kInt, kBool, kStr, kUnit, kSentinel };

const char* ValueKindName(ValueKind kind);

// An IMP+ runtime value. Equality is structural; the total order compares the
// kind tag first and the payload second.
class Value {
 public:
  Value() : rep_(Unit{}) {}
  static Value Int(std::int64_t v) { return Value(Rep(v)); }
  static Value Bool(bool v) { return Value(Rep(v)); }
  static Value Str(std::string v) { return Value(Rep(std::move(v))); }
  static Value MakeUnit() { return Value(Rep(Unit{})); }
  static Value MakeSentinel() { return Value(Rep(Sentinel{})); }

  ValueKind kind() const { return static_cast<ValueKind>(rep_.index()); }
  bool is_int() const { return kind() == ValueKind::kInt; }
  bool is_bool() const { return kind() == ValueKind::kBool; }
  bool is_str() const { return kind() == ValueKind::kStr; }

  std::int64_t as_int() const { return std::get<std::int64_t>(rep_); }
  bool as_bool() const { return std::get<bool>(rep_); }
  const std::string& as_str() const { return std::get<std::string>(rep_); }

  // IMP+ literal syntax for ints, bools and strings; `unit` and `$sentinel`
  // for the other two kinds.
  std::string ToString() const;

  friend bool operator==(const Value&, const Value&) = default;
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    return a.rep_ <=> b.rep_;
  }

 private:
  using Rep = std::variant<std::int64_t, bool, std::string, Unit, Sentinel>;
  explicit Value(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

// Quotes and escapes `s` as an IMP+ string literal.
std::string QuoteString(const std::string& s);

}  // namespace patchval

#endif  // PATCHVAL_VALUE_H_
