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

#include "patchval/value.h"

namespace patchval {

const char* ValueKindName(ValueKind kind) {
  switch (kind) {
    case ValueKind::kInt:
      return "int";
    case ValueKind::kBool:
      return "bool";
    case ValueKind::kStr:
      return "str";
    case ValueKind::kUnit:
      return "unit";
    case ValueKind::kSentinel:
      return "sentinel";
  }
  return "?";
}

std::string QuoteString(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += '"';
  return out;
}

std::string Value::ToString() const {
  switch (kind()) {
    case ValueKind::kInt:
      return std::to_string(as_int());
    case ValueKind::kBool:
      return as_bool() ? "true" : "false";
    case ValueKind::kStr:
      return QuoteString(as_str());
    case ValueKind::kUnit:
      return "unit";
    case ValueKind::kSentinel:
      return "$sentinel";
  }
  return "?";
}

}  // namespace patchval
