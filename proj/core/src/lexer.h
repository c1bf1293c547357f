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

#ifndef PATCHVAL_SRC_LEXER_H_
#define PATCHVAL_SRC_LEXER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace patchval::internal {

enum class Tok {
  kIdent,
  kInt,
  kString,
  kPunct,
  kEnd,
  kBad,
};

struct Token {
  Tok kind;
  // Identifier/keyword text, punctuation, or the decoded string literal.
  std::string text;
  // Digits of an integer literal are kept in `text`; range is checked by the
  // parser so that `-9223372036854775808` is accepted.
  int line;
  int column;
};

// Splits `source` into tokens. Never throws: malformed input yields a kBad
// token whose text describes the problem, followed by kEnd.
std::vector<Token> Lex(std::string_view source);

}  // namespace patchval::internal

#endif  // PATCHVAL_SRC_LEXER_H_
