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

#include "lexer.h"

#include <cctype>

namespace patchval::internal {
namespace {

bool IsIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::vector<Token> Lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const int tl = line;
    const int tc = col;
    if (IsIdentStart(c) || (c == '$' && i + 1 < src.size() &&
                            IsIdentStart(src[i + 1]))) {
      std::size_t j = i + 1;
      while (j < src.size() && IsIdentChar(src[j])) ++j;
      out.push_back({Tok::kIdent, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      if (j < src.size() && IsIdentStart(src[j])) {
        out.push_back({Tok::kBad, "malformed number", tl, tc});
        break;
      }
      out.push_back({Tok::kInt, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::string text;
      std::size_t j = i + 1;
      bool closed = false;
      bool bad_escape = false;
      while (j < src.size()) {
        const char d = src[j];
        if (d == '"') {
          closed = true;
          ++j;
          break;
        }
        if (d == '\n') break;
        if (d == '\\') {
          if (j + 1 >= src.size()) break;
          const char e = src[j + 1];
          switch (e) {
            case 'n':
              text += '\n';
              break;
            case 't':
              text += '\t';
              break;
            case '"':
              text += '"';
              break;
            case '\\':
              text += '\\';
              break;
            default:
              bad_escape = true;
          }
          j += 2;
          continue;
        }
        text += d;
        ++j;
      }
      if (!closed || bad_escape) {
        out.push_back({Tok::kBad,
                       bad_escape ? "bad escape in string literal"
                                  : "unterminated string literal",
                       tl, tc});
        break;
      }
      out.push_back({Tok::kString, std::move(text), tl, tc});
      advance(j - i);
      continue;
    }
    static constexpr std::string_view kTwoChar[] = {":=", "!=", "<=", ">="};
    bool matched = false;
    for (std::string_view p : kTwoChar) {
      if (src.substr(i, 2) == p) {
        out.push_back({Tok::kPunct, std::string(p), tl, tc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view kOneChar = "+-*/=<>(){},;";
    if (kOneChar.find(c) != std::string_view::npos) {
      out.push_back({Tok::kPunct, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    out.push_back(
        {Tok::kBad, std::string("unexpected character '") + c + "'", tl, tc});
    break;
  }
  out.push_back({Tok::kEnd, "", line, col});
  return out;
}

}  // namespace patchval::internal
