// Copyright 2026 The cpsre Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The escape syntax for input strings in corpus files, on the command
// line and in oracle requests. Text is UTF-8 with three escapes:
//
//   \xHH      one UTF-16 code unit below 0x100
//   \uHHHH    one UTF-16 code unit (lone surrogates allowed)
//   \\        a backslash
//
// Any other backslash sequence is an error.

#pragma once

#include <string>
#include <string_view>

#include "cpsre/expected.hpp"
#include "cpsre/parser.hpp"

namespace cpsre::harness {

inline Expected<std::u16string, std::string> decode_escaped(std::string_view text) {
  std::u16string out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = text.find('\\', i);
    std::string_view plain = text.substr(i, j == std::string_view::npos ? text.size() - i : j - i);
    auto cps = decode_utf8(plain);
    if (!cps) return Unexpected{cps.error()};
    out += utf16_from_code_points(cps.value());
    if (j == std::string_view::npos) break;
    if (j + 1 >= text.size()) return Unexpected{std::string("dangling backslash")};
    char kind = text[j + 1];
    if (kind == '\\') {
      out += u'\\';
      i = j + 2;
      continue;
    }
    std::size_t digits = kind == 'x' ? 2 : kind == 'u' ? 4 : 0;
    if (digits == 0) return Unexpected{std::string("unknown escape \\") + kind};
    if (j + 2 + digits > text.size()) return Unexpected{std::string("truncated escape")};
    char16_t v = 0;
    for (std::size_t k = 0; k < digits; ++k) {
      int h = detail::hex_value(static_cast<unsigned char>(text[j + 2 + k]));
      if (h < 0) return Unexpected{std::string("bad hex digit in escape")};
      v = static_cast<char16_t>(v * 16 + h);
    }
    out += v;
    i = j + 2 + digits;
  }
  return out;
}

// Printable ASCII stays literal, except `\` and `:`; everything else is
// escaped per code unit.
inline std::string encode_escaped(std::u16string_view units) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char16_t u : units) {
    if (u == u'\\') {
      out += "\\\\";
    } else if (u >= 0x20 && u < 0x7F && u != u':') {
      out += static_cast<char>(u);
    } else if (u < 0x100) {
      out += "\\x";
      out += kHex[u >> 4];
      out += kHex[u & 0xF];
    } else {
      out += "\\u";
      for (int shift = 12; shift >= 0; shift -= 4) out += kHex[(u >> shift) & 0xF];
    }
  }
  return out;
}

}  // namespace cpsre::harness
