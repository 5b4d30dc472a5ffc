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

// The character layer. Matching is parameterized by a character model:
//
//   Utf16Model      characters are UTF-16 code units (no `u` flag)
//   CodePointModel  characters are code points; surrogate pairs fuse (`u`)
//
// Both models expose the same static interface, captured by the
// CharacterModel concept.

#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpsre/ast.hpp"
#include "cpsre/expected.hpp"
#include "cpsre/unicode_data.hpp"

namespace cpsre {

// ---------------------------------------------------------------------------
// CharSet: sorted disjoint inclusive ranges plus a negation bit, over the
// universe [0, max_char].

class CharSet {
 public:
  using Range = std::pair<char32_t, char32_t>;

  CharSet() = default;
  explicit CharSet(char32_t max_char) : max_(max_char) {}

  static CharSet of(char32_t max_char, std::initializer_list<Range> ranges) {
    CharSet s(max_char);
    for (auto r : ranges) s.add_range(r.first, r.second);
    return s;
  }
  static CharSet single(char32_t max_char, char32_t c) { return of(max_char, {{c, c}}); }
  static CharSet all(char32_t max_char) { return CharSet(max_char).complement(); }

  char32_t max_char() const { return max_; }

  bool contains(char32_t c) const {
    if (c > max_) return false;
    auto it = std::upper_bound(ranges_.begin(), ranges_.end(), c,
                               [](char32_t k, const Range& r) { return k < r.first; });
    bool in = it != ranges_.begin() && std::prev(it)->second >= c;
    return in != negated_;
  }

  void add(char32_t c) { add_range(c, c); }

  void add_range(char32_t lo, char32_t hi) {
    if (lo > hi || lo > max_) return;
    hi = std::min(hi, max_);
    materialize();
    ranges_.emplace_back(lo, hi);
    normalize();
  }

  CharSet complement() const {
    CharSet out = *this;
    out.negated_ = !out.negated_;
    return out;
  }

  CharSet unite(const CharSet& other) const {
    CharSet out = *this;
    out.materialize();
    out.max_ = std::max(max_, other.max_);
    for (auto r : other.ranges()) out.ranges_.push_back(r);
    out.normalize();
    return out;
  }

  CharSet intersect(const CharSet& other) const {
    return complement().unite(other.complement()).complement();
  }

  CharSet minus(const CharSet& other) const { return intersect(other.complement()); }

  // The normalized positive ranges.
  std::vector<Range> ranges() const {
    if (!negated_) return ranges_;
    std::vector<Range> out;
    char32_t next = 0;
    bool open = true;
    for (auto [lo, hi] : ranges_) {
      if (lo > next) out.emplace_back(next, lo - 1);
      if (hi == max_) {
        open = false;
        break;
      }
      next = hi + 1;
    }
    if (open && (ranges_.empty() || ranges_.back().second < max_)) {
      out.emplace_back(next, max_);
    }
    return out;
  }

  bool empty() const { return ranges().empty(); }

  std::uint64_t size() const {
    std::uint64_t n = 0;
    for (auto [lo, hi] : ranges()) n += static_cast<std::uint64_t>(hi - lo) + 1;
    return n;
  }

  friend bool operator==(const CharSet& a, const CharSet& b) {
    return a.max_ == b.max_ && a.ranges() == b.ranges();
  }

 private:
  void materialize() {
    if (!negated_) return;
    ranges_ = ranges();
    negated_ = false;
  }

  void normalize() {
    std::sort(ranges_.begin(), ranges_.end());
    std::vector<Range> merged;
    for (auto r : ranges_) {
      if (!merged.empty() && (merged.back().second == max_ || r.first <= merged.back().second + 1)) {
        merged.back().second = std::max(merged.back().second, r.second);
      } else {
        merged.push_back(r);
      }
    }
    ranges_ = std::move(merged);
  }

  char32_t max_ = 0x10FFFF;
  std::vector<Range> ranges_;
  bool negated_ = false;
};

// ---------------------------------------------------------------------------
// Character predicates shared by both models

inline bool is_line_terminator(char32_t c) {
  return c == 0x0A || c == 0x0D || c == 0x2028 || c == 0x2029;
}

inline bool is_basic_word_char(char32_t c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_';
}

inline CharSet line_terminator_set(char32_t max_char) {
  return CharSet::of(max_char, {{0x0A, 0x0A}, {0x0D, 0x0D}, {0x2028, 0x2029}});
}

// WhiteSpace and LineTerminator code points (the \s set).
inline CharSet white_space_set(char32_t max_char) {
  return CharSet::of(max_char, {{0x09, 0x0D},
                                {0x20, 0x20},
                                {0xA0, 0xA0},
                                {0x1680, 0x1680},
                                {0x2000, 0x200A},
                                {0x2028, 0x2029},
                                {0x202F, 0x202F},
                                {0x205F, 0x205F},
                                {0x3000, 0x3000},
                                {0xFEFF, 0xFEFF}});
}

inline CharSet digit_set(char32_t max_char) { return CharSet::of(max_char, {{'0', '9'}}); }

inline CharSet basic_word_set(char32_t max_char) {
  return CharSet::of(max_char, {{'0', '9'}, {'A', 'Z'}, {'_', '_'}, {'a', 'z'}});
}

// ---------------------------------------------------------------------------
// Models

template <class M>
concept CharacterModel = requires(std::u16string_view units, const typename M::Char c,
                                  const Flags& flags, std::u32string_view chars) {
  typename M::Char;
  { M::kMaxChar } -> std::convertible_to<char32_t>;
  { M::kUnicodeMode } -> std::convertible_to<bool>;
  { M::tokenize(units) } -> std::same_as<std::vector<typename M::Char>>;
  { M::canonicalize(flags, c) } -> std::same_as<typename M::Char>;
  { M::numeric_value(c) } -> std::same_as<char32_t>;
};

inline bool is_lead_surrogate(char32_t u) { return u >= 0xD800 && u <= 0xDBFF; }
inline bool is_trail_surrogate(char32_t u) { return u >= 0xDC00 && u <= 0xDFFF; }

inline std::u16string utf16_from_code_points(std::u32string_view cps) {
  std::u16string out;
  for (char32_t c : cps) {
    if (c > 0xFFFF) {
      c -= 0x10000;
      out.push_back(static_cast<char16_t>(0xD800 + (c >> 10)));
      out.push_back(static_cast<char16_t>(0xDC00 + (c & 0x3FF)));
    } else {
      out.push_back(static_cast<char16_t>(c));
    }
  }
  return out;
}

// Without the `u` flag: characters are 16-bit code units.
struct Utf16Model {
  using Char = char16_t;
  static constexpr char32_t kMaxChar = 0xFFFF;
  static constexpr bool kUnicodeMode = false;

  static std::vector<Char> tokenize(std::u16string_view units) {
    return std::vector<Char>(units.begin(), units.end());
  }

  static std::u16string render(const std::vector<Char>& chars) {
    return std::u16string(chars.begin(), chars.end());
  }

  static char32_t numeric_value(Char c) { return c; }

  // Canonicalize without `u`: toUppercase when it yields a single code unit,
  // never mapping a non-ASCII unit into ASCII.
  static char32_t canonicalize_value(const Flags& flags, char32_t ch) {
    if (!flags.ignore_case || ch > kMaxChar) return ch;
    auto up = UnicodeData::builtin().upper(ch);
    if (!up || *up > 0xFFFF) return ch;
    if (ch >= 128 && *up < 128) return ch;
    return *up;
  }

  static Char canonicalize(const Flags& flags, Char c) {
    return static_cast<Char>(canonicalize_value(flags, c));
  }

  // Characters whose canonical form differs from themselves.
  static std::vector<char32_t> non_canonical_chars(const Flags& flags) {
    std::vector<char32_t> out;
    if (!flags.ignore_case) return out;
    for (auto [from, to] : UnicodeData::builtin().upper_entries()) {
      if (canonicalize_value(flags, from) != from) out.push_back(from);
    }
    return out;
  }
};

// With the `u` flag: characters are code points; a well-formed surrogate
// pair is one character, a lone surrogate is its own character.
struct CodePointModel {
  using Char = char32_t;
  static constexpr char32_t kMaxChar = 0x10FFFF;
  static constexpr bool kUnicodeMode = true;

  static std::vector<Char> tokenize(std::u16string_view units) {
    std::vector<Char> out;
    out.reserve(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
      char32_t u = units[i];
      if (is_lead_surrogate(u) && i + 1 < units.size() && is_trail_surrogate(units[i + 1])) {
        out.push_back(0x10000 + ((u - 0xD800) << 10) + (units[i + 1] - 0xDC00));
        ++i;
      } else {
        out.push_back(u);
      }
    }
    return out;
  }

  static std::u16string render(const std::vector<Char>& chars) {
    return utf16_from_code_points(std::u32string_view(chars.data(), chars.size()));
  }

  static char32_t numeric_value(Char c) { return c; }

  static char32_t canonicalize_value(const Flags& flags, char32_t ch) {
    if (!flags.ignore_case) return ch;
    return UnicodeData::builtin().simple_fold(ch);
  }

  static Char canonicalize(const Flags& flags, Char c) { return canonicalize_value(flags, c); }

  static std::vector<char32_t> non_canonical_chars(const Flags& flags) {
    std::vector<char32_t> out;
    if (!flags.ignore_case) return out;
    for (auto [from, to] : UnicodeData::builtin().fold_entries()) {
      if (from != to) out.push_back(from);
    }
    return out;
  }
};

static_assert(CharacterModel<Utf16Model>);
static_assert(CharacterModel<CodePointModel>);

// ---------------------------------------------------------------------------
// Sets

// Every character of the model.
template <CharacterModel M>
CharSet all_characters() {
  return CharSet::all(M::kMaxChar);
}

// Basic word characters, plus (with ignoreCase in unicode mode) characters
// whose canonical form is a basic word character.
template <CharacterModel M>
CharSet word_characters(const Flags& flags) {
  CharSet s = basic_word_set(M::kMaxChar);
  for (char32_t c : M::non_canonical_chars(flags)) {
    if (!is_basic_word_char(c) && is_basic_word_char(M::canonicalize_value(flags, c))) s.add(c);
  }
  return s;
}

template <CharacterModel M>
CharSet class_escape_set(ClassEscapeKind kind, const Flags& flags) {
  constexpr char32_t kMax = M::kMaxChar;
  switch (kind) {
    case ClassEscapeKind::Digit: return digit_set(kMax);
    case ClassEscapeKind::NotDigit: return digit_set(kMax).complement();
    case ClassEscapeKind::Word: return word_characters<M>(flags);
    case ClassEscapeKind::NotWord: return word_characters<M>(flags).complement();
    case ClassEscapeKind::Space: return white_space_set(kMax);
    case ClassEscapeKind::NotSpace: return white_space_set(kMax).complement();
  }
  return CharSet(kMax);
}

struct UnsupportedProperty {
  std::string name;
  std::string value;

  std::string message() const {
    return "unsupported unicode property " + (value.empty() ? name : name + "=" + value);
  }
};

// Built-in properties: General_Category values present in the data file.
template <CharacterModel M>
Expected<CharSet, UnsupportedProperty> unicode_property_set(std::string_view name,
                                                            std::string_view value) {
  if constexpr (!M::kUnicodeMode) {
    return Unexpected{UnsupportedProperty{std::string(name), std::string(value)}};
  } else {
    const CodePointRanges* ranges = UnicodeData::builtin().property(name, value);
    if (!ranges) return Unexpected{UnsupportedProperty{std::string(name), std::string(value)}};
    CharSet s(M::kMaxChar);
    for (auto [lo, hi] : *ranges) s.add_range(lo, hi);
    return s;
  }
}

// Canonical names for the General_Category aliases accepted by the parser.
inline std::optional<std::string> canonical_general_category(std::string_view v) {
  static constexpr std::pair<std::string_view, std::string_view> kAliases[] = {
      {"L", "Letter"},           {"Letter", "Letter"},
      {"Lu", "Uppercase_Letter"}, {"Uppercase_Letter", "Uppercase_Letter"},
      {"Ll", "Lowercase_Letter"}, {"Lowercase_Letter", "Lowercase_Letter"},
      {"Nd", "Decimal_Number"},   {"Decimal_Number", "Decimal_Number"},
      {"digit", "Decimal_Number"},
  };
  for (auto [alias, canonical] : kAliases) {
    if (alias == v) return std::string(canonical);
  }
  return std::nullopt;
}

}  // namespace cpsre
