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

// Pattern text to AST, and a canonical printer back to text.
//
// The grammar is the strict ECMAScript pattern grammar. Without the `u`
// flag three leniencies are accepted:
//   - identity escapes for any character except `c`, `k` and digits
//     (so `\A` is the character A);
//   - a lone `]` outside a class is a literal;
//   - lookaheads may carry a quantifier.
// Everything else that only legacy web grammar allows is rejected.
//
// Positions in errors count source characters: code points with `u`,
// UTF-16 code units without.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpsre/ast.hpp"
#include "cpsre/charmodel.hpp"
#include "cpsre/expected.hpp"

namespace cpsre {

struct ParseError {
  std::size_t position = 0;
  std::string message;

  std::string to_string() const {
    return "parse error at " + std::to_string(position) + ": " + message;
  }
};

// ---------------------------------------------------------------------------
// UTF-8 helpers

inline Expected<std::u32string, std::string> decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t n;
    char32_t cp;
    if (b0 < 0x80) {
      n = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      n = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      n = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      n = 4;
      cp = b0 & 0x07;
    } else {
      return Unexpected{"invalid UTF-8 lead byte at offset " + std::to_string(i)};
    }
    if (i + n > s.size()) return Unexpected{std::string("truncated UTF-8 sequence")};
    for (std::size_t k = 1; k < n; ++k) {
      auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        return Unexpected{"invalid UTF-8 continuation at offset " + std::to_string(i + k)};
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[n] || cp > 0x10FFFF) {
      return Unexpected{"invalid UTF-8 sequence at offset " + std::to_string(i)};
    }
    out.push_back(cp);
    i += n;
  }
  return out;
}

// Encodes code points (lone surrogates included, WTF-8 style) as UTF-8.
inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

inline std::string utf8_from_code_points(std::u32string_view cps) {
  std::string out;
  for (char32_t c : cps) append_utf8(out, c);
  return out;
}

// UTF-16 to UTF-8; surrogate pairs combine, lone surrogates are kept.
inline std::string utf8_from_utf16(std::u16string_view units) {
  auto cps = CodePointModel::tokenize(units);
  return utf8_from_code_points(std::u32string_view(cps.data(), cps.size()));
}

inline std::u16string utf16_from_utf8(std::string_view s) {
  auto cps = decode_utf8(s);
  if (!cps) return {};
  return utf16_from_code_points(cps.value());
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

inline bool is_syntax_character(char32_t c) {
  switch (c) {
    case '^': case '$': case '\\': case '.': case '*': case '+': case '?':
    case '(': case ')': case '[': case ']': case '{': case '}': case '|':
      return true;
    default:
      return false;
  }
}

inline bool is_ascii_digit(char32_t c) { return c >= '0' && c <= '9'; }

inline int hex_value(char32_t c) {
  if (c >= '0' && c <= '9') return static_cast<int>(c - '0');
  if (c >= 'a' && c <= 'f') return static_cast<int>(c - 'a' + 10);
  if (c >= 'A' && c <= 'F') return static_cast<int>(c - 'A' + 10);
  return -1;
}

inline bool is_group_name_start(char32_t c) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '$' || c == '_') return true;
  if (c < 0x80) return false;
  const auto* letters = UnicodeData::builtin().property("General_Category", "Letter");
  if (!letters) return false;
  for (auto [lo, hi] : *letters) {
    if (c >= lo && c <= hi) return true;
  }
  return false;
}

inline bool is_group_name_part(char32_t c) {
  if (is_group_name_start(c) || is_ascii_digit(c) || c == 0x200C || c == 0x200D) return true;
  if (c < 0x80) return false;
  const auto* digits = UnicodeData::builtin().property("General_Category", "Decimal_Number");
  if (!digits) return false;
  for (auto [lo, hi] : *digits) {
    if (c >= lo && c <= hi) return true;
  }
  return false;
}

class Parser {
 public:
  Parser(std::u32string src, const Flags& flags) : src_(std::move(src)), u_(flags.unicode) {}

  Expected<Regex, ParseError> parse() {
    auto r = parse_disjunction();
    if (!r) return r;
    if (!at_end()) {
      return fail(peek() == ')' ? "unmatched ')'" : "unexpected character");
    }
    return r;
  }

 private:
  using Result = Expected<Regex, ParseError>;

  bool at_end() const { return pos_ >= src_.size(); }
  char32_t peek(std::size_t k = 0) const {
    return pos_ + k < src_.size() ? src_[pos_ + k] : static_cast<char32_t>(-1);
  }
  bool eat(char32_t c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool looking_at(std::u32string_view s) const {
    return src_.compare(pos_, s.size(), s) == 0;
  }
  Unexpected<ParseError> fail(std::string msg) const { return fail_at(pos_, std::move(msg)); }
  static Unexpected<ParseError> fail_at(std::size_t p, std::string msg) {
    return Unexpected{ParseError{p, std::move(msg)}};
  }

  Result parse_disjunction() {
    std::vector<Regex> alternatives;
    auto first = parse_alternative();
    if (!first) return first;
    alternatives.push_back(std::move(first).value());
    while (eat('|')) {
      auto next = parse_alternative();
      if (!next) return next;
      alternatives.push_back(std::move(next).value());
    }
    return re::alts(std::move(alternatives));
  }

  Result parse_alternative() {
    std::vector<Regex> terms;
    while (!at_end() && peek() != '|' && peek() != ')') {
      auto t = parse_term();
      if (!t) return t;
      terms.push_back(std::move(t).value());
    }
    return re::seq(std::move(terms));
  }

  Result parse_term() {
    const std::size_t start = pos_;
    bool quantifiable = true;
    Result atom = Regex{};
    if (eat('^')) {
      atom = re::anchor(AnchorKind::InputStart);
      quantifiable = false;
    } else if (eat('$')) {
      atom = re::anchor(AnchorKind::InputEnd);
      quantifiable = false;
    } else if (looking_at(U"\\b")) {
      pos_ += 2;
      atom = re::anchor(AnchorKind::WordBoundary);
      quantifiable = false;
    } else if (looking_at(U"\\B")) {
      pos_ += 2;
      atom = re::anchor(AnchorKind::NotWordBoundary);
      quantifiable = false;
    } else if (looking_at(U"(?=") || looking_at(U"(?!") || looking_at(U"(?<=") ||
               looking_at(U"(?<!")) {
      LookKind kind;
      if (looking_at(U"(?=")) {
        kind = LookKind::Ahead;
      } else if (looking_at(U"(?!")) {
        kind = LookKind::NegAhead;
      } else if (looking_at(U"(?<=")) {
        kind = LookKind::Behind;
      } else {
        kind = LookKind::NegBehind;
      }
      pos_ += is_lookbehind(kind) ? 4 : 3;
      auto body = parse_disjunction();
      if (!body) return body;
      if (!eat(')')) return fail("unterminated lookaround");
      atom = re::look(kind, std::move(body).value());
      quantifiable = !u_ && !is_lookbehind(kind);
    } else {
      atom = parse_atom();
      if (!atom) return atom;
    }

    if (!at_end() && (peek() == '*' || peek() == '+' || peek() == '?' || peek() == '{')) {
      const std::size_t qpos = pos_;
      auto q = parse_quantifier();
      if (!q) return Unexpected{std::move(q).error()};
      if (!quantifiable) return fail_at(qpos, "nothing to repeat");
      (void)start;
      return re::quant(std::move(atom).value(), q.value());
    }
    return atom;
  }

  Expected<Quantifier, ParseError> parse_quantifier() {
    Quantifier q;
    if (eat('*')) {
      q = Quantifier::star();
    } else if (eat('+')) {
      q = Quantifier::plus();
    } else if (eat('?')) {
      q = Quantifier::optional();
    } else {
      const std::size_t open = pos_;
      eat('{');
      auto lo = parse_decimal();
      if (!lo) return fail_at(open, "incomplete quantifier");
      q.min = *lo;
      if (eat(',')) {
        if (peek() == '}') {
          q.max = std::nullopt;
        } else {
          auto hi = parse_decimal();
          if (!hi) return fail_at(open, "incomplete quantifier");
          q.max = *hi;
        }
      } else {
        q.max = *lo;
      }
      if (!eat('}')) return fail_at(open, "incomplete quantifier");
    }
    if (eat('?')) q.greedy = false;
    return q;
  }

  // Saturates at 2^64 - 1.
  std::optional<std::uint64_t> parse_decimal() {
    if (!is_ascii_digit(peek())) return std::nullopt;
    std::uint64_t v = 0;
    constexpr std::uint64_t kMax = ~std::uint64_t{0};
    while (is_ascii_digit(peek())) {
      std::uint64_t d = peek() - '0';
      v = v > (kMax - d) / 10 ? kMax : v * 10 + d;
      ++pos_;
    }
    return v;
  }

  Result parse_atom() {
    const char32_t c = peek();
    switch (c) {
      case '.':
        ++pos_;
        return re::dot();
      case '(':
        return parse_group();
      case '[':
        return parse_class();
      case '\\':
        return parse_atom_escape();
      case '*': case '+': case '?': case '{':
        return fail("nothing to repeat");
      case '}':
        return fail("lone '}'");
      case ']':
        if (u_) return fail("lone ']'");
        ++pos_;
        return re::chr(']');
      default:
        ++pos_;
        return re::chr(c);
    }
  }

  Result parse_group() {
    const std::size_t open = pos_;
    eat('(');
    std::optional<std::string> name;
    bool capturing = true;
    if (eat('?')) {
      if (eat(':')) {
        capturing = false;
      } else if (peek() == '<') {
        ++pos_;
        auto n = parse_group_name();
        if (!n) return Unexpected{std::move(n).error()};
        name = std::move(n).value();
      } else {
        return fail("invalid group");
      }
    }
    auto body = parse_disjunction();
    if (!body) return body;
    if (!eat(')')) return fail_at(open, "unterminated group");
    if (!capturing) return re::ncgroup(std::move(body).value());
    return re::group(std::move(body).value(), std::move(name));
  }

  // After `<`; consumes through `>`.
  Expected<std::string, ParseError> parse_group_name() {
    const std::size_t start = pos_;
    std::u32string name;
    if (!is_group_name_start(peek())) return fail("invalid group name");
    while (!at_end() && peek() != '>') {
      char32_t c = peek();
      if (!is_group_name_part(c)) return fail("invalid group name");
      name.push_back(c);
      ++pos_;
    }
    if (!eat('>')) return fail_at(start, "unterminated group name");
    return utf8_from_code_points(name);
  }

  Result parse_atom_escape() {
    const std::size_t start = pos_;
    eat('\\');
    if (at_end()) return fail_at(start, "\\ at end of pattern");
    const char32_t c = peek();
    if (c >= '1' && c <= '9') {
      auto n = parse_decimal();
      return re::backref(*n);
    }
    if (c == 'k') {
      ++pos_;
      if (!eat('<')) return fail_at(start, "\\k must be followed by a group name");
      auto n = parse_group_name();
      if (!n) return Unexpected{std::move(n).error()};
      return re::named_backref(std::move(n).value());
    }
    if (auto kind = class_escape_from_letter(c)) {
      ++pos_;
      return re::class_escape(*kind);
    }
    if (u_ && (c == 'p' || c == 'P')) {
      auto p = parse_property_escape();
      if (!p) return Unexpected{std::move(p).error()};
      const auto& prop = p.value();
      return re::property(prop.name, prop.value, prop.negated);
    }
    auto ch = parse_character_escape(/*in_class=*/false);
    if (!ch) return Unexpected{std::move(ch).error()};
    return re::chr(ch.value());
  }

  // At `p` or `P`.
  Expected<node::UnicodeProperty, ParseError> parse_property_escape() {
    const std::size_t start = pos_ - 1;
    bool negated = peek() == 'P';
    ++pos_;
    if (!eat('{')) return fail_at(start, "invalid property escape");
    std::string name;
    std::string value;
    bool saw_eq = false;
    while (!at_end() && peek() != '}') {
      char32_t c = peek();
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || is_ascii_digit(c) || c == '_';
      if (c == '=' && !saw_eq) {
        saw_eq = true;
        ++pos_;
        continue;
      }
      if (!ok) return fail("invalid property name");
      (saw_eq ? value : name) += static_cast<char>(c);
      ++pos_;
    }
    if (!eat('}')) return fail_at(start, "unterminated property escape");
    if (name.empty() || (saw_eq && value.empty())) return fail_at(start, "invalid property escape");
    if (saw_eq) {
      if (name == "gc" || name == "General_Category") {
        name = "General_Category";
        if (auto v = canonical_general_category(value)) value = *v;
      }
    } else if (auto v = canonical_general_category(name)) {
      name = "General_Category";
      value = *v;
    }
    return node::UnicodeProperty{name, value, negated};
  }

  // A CharacterEscape (plus identity escapes); positioned after `\`.
  Expected<char32_t, ParseError> parse_character_escape(bool in_class) {
    const std::size_t start = pos_ - 1;
    const char32_t c = peek();
    ++pos_;
    switch (c) {
      case 'f': return char32_t{0x0C};
      case 'n': return char32_t{0x0A};
      case 'r': return char32_t{0x0D};
      case 't': return char32_t{0x09};
      case 'v': return char32_t{0x0B};
      case 'c': {
        char32_t l = peek();
        if ((l >= 'a' && l <= 'z') || (l >= 'A' && l <= 'Z')) {
          ++pos_;
          return static_cast<char32_t>(l % 32);
        }
        return fail_at(start, "invalid control escape");
      }
      case '0':
        if (is_ascii_digit(peek())) return fail_at(start, "invalid decimal escape");
        return char32_t{0};
      case 'x': {
        int h1 = hex_value(peek());
        int h2 = hex_value(peek(1));
        if (h1 >= 0 && h2 >= 0) {
          pos_ += 2;
          return static_cast<char32_t>(h1 * 16 + h2);
        }
        if (u_) return fail_at(start, "invalid hex escape");
        return char32_t{'x'};
      }
      case 'u': {
        auto v = parse_unicode_escape_body();
        if (v) return *v;
        if (u_) return fail_at(start, "invalid unicode escape");
        return char32_t{'u'};
      }
      default:
        break;
    }
    if (is_ascii_digit(c)) return fail_at(start, "invalid decimal escape");
    if (u_) {
      if (is_syntax_character(c) || c == '/' || (in_class && c == '-')) return c;
      return fail_at(start, "invalid escape");
    }
    if (c == 'k') return fail_at(start, "\\k must be followed by a group name");
    return c;
  }

  // After `\u`. Restores the position on failure.
  std::optional<char32_t> parse_unicode_escape_body() {
    const std::size_t save = pos_;
    if (u_ && peek() == '{') {
      ++pos_;
      char32_t v = 0;
      std::size_t digits = 0;
      while (hex_value(peek()) >= 0) {
        v = v * 16 + static_cast<char32_t>(hex_value(peek()));
        ++pos_;
        if (v > 0x10FFFF) {
          pos_ = save;
          return std::nullopt;
        }
        ++digits;
      }
      if (digits == 0 || !eat('}')) {
        pos_ = save;
        return std::nullopt;
      }
      return v;
    }
    auto hex4 = [&]() -> std::optional<char32_t> {
      char32_t v = 0;
      for (int i = 0; i < 4; ++i) {
        int h = hex_value(peek(i));
        if (h < 0) return std::nullopt;
        v = v * 16 + static_cast<char32_t>(h);
      }
      pos_ += 4;
      return v;
    };
    auto lead = hex4();
    if (!lead) {
      pos_ = save;
      return std::nullopt;
    }
    if (u_ && is_lead_surrogate(*lead) && looking_at(U"\\u")) {
      const std::size_t before_trail = pos_;
      pos_ += 2;
      auto trail = hex4();
      if (trail && is_trail_surrogate(*trail)) {
        return 0x10000 + ((*lead - 0xD800) << 10) + (*trail - 0xDC00);
      }
      pos_ = before_trail;
    }
    return lead;
  }

  struct ClassAtomValue {
    std::optional<char32_t> ch;  // set for single characters
    std::optional<node::ClassAtom> set;  // set for class escapes and properties
  };

  Result parse_class() {
    const std::size_t open = pos_;
    eat('[');
    bool negated = eat('^');
    std::vector<node::ClassAtom> atoms;
    while (true) {
      if (at_end()) return fail_at(open, "unterminated character class");
      if (eat(']')) break;
      const std::size_t a_pos = pos_;
      auto a = parse_class_atom();
      if (!a) return Unexpected{std::move(a).error()};
      if (peek() == '-' && peek(1) != ']' && pos_ + 1 < src_.size()) {
        ++pos_;
        auto b = parse_class_atom();
        if (!b) return Unexpected{std::move(b).error()};
        if (!a.value().ch || !b.value().ch) return fail_at(a_pos, "invalid class range");
        atoms.push_back(node::ClassRange{*a.value().ch, *b.value().ch});
        continue;
      }
      if (a.value().ch) {
        atoms.push_back(node::ClassRange{*a.value().ch, *a.value().ch});
      } else {
        atoms.push_back(*a.value().set);
      }
    }
    return re::cls(negated, std::move(atoms));
  }

  Expected<ClassAtomValue, ParseError> parse_class_atom() {
    const char32_t c = peek();
    if (c != '\\') {
      ++pos_;
      return ClassAtomValue{c, std::nullopt};
    }
    const std::size_t start = pos_;
    ++pos_;
    if (at_end()) return fail_at(start, "\\ at end of pattern");
    const char32_t e = peek();
    if (e == 'b') {
      ++pos_;
      return ClassAtomValue{char32_t{0x08}, std::nullopt};
    }
    if (auto kind = class_escape_from_letter(e)) {
      ++pos_;
      return ClassAtomValue{std::nullopt, node::ClassAtom{node::ClassEscape{*kind}}};
    }
    if (u_ && (e == 'p' || e == 'P')) {
      auto p = parse_property_escape();
      if (!p) return Unexpected{std::move(p).error()};
      return ClassAtomValue{std::nullopt, node::ClassAtom{std::move(p).value()}};
    }
    if (e == 'B' && u_) return fail_at(start, "invalid escape");
    auto ch = parse_character_escape(/*in_class=*/true);
    if (!ch) return Unexpected{std::move(ch).error()};
    return ClassAtomValue{ch.value(), std::nullopt};
  }

  std::u32string src_;
  bool u_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses UTF-8 pattern text.
inline Expected<Regex, ParseError> parse_pattern(std::string_view text, const Flags& flags) {
  auto cps = decode_utf8(text);
  if (!cps) return Unexpected{ParseError{0, cps.error()}};
  std::u32string src = std::move(cps).value();
  if (!flags.unicode) {
    // Without `u` the pattern is a sequence of code units.
    std::u16string units = utf16_from_code_points(src);
    src.assign(units.begin(), units.end());
  }
  return detail::Parser(std::move(src), flags).parse();
}

// ---------------------------------------------------------------------------
// Canonical printer

namespace detail {

class Printer {
 public:
  explicit Printer(const Flags& flags) : u_(flags.unicode) {}

  std::string print(const Regex& root) {
    emit(*root, /*in_sequence=*/false);
    return std::move(out_);
  }

 private:
  void put(std::string_view s) {
    out_ += s;
    after_backref_ = false;
  }

  void put_char(char32_t c, bool in_class) {
    const bool was_backref = after_backref_;
    after_backref_ = false;
    switch (c) {
      case 0x09: out_ += "\\t"; return;
      case 0x0A: out_ += "\\n"; return;
      case 0x0B: out_ += "\\v"; return;
      case 0x0C: out_ += "\\f"; return;
      case 0x0D: out_ += "\\r"; return;
      default: break;
    }
    if (c < 0x20 || c == 0x7F || (was_backref && detail::is_ascii_digit(c))) {
      hex2(c);
      return;
    }
    if (c < 0x80) {
      bool escape = is_syntax_character(c) || c == '/' || (in_class && c == '-');
      if (escape) out_ += '\\';
      out_ += static_cast<char>(c);
      return;
    }
    if (u_) {
      static constexpr char kHex[] = "0123456789ABCDEF";
      std::string digits;
      for (char32_t v = c; v; v >>= 4) digits.insert(digits.begin(), kHex[v & 0xF]);
      out_ += "\\u{" + digits + "}";
      return;
    }
    if (c > 0xFFFF) {
      for (char16_t unit : utf16_from_code_points(std::u32string(1, c))) hex4(unit);
      return;
    }
    hex4(c);
  }

  void hex2(char32_t c) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    out_ += "\\x";
    out_ += kHex[(c >> 4) & 0xF];
    out_ += kHex[c & 0xF];
  }

  void hex4(char32_t c) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    out_ += "\\u";
    for (int shift = 12; shift >= 0; shift -= 4) out_ += kHex[(c >> shift) & 0xF];
  }

  void wrap(const RegexNode& n) {
    put("(?:");
    emit(n, false);
    put(")");
  }

  static bool is_atom(const RegexNode& n, bool unicode) {
    switch (n.kind()) {
      case NodeKind::Char:
      case NodeKind::Dot:
      case NodeKind::CharacterClass:
      case NodeKind::ClassEscape:
      case NodeKind::UnicodeProperty:
      case NodeKind::Group:
      case NodeKind::NonCapturingGroup:
      case NodeKind::Backreference:
      case NodeKind::NamedBackreference:
        return true;
      case NodeKind::Lookaround:
        return !unicode && !is_lookbehind(n.as<node::Lookaround>().kind);
      default:
        return false;
    }
  }

  void emit_property(const node::UnicodeProperty& p) {
    put(p.negated ? "\\P{" : "\\p{");
    out_ += p.name;
    if (!p.value.empty()) out_ += "=" + p.value;
    out_ += "}";
  }

  void emit_class_atom(const node::ClassAtom& a) {
    if (const auto* r = std::get_if<node::ClassRange>(&a)) {
      put_class_char(r->lo);
      if (r->hi != r->lo) {
        out_ += '-';
        put_class_char(r->hi);
      }
    } else if (const auto* e = std::get_if<node::ClassEscape>(&a)) {
      out_ += '\\';
      out_ += to_letter(e->kind);
    } else {
      emit_property(std::get<node::UnicodeProperty>(a));
    }
  }

  void put_class_char(char32_t c) {
    if (c == 0x08) {
      out_ += "\\b";
      return;
    }
    put_char(c, /*in_class=*/true);
  }

  void emit_quantifier(const Quantifier& q) {
    if (q.min == 0 && !q.max) {
      out_ += '*';
    } else if (q.min == 1 && !q.max) {
      out_ += '+';
    } else if (q.min == 0 && q.max && *q.max == 1) {
      out_ += '?';
    } else if (q.max && *q.max == q.min) {
      out_ += "{" + std::to_string(q.min) + "}";
    } else if (!q.max) {
      out_ += "{" + std::to_string(q.min) + ",}";
    } else {
      out_ += "{" + std::to_string(q.min) + "," + std::to_string(*q.max) + "}";
    }
    if (!q.greedy) out_ += '?';
    after_backref_ = false;
  }

  // `in_sequence`: n is an operand of a concatenation, so Empty and
  // Disjunction need a group to keep their shape.
  void emit(const RegexNode& n, bool in_sequence) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, node::Empty>) {
            if (in_sequence) put("(?:)");
          } else if constexpr (std::is_same_v<T, node::Char>) {
            put_char(x.value, false);
          } else if constexpr (std::is_same_v<T, node::Dot>) {
            put(".");
          } else if constexpr (std::is_same_v<T, node::CharacterClass>) {
            put(x.negated ? "[^" : "[");
            for (const auto& a : x.atoms) emit_class_atom(a);
            put("]");
          } else if constexpr (std::is_same_v<T, node::ClassEscape>) {
            put(std::string("\\") + to_letter(x.kind));
          } else if constexpr (std::is_same_v<T, node::UnicodeProperty>) {
            emit_property(x);
          } else if constexpr (std::is_same_v<T, node::Disjunction>) {
            if (in_sequence) {
              wrap(n);
              return;
            }
            if (x.left->template is<node::Disjunction>()) {
              wrap(*x.left);
            } else {
              emit(*x.left, false);
            }
            put("|");
            emit(*x.right, false);
          } else if constexpr (std::is_same_v<T, node::Concat>) {
            if (x.left->template is<node::Concat>()) {
              wrap(*x.left);
            } else {
              emit(*x.left, true);
            }
            emit(*x.right, true);
          } else if constexpr (std::is_same_v<T, node::Quantified>) {
            if (is_atom(*x.body, u_)) {
              emit(*x.body, true);
            } else {
              wrap(*x.body);
            }
            emit_quantifier(x.quantifier);
          } else if constexpr (std::is_same_v<T, node::Group>) {
            put(x.name ? "(?<" + *x.name + ">" : std::string("("));
            emit(*x.body, false);
            put(")");
          } else if constexpr (std::is_same_v<T, node::NonCapturingGroup>) {
            wrap(*x.body);
          } else if constexpr (std::is_same_v<T, node::Lookaround>) {
            static constexpr const char* kOpen[] = {"(?=", "(?<=", "(?!", "(?<!"};
            put(kOpen[static_cast<int>(x.kind)]);
            emit(*x.body, false);
            put(")");
          } else if constexpr (std::is_same_v<T, node::Anchor>) {
            static constexpr const char* kText[] = {"^", "$", "\\b", "\\B"};
            put(kText[static_cast<int>(x.kind)]);
          } else if constexpr (std::is_same_v<T, node::Backreference>) {
            put("\\" + std::to_string(x.index));
            after_backref_ = true;
          } else if constexpr (std::is_same_v<T, node::NamedBackreference>) {
            put("\\k<" + x.name + ">");
          }
        },
        n.variant());
  }

  bool u_;
  bool after_backref_ = false;
  std::string out_;
};

}  // namespace detail

// Pattern text (UTF-8) that parses back to the same AST for any AST the
// parser produces, and to an equivalent one for any other AST.
inline std::string print_pattern(const Regex& root, const Flags& flags) {
  return detail::Printer(flags).print(root);
}

}  // namespace cpsre
