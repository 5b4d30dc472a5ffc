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


#include "test_util.hpp"

namespace cpsre {
namespace {

using testing::flags_of;
using testing::parse;

std::optional<ParseError> parse_error(const std::string& src, const std::string& flags = "") {
  auto r = parse_pattern(src, flags_of(flags));
  if (r) return std::nullopt;
  return r.error();
}

TEST(Parse, IdentityEscapeOnlyWithoutUnicode) {
  EXPECT_TRUE(equal(parse("\\A"), re::chr('A')));
  auto e = parse_error("\\A", "u");
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(e->position, 0u);
}

TEST(Parse, TraceExampleShape) {
  Regex want = re::concat(re::ncgroup(re::alt(re::group(re::concat(re::chr('a'), re::chr('b'))), re::dot())),
                          re::chr('b'));
  EXPECT_TRUE(equal(parse("(?:(ab)|.)b"), want));
  EXPECT_TRUE(equal(parse("(?:(ab)|.)b", "u"), want));
}

TEST(Parse, EarlyErrorsAreNotParseErrors) {
  EXPECT_TRUE(equal(parse("a{2,1}"), re::quant(re::chr('a'), Quantifier::range(2, 1))));
  EXPECT_FALSE(parse_error("(?<G>a)(?<G>b)").has_value());
  EXPECT_FALSE(parse_error("\\k<G>").has_value());
  EXPECT_FALSE(parse_error("[z-a]").has_value());
}

TEST(Parse, Quantifiers) {
  EXPECT_TRUE(equal(parse("a*?"), re::star(re::chr('a'), false)));
  EXPECT_TRUE(equal(parse("a+"), re::plus(re::chr('a'))));
  EXPECT_TRUE(equal(parse("a??"), re::opt(re::chr('a'), false)));
  EXPECT_TRUE(equal(parse("a{3}"), re::quant(re::chr('a'), Quantifier::exactly(3))));
  EXPECT_TRUE(equal(parse("a{3,}?"), re::quant(re::chr('a'), Quantifier::range(3, std::nullopt, false))));
  EXPECT_EQ(parse_error("a**")->position, 2u);
  EXPECT_EQ(parse_error("a{")->position, 1u);
}

TEST(Parse, AtomsAndEscapes) {
  EXPECT_TRUE(equal(parse("."), re::dot()));
  EXPECT_TRUE(equal(parse("\\d"), re::class_escape(ClassEscapeKind::Digit)));
  EXPECT_TRUE(equal(parse("\\W"), re::class_escape(ClassEscapeKind::NotWord)));
  EXPECT_TRUE(equal(parse("^"), re::anchor(AnchorKind::InputStart)));
  EXPECT_TRUE(equal(parse("\\B"), re::anchor(AnchorKind::NotWordBoundary)));
  EXPECT_TRUE(equal(parse("\\0"), re::chr(0)));
  EXPECT_TRUE(equal(parse("\\cJ"), re::chr('\n')));
  EXPECT_TRUE(equal(parse("\\x41\\u0042"), re::concat(re::chr('A'), re::chr('B'))));
  EXPECT_TRUE(equal(parse("\\t\\n\\v\\f\\r"), re::seq({re::chr('\t'), re::chr('\n'), re::chr('\v'),
                                                        re::chr('\f'), re::chr('\r')})));
  EXPECT_TRUE(parse_error("\\01").has_value());
  EXPECT_TRUE(parse_error("\\c").has_value());
}

TEST(Parse, Groups) {
  EXPECT_TRUE(equal(parse("(?<name>a)"), re::group(re::chr('a'), "name")));
  EXPECT_TRUE(equal(parse("(?=a)"), re::look(LookKind::Ahead, re::chr('a'))));
  EXPECT_TRUE(equal(parse("(?!a)"), re::look(LookKind::NegAhead, re::chr('a'))));
  EXPECT_TRUE(equal(parse("(?<=a)"), re::look(LookKind::Behind, re::chr('a'))));
  EXPECT_TRUE(equal(parse("(?<!a)"), re::look(LookKind::NegBehind, re::chr('a'))));
  EXPECT_TRUE(equal(parse("()"), re::group(re::empty())));
  EXPECT_TRUE(equal(parse("a|"), re::alt(re::chr('a'), re::empty())));
  EXPECT_EQ(parse_error("(")->position, 0u);
  EXPECT_EQ(parse_error("a)")->position, 1u);
  EXPECT_EQ(parse_error("(?<1a>x)")->position, 3u);
  EXPECT_TRUE(parse_error("(?").has_value());
}

TEST(Parse, Backreferences) {
  EXPECT_TRUE(equal(parse("(a)\\1"), re::concat(re::group(re::chr('a')), re::backref(1))));
  EXPECT_TRUE(equal(parse("\\k<n>(?<n>a)"), re::concat(re::named_backref("n"), re::group(re::chr('a'), "n"))));
  // Out-of-range numbers are backreferences; early errors reject them.
  EXPECT_TRUE(equal(parse("\\8"), re::backref(8)));
  EXPECT_TRUE(equal(parse("\\12"), re::backref(12)));
  EXPECT_TRUE(parse_error("\\k").has_value());
  EXPECT_TRUE(parse_error("\\k", "u").has_value());
  EXPECT_EQ(parse_error("\\k<x")->position, 3u);
}

TEST(Parse, CharacterClasses) {
  EXPECT_TRUE(equal(parse("[^a-c\\d]"),
                    re::cls(true, {node::ClassRange{'a', 'c'}, node::ClassEscape{ClassEscapeKind::Digit}})));
  EXPECT_TRUE(equal(parse("[\\b]"), re::cls(false, {node::ClassRange{8, 8}})));
  EXPECT_TRUE(equal(parse("[-a-]"), re::cls(false, {node::ClassRange{'-', '-'}, node::ClassRange{'a', 'a'},
                                                     node::ClassRange{'-', '-'}})));
  EXPECT_TRUE(equal(parse("[]"), re::cls(false, {})));
  EXPECT_TRUE(parse_error("[\\d-z]").has_value());
  EXPECT_EQ(parse_error("[a")->position, 0u);
}

TEST(Parse, LoneBracketsAndBraces) {
  EXPECT_TRUE(equal(parse("]"), re::chr(']')));
  EXPECT_TRUE(parse_error("]", "u").has_value());
  EXPECT_TRUE(parse_error("{").has_value());
  EXPECT_TRUE(parse_error("}").has_value());
}

TEST(Parse, QuantifiedLookaheadOnlyWithoutUnicode) {
  EXPECT_TRUE(equal(parse("(?=a)*"), re::star(re::look(LookKind::Ahead, re::chr('a')))));
  EXPECT_TRUE(parse_error("(?=a)*", "u").has_value());
  EXPECT_TRUE(parse_error("(?<=a)*").has_value());
}

TEST(Parse, UnicodeModeEscapes) {
  EXPECT_TRUE(equal(parse("\\u{1F422}", "u"), re::chr(0x1F422)));
  EXPECT_TRUE(equal(parse("\\uD83D\\uDC22", "u"), re::chr(0x1F422)));
  EXPECT_TRUE(equal(parse("\\uD83D\\uDC22"), re::concat(re::chr(0xD83D), re::chr(0xDC22))));
  EXPECT_TRUE(equal(parse("\U0001F422", "u"), re::chr(0x1F422)));
  EXPECT_TRUE(equal(parse("\U0001F422"), re::concat(re::chr(0xD83D), re::chr(0xDC22))));
  EXPECT_TRUE(parse_error("\\u{110000}", "u").has_value());
  EXPECT_TRUE(parse_error("\\-", "u").has_value());  // not a syntax character
  EXPECT_TRUE(equal(parse("\\/", "u"), re::chr('/')));
}

TEST(Parse, UnicodeProperties) {
  EXPECT_TRUE(equal(parse("\\p{L}", "u"), re::property("General_Category", "Letter")));
  EXPECT_TRUE(equal(parse("\\P{gc=Lu}", "u"), re::property("General_Category", "Uppercase_Letter", true)));
  EXPECT_TRUE(equal(parse("\\p{General_Category=Decimal_Number}", "u"),
                    re::property("General_Category", "Decimal_Number")));
  auto p = Pattern::from_source("\\p{Script=Xanadu}", flags_of("u"));
  ASSERT_FALSE(p.has_value());
  EXPECT_EQ(p.error().kind, PatternError::Kind::Compile);
}

TEST(Print, Canonical) {
  EXPECT_EQ(print_pattern(parse("a(b*)c"), Flags{}), "a(b*)c");
  EXPECT_EQ(print_pattern(parse("(?:(a)|(a))b"), Flags{}), "(?:(a)|(a))b");
  EXPECT_EQ(print_pattern(re::concat(re::backref(1), re::chr('0')), Flags{}), "\\1\\x30");
  EXPECT_EQ(print_pattern(re::chr(0x1F422), flags_of("u")), "\\u{1F422}");
  EXPECT_EQ(print_pattern(re::star(re::concat(re::chr('a'), re::chr('b'))), Flags{}), "(?:ab)*");
  EXPECT_EQ(print_pattern(re::concat(re::empty(), re::chr('b')), Flags{}), "(?:)b");
}

// Drops every NonCapturingGroup; the printer adds them for precedence.
Regex strip_groups(const Regex& n) {
  if (const auto* g = n->get_if<node::NonCapturingGroup>()) return strip_groups(g->body);
  auto kids = children(*n);
  if (kids.empty()) return n;
  std::vector<Regex> k;
  for (auto& [child, f] : kids) k.push_back(strip_groups(child));
  return std::visit(
      [&](const auto& x) -> Regex {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, node::Disjunction>) {
          return re::alt(k[0], k[1]);
        } else if constexpr (std::is_same_v<T, node::Concat>) {
          return re::concat(k[0], k[1]);
        } else if constexpr (std::is_same_v<T, node::Quantified>) {
          return re::quant(k[0], x.quantifier);
        } else if constexpr (std::is_same_v<T, node::Group>) {
          return re::group(k[0], x.name);
        } else if constexpr (std::is_same_v<T, node::Lookaround>) {
          return re::look(x.kind, k[0]);
        } else {
          return n;
        }
      },
      n->variant());
}

// parse(print(r)) equals r up to non-capturing groups, and a second round
// trip is exact.
TEST(Print, RoundTripOnGeneratedAsts) {
  for (const char* alphabet : {"abc", "a-]\\^$.*", "a\xC5\xBF\xF0\x9D\x92\x9C"}) {
    harness::FuzzConfig cfg;
    cfg.alphabet = decode_utf8(alphabet).value();
    harness::Rng rng(21);
    for (int i = 0; i < 3000; ++i) {
      auto [ast, flags] = harness::generate_regex(cfg, rng);
      std::string printed = print_pattern(ast, flags);
      auto back = parse_pattern(printed, flags);
      ASSERT_TRUE(back.has_value()) << printed << " /" << flags.to_string() << ": " << back.error().to_string();
      ASSERT_TRUE(equal(strip_groups(back.value()), strip_groups(ast))) << printed << " /" << flags.to_string();
      std::string again = print_pattern(back.value(), flags);
      EXPECT_EQ(again, printed);
      auto back2 = parse_pattern(again, flags);
      ASSERT_TRUE(back2.has_value());
      ASSERT_TRUE(equal(back2.value(), back.value())) << printed;
    }
  }
}

TEST(Utf, ConversionsRoundTrip) {
  std::string s = "a\xC3\xA9\xF0\x9F\x90\xA2";
  EXPECT_EQ(utf8_from_utf16(utf16_from_utf8(s)), s);
  EXPECT_EQ(utf16_from_utf8(s), u"aé\U0001F422");
  EXPECT_FALSE(decode_utf8("\xC3").has_value());
  EXPECT_FALSE(decode_utf8("\xFF").has_value());
}

}  // namespace
}  // namespace cpsre
