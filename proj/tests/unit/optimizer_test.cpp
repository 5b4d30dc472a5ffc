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


#include <string>

#include "test_util.hpp"

namespace cpsre {
namespace {

using testing::flags_of;
using testing::parse;

bool sn(const std::string& src, const std::string& flags = "") { return strictly_nullable(*parse(src, flags)); }

TEST(StrictlyNullable, Examples) {
  EXPECT_TRUE(sn("(?=(a))"));
  EXPECT_TRUE(sn("(?:^|$)"));
  EXPECT_FALSE(sn("a?"));
  EXPECT_FALSE(sn("(a)\\1"));
  EXPECT_FALSE(strictly_nullable(*re::backref(1)));
  EXPECT_TRUE(sn(""));
  EXPECT_TRUE(sn("\\b\\B"));
  EXPECT_TRUE(sn("(?<!a+)(?<x>(?:$){2,5}?)"));
  EXPECT_FALSE(sn("."));
  EXPECT_FALSE(sn("[]"));
  EXPECT_FALSE(sn("\\d"));
  EXPECT_FALSE(sn("\\p{L}", "u"));
  EXPECT_FALSE(sn("^|a"));
}

std::string rewrite(const std::string& src, std::size_t* count = nullptr,
                    std::vector<std::string>* warnings = nullptr) {
  auto r = rewrite_strictly_nullable_stars(parse(src));
  if (count) *count = r.rewrites;
  if (warnings) *warnings = r.warnings;
  return print_pattern(r.root, Flags{});
}

TEST(Rewrite, Examples) {
  std::size_t n = 0;
  auto r = rewrite_strictly_nullable_stars(parse("(?:(?=a))*b"));
  EXPECT_TRUE(equal(r.root, re::concat(re::empty(), re::chr('b'))));
  EXPECT_EQ(r.rewrites, 1u);
  EXPECT_EQ(rewrite("a*", &n), "a*");
  EXPECT_EQ(n, 0u);
  EXPECT_EQ(rewrite("(?:$)*?", &n), "(?:$)*?");
  EXPECT_EQ(n, 0u);
  EXPECT_EQ(rewrite("(?:$){0,}", &n), "");
  EXPECT_EQ(rewrite("(?:$){0,3}", &n), "(?:$){0,3}");
  EXPECT_EQ(rewrite("(?:(?:^)*|b)c", &n), "(?:|b)c");
  EXPECT_EQ(n, 1u);
  // Nested stars collapse from the bottom up.
  EXPECT_EQ(rewrite("(?:(?:\\b)*)*a", &n), "(?:)a");
  EXPECT_EQ(n, 2u);
}

TEST(Rewrite, RefusedWhenBodyHasCapturingGroups) {
  std::size_t n = 0;
  std::vector<std::string> warnings;
  EXPECT_EQ(rewrite("(?:(?=(a)))*b\\1", &n, &warnings), "(?:(?=(a)))*b\\1");
  EXPECT_EQ(n, 0u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("root/ConcatLeft"), std::string::npos);
}

TEST(Rewrite, IdempotentAndKeepsPatternsValid) {
  harness::FuzzConfig cfg;
  harness::Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    auto [ast, flags] = i % 2 ? harness::generate_regex(cfg, rng) : harness::generate_strictly_nullable(cfg, rng);
    auto once = rewrite_strictly_nullable_stars(ast);
    auto twice = rewrite_strictly_nullable_stars(once.root);
    EXPECT_TRUE(equal(once.root, twice.root)) << print_pattern(ast, flags);
    EXPECT_EQ(twice.rewrites, 0u);
    EXPECT_TRUE(validate(once.root, flags).empty()) << print_pattern(ast, flags);
  }
}

EquivalenceReport check(const std::string& a, const std::string& b, const std::u32string& alphabet,
                        std::size_t max_len) {
  auto r = check_equivalence(parse(a), parse(b), Flags{}, alphabet, max_len);
  EXPECT_TRUE(r.has_value()) << (r ? "" : r.error());
  return r ? r.value() : EquivalenceReport{};
}

TEST(Equivalence, EnumerationOrder) {
  auto s = enumerate_strings(U"ab", 2);
  std::vector<std::u16string> want{u"", u"a", u"b", u"aa", u"ab", u"ba", u"bb"};
  EXPECT_EQ(s, want);
  EXPECT_EQ(enumerate_strings(U"", 3), std::vector<std::u16string>{u""});
}

TEST(Equivalence, DuplicatedAlternativeIsObservable) {
  const std::string a = "(?:(a)|(a))\\2()$", b = "(?:(a))\\2()$";
  auto r = check(a, b, U"a", 2);
  ASSERT_FALSE(r.equivalent);
  // The shortest witness is "a": the second alternative is never tried and
  // group 3 of one side is group 2 of the other.
  EXPECT_EQ(r.counterexample->input, u"a");
  EXPECT_EQ(r.counterexample->start, 0u);
  auto aa = check_equivalence_on(parse(a), parse(b), Flags{}, {u"aa"});
  ASSERT_TRUE(aa.has_value());
  EXPECT_FALSE(aa->equivalent);
  // Only the original reaches its second alternative, where \2 is defined.
  ASSERT_TRUE(aa->counterexample->a.has_value());
  EXPECT_FALSE(aa->counterexample->b.has_value());
  EXPECT_EQ(aa->counterexample->a->end_index, 2u);
  EXPECT_EQ(aa->counterexample->a->captures[1]->start, 0u);
}

TEST(Equivalence, DisjunctionIsNotCommutative) {
  auto r = check("a|ab", "ab|a", U"ab", 2);
  ASSERT_FALSE(r.equivalent);
  EXPECT_EQ(r.counterexample->input, u"ab");
  EXPECT_EQ(r.counterexample->a->end_index, 1u);
  EXPECT_EQ(r.counterexample->b->end_index, 2u);
}

TEST(Equivalence, GreedyQuestionMark) {
  auto r = check("()?", "(?:()|)", U"a", 2);
  ASSERT_FALSE(r.equivalent);
  EXPECT_EQ(r.counterexample->input, u"");
  EXPECT_FALSE(r.counterexample->a->captures[0].has_value());
  EXPECT_TRUE(r.counterexample->b->captures[0].has_value());
}

TEST(Equivalence, LazyQuestionMark) {
  auto r = check("(?=(a))??ab\\1c", "(?:|(?=(a)))ab\\1c", U"abc", 4);
  ASSERT_FALSE(r.equivalent);
  EXPECT_EQ(r.counterexample->input, u"abac");
  EXPECT_FALSE(r.counterexample->a.has_value());
  EXPECT_TRUE(r.counterexample->b.has_value());
}

TEST(Equivalence, EquivalentPairs) {
  EXPECT_TRUE(check("a|a", "a", U"ab", 3).equivalent);
  EXPECT_TRUE(check("(?:a|b)*", "[ab]*", U"abc", 4).equivalent);
  auto r = check("(?:(?=a))*b", "b", U"ab", 4);
  EXPECT_TRUE(r.equivalent);
  EXPECT_GT(r.cases_checked, 0u);
}

TEST(Equivalence, RejectsInvalidPatterns) {
  auto r = check_equivalence(re::backref(2), re::empty(), Flags{}, U"a", 1);
  EXPECT_FALSE(r.has_value());
}

// Replacing a greedy star over a strictly nullable body with Empty never
// changes an anchored result.
TEST(Rewrite, SoundOnRandomStrictlyNullableBodies) {
  harness::FuzzConfig cfg;
  cfg.alphabet = U"ab";
  harness::Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    auto [body, flags] = harness::generate_strictly_nullable(cfg, rng);
    ASSERT_TRUE(strictly_nullable(*body));
    auto r = check_equivalence(re::star(body), re::empty(), flags, U"ab", 4);
    ASSERT_TRUE(r.has_value()) << r.error();
    ASSERT_TRUE(r->equivalent) << print_pattern(re::star(body), flags) << " /" << flags.to_string();
  }
}

// Every continuation call made by a strictly nullable node leaves endIndex
// where it was.
TEST(StrictlyNullable, MatchersNeverConsume) {
  harness::FuzzConfig cfg;
  harness::Rng rng(5);
  std::size_t runs = 0;
  for (int i = 0; i < 500; ++i) {
    auto [ast, flags] = harness::generate_strictly_nullable(cfg, rng);
    Regex wrapped = re::seq({re::star(re::chr('a')), ast, re::star(re::chr('b'))});
    auto p = Pattern::compile(wrapped, flags).value();
    for (const auto& input : enumerate_strings(U"abc", 3)) {
      std::visit(
          [&](const auto& compiled) {
            using M = typename std::decay_t<decltype(compiled)>::Model;
            auto chars = M::tokenize(input);
            harness::InvariantProbe<typename M::Char> probe;
            auto r = exec(compiled, std::span<const typename M::Char>(chars), 0, {}, &probe);
            ASSERT_TRUE(r.ok());
            ++runs;
            for (const auto& [kind, detail] : probe.found) ADD_FAILURE() << to_string(kind) << " " << detail;
          },
          p.impl());
    }
  }
  EXPECT_EQ(runs, 500u * 40u);
}

}  // namespace
}  // namespace cpsre
