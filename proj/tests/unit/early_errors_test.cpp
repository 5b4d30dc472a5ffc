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

using testing::parse;

std::vector<EarlyErrorKind> kinds(const std::string& src, const std::string& flags = "") {
  std::vector<EarlyErrorKind> out;
  for (const auto& e : validate(parse(src, flags), testing::flags_of(flags))) out.push_back(e.kind);
  return out;
}

using K = EarlyErrorKind;

TEST(Validate, QuantifierMinGreaterThanMax) {
  EXPECT_EQ(kinds("a{3,2}"), std::vector<K>{K::QuantifierMinGtMax});
  EXPECT_TRUE(kinds("a{2,2}").empty());
  EXPECT_TRUE(kinds("a{2,}").empty());
}

TEST(Validate, DuplicateGroupName) {
  EXPECT_EQ(kinds("(?<G>a)(?<G>b)"), std::vector<K>{K::DuplicateGroupName});
  EXPECT_TRUE(kinds("(?<G>a)(?<H>b)").empty());
}

TEST(Validate, DanglingNamedBackreference) {
  EXPECT_EQ(kinds("\\k<G>"), std::vector<K>{K::DanglingNamedBackref});
  EXPECT_TRUE(kinds("\\k<G>(?<G>a)").empty());
}

TEST(Validate, ForwardNumericBackreferenceIsFine) {
  EXPECT_TRUE(kinds("\\1(a)").empty());
}

TEST(Validate, NumericBackreferenceOutOfRangeInBothModes) {
  EXPECT_EQ(kinds("(a)\\2"), std::vector<K>{K::NumericBackrefOutOfRange});
  EXPECT_EQ(kinds("(a)\\2", "u"), std::vector<K>{K::NumericBackrefOutOfRange});
}

TEST(Validate, InvalidClassRange) {
  EXPECT_EQ(kinds("[z-a]"), std::vector<K>{K::InvalidClassRange});
  EXPECT_EQ(kinds("[a-a]"), std::vector<K>{});
  // Same protection for ASTs that never went through the parser.
  Regex r = re::cls(false, {node::ClassRange{'z', 'a'}});
  auto errors = validate(r, Flags{});
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].kind, K::InvalidClassRange);
}

TEST(Validate, AllErrorsInPreOrder) {
  auto errors = validate(parse("(?<A>a{2,1})(?<A>b)\\k<Z>c{5,4}"), Flags{});
  ASSERT_EQ(errors.size(), 4u);
  EXPECT_EQ(errors[0].kind, K::QuantifierMinGtMax);
  EXPECT_EQ(errors[1].kind, K::DuplicateGroupName);
  EXPECT_EQ(errors[2].kind, K::DanglingNamedBackref);
  EXPECT_EQ(errors[3].kind, K::QuantifierMinGtMax);
}

TEST(Validate, LineFormatNamesKindAndPath) {
  auto errors = validate(parse("x(?:a{3,2})"), Flags{});
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].to_line(), "EARLY_ERROR QuantifierMinGtMax at root/ConcatRight/NonCapturingInner");
  EXPECT_TRUE(equal(reconstruct_root(parse("a{3,2}"), errors[0].location), parse("x(?:a{3,2})")));
}

TEST(Validate, GeneratedPatternsAlwaysValidateAndCompile) {
  harness::FuzzConfig cfg;
  harness::Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    auto [ast, flags] = harness::generate_regex(cfg, rng);
    ASSERT_TRUE(validate(ast, flags).empty());
    // Compilation totality for validated patterns.
    auto p = Pattern::compile(ast, flags);
    ASSERT_TRUE(p.has_value()) << print_pattern(ast, flags) << " " << p.error().to_string();
  }
}

TEST(Validate, CompileRefusesUnvalidatedPattern) {
  auto p = Pattern::from_source("a{2,1}", Flags{});
  ASSERT_FALSE(p.has_value());
  EXPECT_EQ(p.error().kind, PatternError::Kind::Early);
  EXPECT_EQ(p.error().to_string(), "EARLY_ERROR QuantifierMinGtMax at root");
}

}  // namespace
}  // namespace cpsre
