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
#include <vector>

#include "test_util.hpp"

namespace cpsre {
namespace {

using testing::compile;
using testing::group;
using testing::run;
using testing::span;

TEST(Exec, ScansForward) {
  auto r = run("b", u"ab");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->index, 1u);
  EXPECT_EQ(r->end_index, 2u);
  EXPECT_EQ(r->matched, "b");
  EXPECT_EQ(r->input_length, 2u);
}

TEST(Exec, StickyAttemptsOnlyLastIndex) {
  EXPECT_FALSE(run("b", u"ab", "y"));
  EXPECT_TRUE(run("b", u"ab", "y", 1));
}

TEST(Exec, MatchedTextAndCaptures) {
  auto r = run("a*(b*)(a*)", u"abbaaac");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->matched, "abbaaa");
  ASSERT_EQ(r->captures.size(), 2u);
  EXPECT_EQ(r->captures[0]->text, "bb");
  EXPECT_EQ(r->captures[1]->text, "aaa");
  EXPECT_EQ(group(r, 2), span(3, 6));
}

TEST(Exec, NamedGroupsInGroupOrder) {
  auto r = run("(?<y>\\d+)-(x)?(?<m>\\d+)", u"on 2024-10");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->named_groups.size(), 2u);
  EXPECT_EQ(r->named_groups[0].first, "y");
  EXPECT_EQ(r->named_groups[0].second->text, "2024");
  EXPECT_EQ(r->named_groups[1].first, "m");
  EXPECT_EQ(r->named_groups[1].second->start, 8u);
  EXPECT_FALSE(r->captures[1].has_value());
}

TEST(Exec, LastIndexBeyondInputIsNoMatch) {
  EXPECT_FALSE(run("", u"ab", "", 3));
  EXPECT_TRUE(run("", u"ab", "", 2));
}

TEST(Exec, LastIndexHonoredWithoutGlobal) {
  auto r = run("a", u"aba", "", 1);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->index, 2u);
}

TEST(Exec, UnicodeModeIndicesCountCodePoints) {
  std::u16string input = u"\U0001F422x";
  Pattern p = compile("x", "u");
  auto r = p.exec(input, 0);
  ASSERT_TRUE(r.ok() && r.value());
  EXPECT_EQ(r.value()->index, 1u);
  ExecRecord units = p.to_code_unit_offsets(*r.value(), input);
  EXPECT_EQ(units.index, 2u);
  EXPECT_EQ(units.end_index, 3u);
  EXPECT_EQ(units.input_length, 3u);
  EXPECT_EQ(p.char_index_from_code_units(input, 2), 1u);
  EXPECT_EQ(p.length(input), 2u);

  Pattern q = compile("x");
  EXPECT_EQ(q.exec(input, 0).value()->index, 2u);
  EXPECT_EQ(q.length(input), 3u);
}

TEST(Exec, DotMatchesAstralOnlyUnderUnicode) {
  EXPECT_TRUE(run("^.$", u"\U0001F422", "u"));
  EXPECT_FALSE(run("^.$", u"\U0001F422"));
  EXPECT_TRUE(run("^..$", u"\U0001F422"));
}

TEST(Test, Examples) {
  EXPECT_TRUE(compile("a").test(u"ba").value());
  EXPECT_FALSE(compile("a").test(u"b").value());
  EXPECT_FALSE(compile("(?=(a))??ab\\1c").test(u"abac").value());
  EXPECT_TRUE(compile("(?:|(?=(a)))ab\\1c").test(u"abac").value());
}

std::vector<std::size_t> starts(const std::string& src, const std::u16string& input,
                                const std::string& flags = "") {
  auto r = compile(src, flags).match_all(input);
  EXPECT_TRUE(r.ok());
  std::vector<std::size_t> out;
  for (const auto& rec : r.value()) out.push_back(rec.index);
  return out;
}

TEST(MatchAll, Examples) {
  EXPECT_EQ(starts("a", u"aba"), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(starts("a*", u"b"), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(starts("a*", u"aab"), (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(starts("x", u""), (std::vector<std::size_t>{}));
  EXPECT_EQ(starts("", u""), (std::vector<std::size_t>{0}));
  // Empty matches advance by one code point under `u`.
  EXPECT_EQ(starts("", u"\U0001F422", "u"), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(starts("", u"\U0001F422"), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(MatchAll, AtMostOneRecordOnEmptyInput) {
  harness::FuzzConfig cfg;
  cfg.seed = 8;
  cfg.case_count = 500;
  for (const auto& c : harness::generate_cases(cfg)) {
    auto p = Pattern::compile(c.ast, c.flags).value();
    auto r = p.match_all(u"");
    if (!r.ok()) continue;
    EXPECT_LE(r.value().size(), 1u);
  }
}

// Non-sticky exec equals the first start position >= lastIndex at which
// the anchored match succeeds.
TEST(Exec, AgreesWithBruteForceScan) {
  harness::FuzzConfig cfg;
  cfg.seed = 99;
  cfg.case_count = 3000;
  for (const auto& c : harness::generate_cases(cfg)) {
    auto p = Pattern::compile(c.ast, c.flags).value();
    auto got = p.exec(c.input, c.start);
    ASSERT_TRUE(got.ok());
    std::optional<ExecRecord> want;
    const std::size_t len = p.length(c.input);
    for (std::size_t i = c.start; i <= len; ++i) {
      auto r = p.match_at(c.input, i);
      ASSERT_TRUE(r.ok());
      if (r.value()) {
        want = r.value();
        break;
      }
      if (c.flags.sticky) break;
    }
    ASSERT_EQ(got.value(), want) << harness::repro_command(c.ast, c.flags, c.input, c.start);
    if (want) {
      EXPECT_LE(want->index, want->end_index);
      for (const auto& cap : want->captures) {
        if (cap) {
          EXPECT_LE(cap->end, want->input_length);
        }
      }
    }
  }
}

}  // namespace
}  // namespace cpsre
