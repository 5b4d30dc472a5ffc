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


// Runs the command-line tool as a subprocess.

#include <sys/wait.h>

#include <cstdio>
#include <string>

#include "test_util.hpp"

namespace cpsre {
namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string("'") + CPSRE_CLI + "' " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  CliRun r;
  std::FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json json_of(const CliRun& r) {
  auto j = nlohmann::json::parse(r.out, nullptr, false);
  EXPECT_FALSE(j.is_discarded()) << r.out;
  return j;
}

TEST(Cli, MatchPrintsRecord) {
  CliRun r = cli("match 'a(b*)c' abbcd");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "MATCH 0 4 g1=1:3");
  r = cli("match 'a(b*)c' abbcd --json");
  ASSERT_EQ(r.code, 0);
  auto j = json_of(r);
  EXPECT_EQ(j["index"], 0);
  EXPECT_EQ(j["endIndex"], 4);
  EXPECT_EQ(j["captures"][0]["text"], "bb");
  EXPECT_EQ(j["captures"][0]["start"], 1);
}

TEST(Cli, MatchExitCodes) {
  EXPECT_EQ(cli("match b ab --sticky --start 0").code, 1);
  EXPECT_EQ(cli("match b ab --sticky --start 1").code, 0);
  CliRun r = cli("match 'a{2,1}' aa", true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("EARLY_ERROR QuantifierMinGtMax"), std::string::npos) << r.out;
  r = cli("match '(' x", true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("PARSE_ERROR at 0"), std::string::npos);
}

TEST(Cli, MatchUnicodeIndicesAndEscapes) {
  auto j = json_of(cli("match --flags u x '\\uD83D\\uDC22x' --json"));
  EXPECT_EQ(j["index"], 1);
  EXPECT_EQ(j["unit"], "code_point");
  j = json_of(cli("match x '\\uD83D\\uDC22x' --json"));
  EXPECT_EQ(j["index"], 2);
  EXPECT_EQ(j["unit"], "code_unit");
}

TEST(Cli, UnknownOptionsAreRejectedWithUsage) {
  CliRun r = cli("match a a --frobnicate", true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("Usage"), std::string::npos);
  EXPECT_EQ(cli("match a a --flags q").code, 2);
  EXPECT_EQ(cli("").code, 2);
}

TEST(Cli, TestAndValidate) {
  EXPECT_EQ(cli("test a ba").code, 0);
  EXPECT_EQ(cli("test a b").code, 1);
  EXPECT_EQ(cli("validate a").code, 0);
  CliRun r = cli("validate '(?<A>a)(?<A>b)'");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "EARLY_ERROR DuplicateGroupName at root/ConcatRight\n");
  auto j = json_of(cli("validate 'a{2,1}' --json"));
  EXPECT_EQ(j["valid"], false);
  EXPECT_EQ(j["errors"][0]["kind"], "QuantifierMinGtMax");
}

TEST(Cli, AstJsonRoundTrips) {
  CliRun r = cli("ast '(?:(a)|(a))b' --json");
  ASSERT_EQ(r.code, 0);
  auto decoded = ast_from_json(r.out);
  ASSERT_TRUE(decoded.has_value());
  EXPECT_TRUE(equal(decoded->ast, testing::parse("(?:(a)|(a))b")));
  CliRun back = cli("ast --ast-json " CPSRE_SAMPLES_DIR "/disjunction_trace.ast.json --json");
  ASSERT_EQ(back.code, 0);
  EXPECT_TRUE(equal(ast_from_json(back.out)->ast, testing::parse("(?:(?:ab)|.)b")));
  EXPECT_EQ(cli("match --ast-json " CPSRE_SAMPLES_DIR "/disjunction_trace.ast.json ab").code, 0);
  EXPECT_EQ(cli("ast --ast-json /nonexistent.json").code, 2);
}

TEST(Cli, CheckRewrite) {
  CliRun r = cli("check-rewrite 'a|ab' 'ab|a' --alphabet ab --max-len 2 --json");
  EXPECT_EQ(r.code, 1);
  auto j = json_of(r);
  EXPECT_EQ(j["equivalent"], false);
  EXPECT_EQ(j["counterexample"]["input"], "ab");
  EXPECT_EQ(j["counterexample"]["start"], 0);
  EXPECT_EQ(cli("check-rewrite '(?:(?=a))*b'").code, 0);
  EXPECT_EQ(cli("check-rewrite 'a|a' a --alphabet ab --max-len 3").code, 0);
}

TEST(Cli, FuzzIsDeterministic) {
  CliRun a = cli("fuzz --seed 9 --cases 300 --json");
  CliRun b = cli("fuzz --seed 9 --cases 300 --json");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto j = json_of(a);
  EXPECT_EQ(j["cases"], 300);
  EXPECT_TRUE(j["violations"].empty());
}

TEST(Cli, CorpusAndDiff) {
  EXPECT_EQ(cli("corpus " CPSRE_SAMPLES_DIR "/conformance.corpus").code, 0);
  EXPECT_EQ(cli("corpus /nonexistent").code, 2);
  // A dead oracle is an infrastructure error, not a disagreement.
  CliRun r = cli("diff --oracle-cmd false --cases 5", true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("OracleUnavailable"), std::string::npos);
  // An oracle that never matches disagrees with some cases.
  EXPECT_EQ(cli("diff --cases 50 --oracle-cmd "
                "'while read -r l; do echo \"{\\\"status\\\":\\\"ok\\\",\\\"matched\\\":false}\"; done'")
                .code,
            1);
}

}  // namespace
}  // namespace cpsre
