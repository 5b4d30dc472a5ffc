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

// Plain-text conformance corpus.
//
//   pattern :: input :: start :: expectation
//
// Fields are separated by " :: ". `pattern` is raw source, or `/source/flags`
// to set flags. `input` uses the escape syntax of escape.hpp and may be
// empty. `start` is the lastIndex to scan from. Expectations:
//
//   MATCH <index> <endIndex> g1=<s>:<e> g2=- ...   every group, in order
//   NOMATCH
//   ERROR                                          pattern is rejected
//
// Indices count characters of the pattern's model (code points under `u`).
// Blank lines and lines starting with `#` are ignored.

#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cpsre/executor.hpp"
#include "cpsre/expected.hpp"
#include "cpsre/harness/escape.hpp"
#include "cpsre/harness/invariants.hpp"

namespace cpsre::harness {

struct ExpectedMatch {
  std::size_t index = 0;
  std::size_t end_index = 0;
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> groups;
};

struct CorpusCase {
  std::size_t line = 0;
  std::string text;  // the original line
  std::string pattern;
  Flags flags;
  std::u16string input;
  std::size_t start = 0;
  enum class Expect { Match, NoMatch, Error } expect = Expect::NoMatch;
  ExpectedMatch match;  // when expect == Match
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::optional<std::size_t> parse_index(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  std::size_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

inline Expected<ExpectedMatch, std::string> parse_match(const std::string& rest) {
  std::istringstream in(rest);
  std::string a, b;
  if (!(in >> a >> b)) return Unexpected{std::string("MATCH needs index and endIndex")};
  auto i = parse_index(a);
  auto e = parse_index(b);
  if (!i || !e) return Unexpected{std::string("bad MATCH indices")};
  ExpectedMatch m{*i, *e, {}};
  std::string tok;
  while (in >> tok) {
    const std::string want = "g" + std::to_string(m.groups.size() + 1) + "=";
    if (tok.rfind(want, 0) != 0) return Unexpected{"expected " + want + "..., got " + tok};
    std::string val = tok.substr(want.size());
    if (val == "-") {
      m.groups.emplace_back(std::nullopt);
      continue;
    }
    auto colon = val.find(':');
    if (colon == std::string::npos) return Unexpected{"bad group range " + tok};
    auto s = parse_index(std::string_view(val).substr(0, colon));
    auto t = parse_index(std::string_view(val).substr(colon + 1));
    if (!s || !t) return Unexpected{"bad group range " + tok};
    m.groups.emplace_back(std::pair{*s, *t});
  }
  return m;
}

}  // namespace detail

// Nullopt for blank and comment lines.
inline Expected<std::optional<CorpusCase>, std::string> parse_corpus_line(const std::string& line,
                                                                         std::size_t line_no) {
  std::string t = detail::trim(line);
  if (t.empty() || t[0] == '#') return std::optional<CorpusCase>{};
  std::vector<std::string> fields;
  std::size_t pos = 0;
  const std::string sep = " :: ";
  while (true) {
    std::size_t next = line.find(sep, pos);
    if (next == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + sep.size();
  }
  if (fields.size() != 4) return Unexpected{"expected 4 fields separated by ' :: '"};
  CorpusCase c;
  c.line = line_no;
  c.text = line;
  std::string pattern = detail::trim(fields[0]);
  if (pattern.size() >= 2 && pattern[0] == '/') {
    std::size_t slash = pattern.rfind('/');
    if (slash == 0) return Unexpected{std::string("unterminated /pattern/flags")};
    auto flags = Flags::parse(pattern.substr(slash + 1));
    if (!flags) return Unexpected{"bad flags: " + pattern.substr(slash + 1)};
    c.flags = *flags;
    pattern = pattern.substr(1, slash - 1);
  }
  c.pattern = pattern;
  auto input = decode_escaped(fields[1]);
  if (!input) return Unexpected{"bad input: " + input.error()};
  c.input = std::move(input).value();
  auto start = detail::parse_index(detail::trim(fields[2]));
  if (!start) return Unexpected{std::string("bad start index")};
  c.start = *start;
  std::string expect = detail::trim(fields[3]);
  if (expect == "NOMATCH") {
    c.expect = CorpusCase::Expect::NoMatch;
  } else if (expect == "ERROR") {
    c.expect = CorpusCase::Expect::Error;
  } else if (expect.rfind("MATCH ", 0) == 0) {
    auto m = detail::parse_match(expect.substr(6));
    if (!m) return Unexpected{m.error()};
    c.expect = CorpusCase::Expect::Match;
    c.match = std::move(m).value();
  } else {
    return Unexpected{"unknown expectation: " + expect};
  }
  return std::optional<CorpusCase>{std::move(c)};
}

// Serializes a result in expectation syntax.
inline std::string describe(const std::optional<ExecRecord>& rec) {
  if (!rec) return "NOMATCH";
  std::string s = "MATCH " + std::to_string(rec->index) + " " + std::to_string(rec->end_index);
  for (std::size_t k = 0; k < rec->captures.size(); ++k) {
    s += " g" + std::to_string(k + 1) + "=";
    const auto& c = rec->captures[k];
    s += c ? std::to_string(c->start) + ":" + std::to_string(c->end) : std::string("-");
  }
  return s;
}

struct CorpusFailure {
  std::size_t line = 0;
  std::string message;
};

struct CorpusReport {
  std::size_t cases = 0;
  std::size_t passed = 0;
  std::vector<CorpusFailure> failures;   // wrong results and invariant violations
  std::vector<CorpusFailure> malformed;  // lines that did not parse
  bool ok() const { return failures.empty() && malformed.empty(); }
};

namespace detail {

// Exec with the invariant probe attached, plus a plain run to confirm the
// probe changes nothing.
template <CharacterModel M>
Expected<std::optional<ExecRecord>, std::string> checked_exec(const CompiledPattern<M>& p,
                                                              std::u16string_view input,
                                                              std::size_t start,
                                                              const RunOptions& run) {
  using Char = typename M::Char;
  auto chars = M::tokenize(input);
  std::span<const Char> span(chars);
  InvariantProbe<Char> probe;
  auto instrumented = exec(p, span, start, run, &probe);
  if (!probe.found.empty()) {
    return Unexpected{std::string(to_string(probe.found.front().first)) + ": " +
                      probe.found.front().second};
  }
  if (!instrumented.ok()) {
    return Unexpected{std::string("engine error ") + to_string(instrumented.error().kind) + " " +
                      instrumented.error().detail};
  }
  auto plain = exec(p, span, start, run);
  if (!plain.ok() || plain.value() != instrumented.value()) {
    return Unexpected{std::string("instrumented and plain runs differ")};
  }
  return instrumented.value();
}

}  // namespace detail

inline std::optional<std::string> check_corpus_case(const CorpusCase& c, const RunOptions& run = {}) {
  auto p = Pattern::from_source(c.pattern, c.flags);
  if (!p) {
    if (c.expect == CorpusCase::Expect::Error) return std::nullopt;
    return "pattern rejected: " + p.error().to_string();
  }
  if (c.expect == CorpusCase::Expect::Error) return std::string("expected ERROR, pattern compiled");
  auto got = std::visit(
      [&](const auto& compiled) { return detail::checked_exec(compiled, c.input, c.start, run); },
      p->impl());
  if (!got) return got.error();
  const auto& rec = got.value();
  std::string want;
  if (c.expect == CorpusCase::Expect::NoMatch) {
    want = "NOMATCH";
  } else {
    ExecRecord shape;
    shape.index = c.match.index;
    shape.end_index = c.match.end_index;
    for (const auto& g : c.match.groups) {
      shape.captures.push_back(g ? std::optional<CaptureRecord>{CaptureRecord{g->first, g->second, ""}}
                                 : std::nullopt);
    }
    want = describe(shape);
  }
  std::string have = describe(rec);
  if (want != have) return "expected " + want + ", got " + have;
  return std::nullopt;
}

inline CorpusReport run_corpus(std::istream& in, const RunOptions& run = {}) {
  CorpusReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto parsed = parse_corpus_line(line, line_no);
    if (!parsed) {
      report.malformed.push_back({line_no, parsed.error()});
      continue;
    }
    if (!parsed.value()) continue;
    ++report.cases;
    if (auto failure = check_corpus_case(*parsed.value(), run)) {
      report.failures.push_back({line_no, *failure});
    } else {
      ++report.passed;
    }
  }
  return report;
}

}  // namespace cpsre::harness
