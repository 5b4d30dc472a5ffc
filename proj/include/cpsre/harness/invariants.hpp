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

// Instrumented runs that check the engine's safety properties case by case:
//
//   progress     each continuation call gets a valid state on the same
//                input that has not moved against the matcher's direction
//   provenance   a non-mismatch result is a value some continuation call
//                returned
//   no-failure   no AssertionFailure, no OutOfFuel with the exact fuel
//   fuel bound   with unbounded fuel, RepeatMatcher chains never go
//                deeper than min + remainingChars + 1
//   transparency instrumented and plain runs give identical records
//
// ResourceLimit outcomes are counted apart and are not violations.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cpsre/compiler.hpp"
#include "cpsre/executor.hpp"
#include "cpsre/harness/escape.hpp"
#include "cpsre/harness/generator.hpp"
#include "cpsre/optimizer.hpp"
#include "cpsre/parser.hpp"

namespace cpsre::harness {

enum class ViolationKind {
  ContinuationProgress,
  StateValidity,
  ResultProvenance,
  AssertionFailure,
  OutOfFuel,
  FuelBound,
  InstrumentationChangedResult,
  StrictlyNullableProgress,
  CompileFailure,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::ContinuationProgress: return "ContinuationProgress";
    case ViolationKind::StateValidity: return "StateValidity";
    case ViolationKind::ResultProvenance: return "ResultProvenance";
    case ViolationKind::AssertionFailure: return "AssertionFailure";
    case ViolationKind::OutOfFuel: return "OutOfFuel";
    case ViolationKind::FuelBound: return "FuelBound";
    case ViolationKind::InstrumentationChangedResult: return "InstrumentationChangedResult";
    case ViolationKind::StrictlyNullableProgress: return "StrictlyNullableProgress";
    case ViolationKind::CompileFailure: return "CompileFailure";
  }
  return "?";
}

struct Violation {
  std::size_t case_id = 0;
  ViolationKind kind;
  std::string detail;
  std::string repro;
};

// Per-site maximum of RepeatMatcher depth against its bound.
struct RepeatDepthStat {
  std::uint64_t max_depth = 0;
  std::uint64_t bound_at_max = 0;
  std::uint64_t max_excess = 0;  // max(depth - bound, 0) over all calls
};

struct SuiteReport {
  std::size_t cases = 0;
  std::size_t matched = 0;
  std::size_t resource_limited = 0;
  std::size_t continuation_checks = 0;
  std::size_t repeat_calls = 0;
  std::uint64_t max_repeat_depth = 0;
  std::vector<Violation> violations;
  std::vector<std::size_t> resource_limited_ids;

  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind k) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [&](const Violation& v) { return v.kind == k; }));
  }
};

// Shell command that reproduces a case with the command-line tool.
inline std::string repro_command(const Regex& ast, const Flags& flags, std::u16string_view input,
                                 std::size_t start) {
  auto quote = [](const std::string& s) {
    std::string q = "'";
    for (char c : s) {
      if (c == '\'') {
        q += "'\\''";
      } else {
        q += c;
      }
    }
    return q + "'";
  };
  std::string cmd = "cpsre match " + quote(print_pattern(ast, flags)) + " " +
                    quote(encode_escaped(input)) + " --start " + std::to_string(start);
  std::string letters = flags.to_string();
  if (!letters.empty()) cmd += " --flags " + letters;
  return cmd;
}

// Records invariant violations for one run.
template <class Char>
class InvariantProbe : public MatchProbe<Char> {
 public:
  explicit InvariantProbe(bool check_sn = true) : check_sn_(check_sn) {}

  void on_continue(const NodeSite& site, const MatchState<Char>& x,
                   const MatchState<Char>& y) override {
    ++checks;
    if (y.env != x.env) {
      add(ViolationKind::ContinuationProgress, site, "continuation state has a different input");
      return;
    }
    const std::size_t len = y.input().size();
    if (y.end_index > len) {
      add(ViolationKind::StateValidity, site, "endIndex beyond input");
    }
    for (const auto& slot : y.captures.slots()) {
      if (slot && (slot->start > slot->end || slot->end > len)) {
        add(ViolationKind::StateValidity, site, "malformed capture range");
        break;
      }
    }
    bool forward = site.direction == Direction::Forward;
    if (forward ? y.end_index < x.end_index : y.end_index > x.end_index) {
      add(ViolationKind::ContinuationProgress, site,
          "endIndex moved from " + std::to_string(x.end_index) + " to " +
              std::to_string(y.end_index) + " going " + to_string(site.direction));
    }
    if (check_sn_ && y.end_index != x.end_index && is_strictly_nullable(site)) {
      add(ViolationKind::StrictlyNullableProgress, site, "strictly nullable node consumed input");
    }
  }

  void on_exit(const NodeSite& site, const MatchState<Char>&, const MatchOutcome<Char>& r,
               bool from_continuation) override {
    if (r.ok() && r.value() && !from_continuation) {
      add(ViolationKind::ResultProvenance, site, "result was not returned by the continuation");
    }
  }

  void on_repeat(const NodeSite& site, std::uint64_t depth, std::uint64_t bound) override {
    ++repeat_calls;
    auto& s = repeat[site.id];
    if (depth > s.max_depth) {
      s.max_depth = depth;
      s.bound_at_max = bound;
    }
    if (depth > bound) s.max_excess = std::max(s.max_excess, depth - bound);
  }

  std::vector<std::pair<ViolationKind, std::string>> found;
  std::map<std::size_t, RepeatDepthStat> repeat;
  std::size_t checks = 0;
  std::size_t repeat_calls = 0;

 private:
  bool is_strictly_nullable(const NodeSite& site) {
    auto it = sn_cache_.find(site.id);
    if (it == sn_cache_.end()) it = sn_cache_.emplace(site.id, strictly_nullable(*site.node)).first;
    return it->second;
  }

  void add(ViolationKind k, const NodeSite& site, std::string detail) {
    if (found.size() < 16) {
      found.emplace_back(k, detail + " at " + to_string(site.node->kind()) + " " +
                                site.context.path());
    }
  }

  bool check_sn_;
  std::map<std::size_t, bool> sn_cache_;
};

struct SuiteOptions {
  RunOptions run;             // depth limit for every run
  bool check_fuel_bound = true;
  bool check_transparency = true;
};

namespace detail {

template <CharacterModel M>
void run_case(const GeneratedCase& c, const CompiledPattern<M>& p, const SuiteOptions& opts,
              SuiteReport& report) {
  using Char = typename M::Char;
  auto chars = M::tokenize(c.input);
  std::span<const Char> input(chars);
  auto violation = [&](ViolationKind k, std::string detail) {
    report.violations.push_back(
        {c.id, k, std::move(detail), repro_command(c.ast, c.flags, c.input, c.start)});
  };

  // Instrumented run with exact fuel.
  InvariantProbe<Char> probe;
  RunOptions exact = opts.run;
  exact.fuel_mode = FuelMode::Exact;
  exact.fuel_offset = 0;
  auto instrumented = exec(p, input, c.start, exact, &probe);
  report.continuation_checks += probe.checks;
  for (auto& [k, d] : probe.found) violation(k, d);
  if (!instrumented.ok()) {
    switch (instrumented.error().kind) {
      case EngineErrorKind::ResourceLimit:
        ++report.resource_limited;
        report.resource_limited_ids.push_back(c.id);
        return;
      case EngineErrorKind::AssertionFailure:
        violation(ViolationKind::AssertionFailure, instrumented.error().detail);
        return;
      case EngineErrorKind::OutOfFuel:
        violation(ViolationKind::OutOfFuel, instrumented.error().detail);
        return;
    }
  }
  if (instrumented.value()) ++report.matched;

  if (opts.check_transparency) {
    auto plain = exec(p, input, c.start, exact);
    if (!plain.ok() || plain.value() != instrumented.value()) {
      violation(ViolationKind::InstrumentationChangedResult, "plain run differs");
    }
  }

  if (opts.check_fuel_bound) {
    InvariantProbe<Char> depth_probe(/*check_sn=*/false);
    RunOptions unbounded = opts.run;
    unbounded.fuel_mode = FuelMode::Unbounded;
    auto r = exec(p, input, c.start, unbounded, &depth_probe);
    report.repeat_calls += depth_probe.repeat_calls;
    if (r.ok() && r.value() != instrumented.value()) {
      violation(ViolationKind::FuelBound, "unbounded fuel changed the result");
    }
    for (const auto& [site, stat] : depth_probe.repeat) {
      report.max_repeat_depth = std::max(report.max_repeat_depth, stat.max_depth);
      if (stat.max_excess > 0) {
        violation(ViolationKind::FuelBound,
                  "RepeatMatcher depth exceeded its bound by " + std::to_string(stat.max_excess) +
                      " at site " + std::to_string(site));
      }
    }
  }
}

}  // namespace detail

// Runs every case; violations come out sorted by case id.
inline SuiteReport run_invariant_suite(const std::vector<GeneratedCase>& cases,
                                       const SuiteOptions& opts = {}) {
  SuiteReport report;
  for (const auto& c : cases) {
    ++report.cases;
    auto p = Pattern::compile(c.ast, c.flags);
    if (!p) {
      report.violations.push_back({c.id, ViolationKind::CompileFailure, p.error().to_string(),
                                   repro_command(c.ast, c.flags, c.input, c.start)});
      continue;
    }
    std::visit([&](const auto& compiled) { detail::run_case(c, compiled, opts, report); },
               p->impl());
  }
  return report;
}

}  // namespace cpsre::harness
