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

// Continuation-passing compilation of a regex AST into matcher procedures.
//
// A Matcher takes a MatchState and a continuation. It either calls the
// continuation on some successor state and returns whatever that call
// returned, or returns Mismatch. Backtracking is the native call stack:
// a failed continuation returns Mismatch and the caller tries its next
// alternative.
//
// Every compiled node is wrapped so that a run can (a) enforce a depth
// limit and (b) report entry, continuation calls and exit to a probe.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cpsre/ast.hpp"
#include "cpsre/charmodel.hpp"
#include "cpsre/expected.hpp"
#include "cpsre/function_ref.hpp"

namespace cpsre {

enum class Direction { Forward, Backward };

inline const char* to_string(Direction d) {
  return d == Direction::Forward ? "Forward" : "Backward";
}

// ---------------------------------------------------------------------------
// Captures

struct CaptureRange {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const CaptureRange&, const CaptureRange&) = default;
};

// Immutable capture array with cheap copies. Groups are 1-based.
class Captures {
 public:
  using Slot = std::optional<CaptureRange>;

  Captures() : slots_(empty_slots()) {}
  explicit Captures(std::size_t groups)
      : slots_(groups == 0 ? empty_slots() : std::make_shared<const std::vector<Slot>>(groups)) {}

  std::size_t size() const { return slots_->size(); }
  const Slot& group(std::size_t k) const { return (*slots_)[k - 1]; }
  const std::vector<Slot>& slots() const { return *slots_; }

  Captures with_group(std::size_t k, Slot value) const {
    auto copy = std::make_shared<std::vector<Slot>>(*slots_);
    (*copy)[k - 1] = value;
    return Captures(std::move(copy));
  }

  // Clears groups first..first+count-1.
  Captures cleared(std::size_t first, std::size_t count) const {
    if (count == 0) return *this;
    auto copy = std::make_shared<std::vector<Slot>>(*slots_);
    for (std::size_t k = first; k < first + count; ++k) (*copy)[k - 1].reset();
    return Captures(std::move(copy));
  }

  friend bool operator==(const Captures& a, const Captures& b) {
    return a.slots_ == b.slots_ || *a.slots_ == *b.slots_;
  }

 private:
  explicit Captures(std::shared_ptr<const std::vector<Slot>> s) : slots_(std::move(s)) {}

  static const std::shared_ptr<const std::vector<Slot>>& empty_slots() {
    static const auto kEmpty = std::make_shared<const std::vector<Slot>>();
    return kEmpty;
  }

  std::shared_ptr<const std::vector<Slot>> slots_;
};

// ---------------------------------------------------------------------------
// Outcomes

enum class EngineErrorKind { AssertionFailure, OutOfFuel, ResourceLimit };

inline const char* to_string(EngineErrorKind k) {
  switch (k) {
    case EngineErrorKind::AssertionFailure: return "AssertionFailure";
    case EngineErrorKind::OutOfFuel: return "OutOfFuel";
    case EngineErrorKind::ResourceLimit: return "ResourceLimit";
  }
  return "?";
}

struct EngineError {
  EngineErrorKind kind;
  std::string detail;
};

// Success(T) or an internal engine error. Mismatch is a success value.
template <class T>
class EngineOutcome {
 public:
  EngineOutcome(T value) : v_(std::in_place_index<0>, std::move(value)) {}  // NOLINT
  EngineOutcome(EngineError err) : v_(std::in_place_index<1>, std::move(err)) {}  // NOLINT

  bool ok() const { return v_.index() == 0; }
  const T& value() const& { return std::get<0>(v_); }
  T&& value() && { return std::get<0>(std::move(v_)); }
  const EngineError& error() const { return std::get<1>(v_); }

 private:
  std::variant<T, EngineError> v_;
};

// ---------------------------------------------------------------------------
// Run environment and states

enum class FuelMode {
  Exact,      // initialFuel, optionally shifted by fuel_offset
  Unbounded,  // effectively infinite; used to measure recursion depth
};

struct RunStats {
  std::size_t peak_depth = 0;
};

struct RunOptions {
  std::size_t max_depth = 1'000'000;
  FuelMode fuel_mode = FuelMode::Exact;
  std::int64_t fuel_offset = 0;
  RunStats* stats = nullptr;
};

template <class Char>
class MatchProbe;

template <class Char>
struct RunEnv {
  std::span<const Char> input;
  RunOptions options;
  MatchProbe<Char>* probe = nullptr;
  std::size_t depth = 0;
  std::size_t peak_depth = 0;
};

template <class Char>
struct MatchState {
  RunEnv<Char>* env = nullptr;
  std::size_t end_index = 0;
  Captures captures;

  std::span<const Char> input() const { return env->input; }

  friend bool operator==(const MatchState& a, const MatchState& b) {
    return a.env == b.env && a.end_index == b.end_index && a.captures == b.captures;
  }
};

// nullopt is Mismatch.
template <class Char>
using MatchResult = std::optional<MatchState<Char>>;

template <class Char>
using MatchOutcome = EngineOutcome<MatchResult<Char>>;

template <class Char>
using Continuation = FunctionRef<MatchOutcome<Char>(const MatchState<Char>&)>;

template <class Char>
using Matcher = std::function<MatchOutcome<Char>(const MatchState<Char>&, Continuation<Char>)>;

template <class Char>
MatchOutcome<Char> mismatch() {
  return MatchResult<Char>{};
}

inline EngineError assertion_failure(std::string detail) {
  return {EngineErrorKind::AssertionFailure, std::move(detail)};
}

// A compiled node: where it sits in the pattern and which direction it
// was compiled for. Ids follow compilation order, which is pre-order.
struct NodeSite {
  std::size_t id = 0;
  Regex node;
  RegexContext context;
  Direction direction = Direction::Forward;
};

// Observer of a match run. All hooks default to no-ops.
template <class Char>
class MatchProbe {
 public:
  virtual ~MatchProbe() = default;
  virtual void on_enter(const NodeSite&, const MatchState<Char>&) {}
  // The matcher at `site`, invoked on x, called its continuation on y.
  virtual void on_continue(const NodeSite&, const MatchState<Char>& /*x*/,
                           const MatchState<Char>& /*y*/) {}
  // `from_continuation` is true when a non-mismatch result is the value
  // returned by one of the recorded continuation calls.
  virtual void on_exit(const NodeSite&, const MatchState<Char>& /*x*/,
                       const MatchOutcome<Char>& /*result*/, bool /*from_continuation*/) {}
  // One RepeatMatcher call: 1-based recursion depth and its fuel bound.
  virtual void on_repeat(const NodeSite&, std::uint64_t /*depth*/, std::uint64_t /*bound*/) {}
};

// ---------------------------------------------------------------------------
// Fuel

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b
             ? std::numeric_limits<std::uint64_t>::max()
             : a + b;
}

inline std::uint64_t remaining_chars(std::size_t input_length, std::size_t end_index,
                                     Direction dir) {
  if (dir == Direction::Backward) return end_index;
  return end_index <= input_length ? input_length - end_index : 0;
}

// min + remainingChars + 1.
inline std::uint64_t initial_fuel(std::uint64_t min, std::size_t input_length,
                                  std::size_t end_index, Direction dir) {
  return saturating_add(saturating_add(min, remaining_chars(input_length, end_index, dir)), 1);
}

inline std::uint64_t apply_fuel_policy(std::uint64_t fuel, const RunOptions& opts) {
  if (opts.fuel_mode == FuelMode::Unbounded) return std::numeric_limits<std::uint64_t>::max();
  if (opts.fuel_offset >= 0) return saturating_add(fuel, static_cast<std::uint64_t>(opts.fuel_offset));
  auto down = static_cast<std::uint64_t>(-opts.fuel_offset);
  return fuel > down ? fuel - down : 0;
}

// ---------------------------------------------------------------------------
// Primitive matchers

namespace matchers {

// The continuation that ends a run (or a lookaround body) successfully.
template <class Char>
struct Identity {
  MatchOutcome<Char> operator()(const MatchState<Char>& y) const { return MatchResult<Char>{y}; }
};

// Every member's canonical form, so that membership of Canonicalize(ch)
// answers "some a in A canonicalizes to Canonicalize(ch)".
template <CharacterModel M>
CharSet canonical_closure(const CharSet& set, const Flags& flags) {
  if (!flags.ignore_case) return set;
  static const std::vector<char32_t> kNonCanonical = [] {
    Flags f;
    f.ignore_case = true;
    return M::non_canonical_chars(f);
  }();
  std::vector<char32_t> extra;
  for (char32_t c : kNonCanonical) {
    if (set.contains(c)) extra.push_back(M::canonicalize_value(flags, c));
  }
  CharSet out = set;
  std::sort(extra.begin(), extra.end());
  for (std::size_t i = 0; i < extra.size();) {
    std::size_t j = i;
    while (j + 1 < extra.size() && extra[j + 1] <= extra[j] + 1) ++j;
    out.add_range(extra[i], extra[j]);
    i = j + 1;
  }
  return out;
}

template <CharacterModel M>
Matcher<typename M::Char> character_set_matcher(const CharSet& set, bool invert,
                                                const Flags& flags, Direction dir) {
  using Char = typename M::Char;
  return [canon = canonical_closure<M>(set, flags), invert, flags, dir](
             const MatchState<Char>& x, Continuation<Char> c) -> MatchOutcome<Char> {
    const std::size_t e = x.end_index;
    const std::size_t len = x.input().size();
    std::size_t index;
    std::size_t f;
    if (dir == Direction::Forward) {
      if (e >= len) return mismatch<Char>();
      f = e + 1;
      index = e;
    } else {
      if (e == 0 || e > len) return mismatch<Char>();
      f = e - 1;
      index = f;
    }
    if (index >= len) return assertion_failure("character index out of bounds");
    Char cc = M::canonicalize(flags, x.input()[index]);
    bool found = canon.contains(M::numeric_value(cc));
    if (found == invert) return mismatch<Char>();
    return c(MatchState<Char>{x.env, f, x.captures});
  };
}

template <CharacterModel M>
Matcher<typename M::Char> backreference_matcher(std::size_t group, const Flags& flags,
                                                Direction dir) {
  using Char = typename M::Char;
  return [group, flags, dir](const MatchState<Char>& x,
                             Continuation<Char> c) -> MatchOutcome<Char> {
    if (group == 0 || group > x.captures.size()) {
      return assertion_failure("backreference to missing group " + std::to_string(group));
    }
    const auto& cap = x.captures.group(group);
    if (!cap) return c(x);
    const auto input = x.input();
    const std::size_t len = input.size();
    if (cap->start > cap->end || cap->end > len) {
      return assertion_failure("malformed capture range");
    }
    const std::size_t n = cap->end - cap->start;
    const std::size_t e = x.end_index;
    std::size_t f;
    if (dir == Direction::Forward) {
      f = e + n;
      if (f > len) return mismatch<Char>();
    } else {
      if (n > e) return mismatch<Char>();
      f = e - n;
    }
    const std::size_t g = std::min(e, f);
    for (std::size_t i = 0; i < n; ++i) {
      if (M::canonicalize(flags, input[cap->start + i]) != M::canonicalize(flags, input[g + i])) {
        return mismatch<Char>();
      }
    }
    return c(MatchState<Char>{x.env, f, x.captures});
  };
}

// Lookarounds are atomic: the body runs with the identity continuation
// and only its first success counts.
template <class Char>
Matcher<Char> lookaround_matcher(LookKind kind, Matcher<Char> inner) {
  return [kind, inner = std::move(inner)](const MatchState<Char>& x,
                                          Continuation<Char> c) -> MatchOutcome<Char> {
    matchers::Identity<Char> id;
    MatchOutcome<Char> r = inner(x, id);
    if (!r.ok()) return r;
    if (is_negative(kind)) {
      if (r.value()) return mismatch<Char>();
      return c(x);
    }
    if (!r.value()) return mismatch<Char>();
    return c(MatchState<Char>{x.env, x.end_index, r.value()->captures});
  };
}

template <CharacterModel M>
Matcher<typename M::Char> anchor_matcher(AnchorKind kind, const Flags& flags) {
  using Char = typename M::Char;
  switch (kind) {
    case AnchorKind::InputStart:
      return [multiline = flags.multiline](const MatchState<Char>& x,
                                           Continuation<Char> c) -> MatchOutcome<Char> {
        const std::size_t e = x.end_index;
        if (e == 0 ||
            (multiline && e <= x.input().size() && is_line_terminator(x.input()[e - 1]))) {
          return c(x);
        }
        return mismatch<Char>();
      };
    case AnchorKind::InputEnd:
      return [multiline = flags.multiline](const MatchState<Char>& x,
                                           Continuation<Char> c) -> MatchOutcome<Char> {
        const std::size_t e = x.end_index;
        const std::size_t len = x.input().size();
        if (e == len || (multiline && e < len && is_line_terminator(x.input()[e]))) return c(x);
        return mismatch<Char>();
      };
    case AnchorKind::WordBoundary:
    case AnchorKind::NotWordBoundary:
      return [words = word_characters<M>(flags), want = kind == AnchorKind::WordBoundary](
                 const MatchState<Char>& x, Continuation<Char> c) -> MatchOutcome<Char> {
        const std::size_t e = x.end_index;
        const auto input = x.input();
        auto is_word = [&](std::size_t i) {
          return i < input.size() && words.contains(M::numeric_value(input[i]));
        };
        bool a = e > 0 && is_word(e - 1);
        bool b = is_word(e);
        if ((a != b) != want) return mismatch<Char>();
        return c(x);
      };
  }
  return nullptr;
}

}  // namespace matchers

// ---------------------------------------------------------------------------
// RepeatMatcher

template <class Char>
struct RepeatSpec {
  Matcher<Char> body;
  bool greedy = true;
  std::size_t paren_index = 0;
  std::size_t paren_count = 0;
  std::shared_ptr<const NodeSite> site;
};

// ECMA RepeatMatcher with an explicit fuel argument. `depth` counts the
// calls in the current chain (1 for the first); `bound` is the fuel the
// chain started with and is only reported to the probe.
template <class Char>
MatchOutcome<Char> repeat_matcher(const RepeatSpec<Char>& spec, std::uint64_t min,
                                  std::optional<std::uint64_t> max, const MatchState<Char>& x,
                                  Continuation<Char> c, std::uint64_t fuel,
                                  std::uint64_t depth = 1, std::uint64_t bound = 0) {
  if (fuel == 0) return EngineError{EngineErrorKind::OutOfFuel, "RepeatMatcher ran out of fuel"};
  if (x.env->probe && spec.site) x.env->probe->on_repeat(*spec.site, depth, bound);
  if (max && *max == 0) return c(x);
  auto d = [&](const MatchState<Char>& y) -> MatchOutcome<Char> {
    if (min == 0 && y.end_index == x.end_index) return mismatch<Char>();
    std::uint64_t min2 = min == 0 ? 0 : min - 1;
    std::optional<std::uint64_t> max2;
    if (max) max2 = *max - 1;
    return repeat_matcher(spec, min2, max2, y, c, fuel - 1, depth + 1, bound);
  };
  MatchState<Char> xr{x.env, x.end_index,
                      x.captures.cleared(spec.paren_index + 1, spec.paren_count)};
  if (min != 0) return spec.body(xr, d);
  if (!spec.greedy) {
    MatchOutcome<Char> z = c(x);
    if (!z.ok() || z.value()) return z;
    return spec.body(xr, d);
  }
  MatchOutcome<Char> z = spec.body(xr, d);
  if (!z.ok() || z.value()) return z;
  return c(x);
}

// ---------------------------------------------------------------------------
// Compilation

struct CompileError {
  enum class Kind { UnsupportedProperty, AssertionFailure };
  Kind kind;
  std::string message;
};

inline const char* to_string(CompileError::Kind k) {
  return k == CompileError::Kind::UnsupportedProperty ? "UnsupportedProperty"
                                                      : "AssertionFailure";
}

// An anchored match: the span [start, end_index) plus captures.
struct Match {
  std::size_t start = 0;
  std::size_t end_index = 0;
  Captures captures;
  friend bool operator==(const Match&, const Match&) = default;
};

template <CharacterModel M>
class CompiledPattern;

template <CharacterModel M>
Expected<CompiledPattern<M>, CompileError> compile_pattern(const Regex& root, const Flags& flags);

namespace detail {

template <CharacterModel M>
class PatternCompiler {
 public:
  using Char = typename M::Char;
  using State = MatchState<Char>;
  using Outcome = MatchOutcome<Char>;
  using Cont = Continuation<Char>;
  using Fn = Matcher<Char>;
  using Result = Expected<Fn, CompileError>;

  PatternCompiler(Regex root, Flags flags)
      : root_(std::move(root)),
        flags_(flags),
        capture_count_(count_left_capturing_parens_within(*root_)) {}

  std::size_t capture_count() const { return capture_count_; }
  std::vector<std::shared_ptr<const NodeSite>>& sites() { return sites_; }

  Result compile(const Regex& node, const RegexContext& ctx, Direction dir) {
    auto site = std::make_shared<NodeSite>(NodeSite{sites_.size(), node, ctx, dir});
    sites_.push_back(site);
    Result raw = std::visit([&](const auto& n) { return compile_node(n, node, ctx, dir, site); },
                            node->variant());
    if (!raw) return raw;
    return instrument(std::move(raw).value(), site);
  }

 private:
  static CompileError assertion(std::string msg) {
    return {CompileError::Kind::AssertionFailure, std::move(msg)};
  }

  // Depth limit and probe reporting around a compiled node.
  static Fn instrument(Fn raw, std::shared_ptr<const NodeSite> site) {
    return [raw = std::move(raw), site = std::move(site)](const State& x, Cont c) -> Outcome {
      RunEnv<Char>& env = *x.env;
      if (env.depth >= env.options.max_depth) {
        return EngineError{EngineErrorKind::ResourceLimit, "backtracking depth limit reached"};
      }
      ++env.depth;
      env.peak_depth = std::max(env.peak_depth, env.depth);
      struct Leave {
        RunEnv<Char>& env;
        ~Leave() { --env.depth; }
      } leave{env};
      MatchProbe<Char>* probe = env.probe;
      if (!probe) return raw(x, c);
      probe->on_enter(*site, x);
      std::vector<State> returned;
      auto observed = [&](const State& y) -> Outcome {
        probe->on_continue(*site, x, y);
        Outcome r = c(y);
        if (r.ok() && r.value()) returned.push_back(*r.value());
        return r;
      };
      Outcome r = raw(x, Cont(observed));
      bool from_c = false;
      if (r.ok() && r.value()) {
        from_c = std::find(returned.begin(), returned.end(), *r.value()) != returned.end();
      }
      probe->on_exit(*site, x, r, from_c);
      return r;
    };
  }

  Result compile_node(const node::Empty&, const Regex&, const RegexContext&, Direction,
                      const std::shared_ptr<NodeSite>&) {
    return Fn([](const State& x, Cont c) -> Outcome { return c(x); });
  }

  Result compile_node(const node::Char& n, const Regex&, const RegexContext&, Direction dir,
                      const std::shared_ptr<NodeSite>&) {
    CharSet set(M::kMaxChar);
    set.add(n.value);
    return matchers::character_set_matcher<M>(set, false, flags_, dir);
  }

  Result compile_node(const node::Dot&, const Regex&, const RegexContext&, Direction dir,
                      const std::shared_ptr<NodeSite>&) {
    CharSet set = all_characters<M>();
    if (!flags_.dot_all) set = set.minus(line_terminator_set(M::kMaxChar));
    return matchers::character_set_matcher<M>(set, false, flags_, dir);
  }

  Result compile_node(const node::CharacterClass& n, const Regex&, const RegexContext&,
                      Direction dir, const std::shared_ptr<NodeSite>&) {
    CharSet set(M::kMaxChar);
    for (const auto& atom : n.atoms) {
      if (const auto* r = std::get_if<node::ClassRange>(&atom)) {
        set.add_range(r->lo, r->hi);
      } else if (const auto* e = std::get_if<node::ClassEscape>(&atom)) {
        set = set.unite(class_escape_set<M>(e->kind, flags_));
      } else {
        auto p = property_set(std::get<node::UnicodeProperty>(atom));
        if (!p) return Unexpected{std::move(p).error()};
        set = set.unite(p.value());
      }
    }
    return matchers::character_set_matcher<M>(set, n.negated, flags_, dir);
  }

  Result compile_node(const node::ClassEscape& n, const Regex&, const RegexContext&,
                      Direction dir, const std::shared_ptr<NodeSite>&) {
    return matchers::character_set_matcher<M>(class_escape_set<M>(n.kind, flags_), false, flags_,
                                              dir);
  }

  Result compile_node(const node::UnicodeProperty& n, const Regex&, const RegexContext&,
                      Direction dir, const std::shared_ptr<NodeSite>&) {
    auto p = property_set(n);
    if (!p) return Unexpected{std::move(p).error()};
    return matchers::character_set_matcher<M>(p.value(), false, flags_, dir);
  }

  Result compile_node(const node::Disjunction& n, const Regex&, const RegexContext& ctx,
                      Direction dir, const std::shared_ptr<NodeSite>&) {
    auto m1 = compile(n.left, ctx.push(frame::DisjunctionLeft{n.right}), dir);
    if (!m1) return m1;
    auto m2 = compile(n.right, ctx.push(frame::DisjunctionRight{n.left}), dir);
    if (!m2) return m2;
    return Fn([m1 = std::move(m1).value(), m2 = std::move(m2).value()](const State& x,
                                                                       Cont c) -> Outcome {
      Outcome r = m1(x, c);
      if (!r.ok() || r.value()) return r;
      return m2(x, c);
    });
  }

  Result compile_node(const node::Concat& n, const Regex&, const RegexContext& ctx,
                      Direction dir, const std::shared_ptr<NodeSite>&) {
    auto m1 = compile(n.left, ctx.push(frame::ConcatLeft{n.right}), dir);
    if (!m1) return m1;
    auto m2 = compile(n.right, ctx.push(frame::ConcatRight{n.left}), dir);
    if (!m2) return m2;
    if (dir == Direction::Forward) {
      return Fn([m1 = std::move(m1).value(), m2 = std::move(m2).value()](const State& x,
                                                                         Cont c) -> Outcome {
        return m1(x, [&](const State& y) { return m2(y, c); });
      });
    }
    return Fn([m1 = std::move(m1).value(), m2 = std::move(m2).value()](const State& x,
                                                                       Cont c) -> Outcome {
      return m2(x, [&](const State& y) { return m1(y, c); });
    });
  }

  Result compile_node(const node::Quantified& n, const Regex&, const RegexContext& ctx,
                      Direction dir, const std::shared_ptr<NodeSite>& site) {
    auto m = compile(n.body, ctx.push(frame::QuantifiedInner{n.quantifier}), dir);
    if (!m) return m;
    auto spec = std::make_shared<RepeatSpec<Char>>();
    spec->body = std::move(m).value();
    spec->greedy = n.quantifier.greedy;
    spec->paren_index = count_left_capturing_parens_before(ctx);
    spec->paren_count = count_left_capturing_parens_within(*n.body);
    spec->site = site;
    if (spec->paren_index + spec->paren_count > capture_count_) {
      return Unexpected{assertion("quantifier capture range exceeds group count")};
    }
    const std::uint64_t min = n.quantifier.min;
    const std::optional<std::uint64_t> max = n.quantifier.max;
    return Fn([spec, min, max, dir](const State& x, Cont c) -> Outcome {
      std::uint64_t bound = initial_fuel(min, x.input().size(), x.end_index, dir);
      std::uint64_t fuel = apply_fuel_policy(bound, x.env->options);
      return repeat_matcher(*spec, min, max, x, c, fuel, 1, bound);
    });
  }

  Result compile_node(const node::Group& n, const Regex&, const RegexContext& ctx, Direction dir,
                      const std::shared_ptr<NodeSite>&) {
    auto m = compile(n.body, ctx.push(frame::GroupInner{n.name}), dir);
    if (!m) return m;
    const std::size_t index = count_left_capturing_parens_before(ctx) + 1;
    if (index > capture_count_) return Unexpected{assertion("group index exceeds group count")};
    return Fn([m = std::move(m).value(), index, dir](const State& x, Cont c) -> Outcome {
      return m(x, [&](const State& y) -> Outcome {
        const std::size_t xe = x.end_index;
        const std::size_t ye = y.end_index;
        CaptureRange range;
        if (dir == Direction::Forward) {
          if (xe > ye) return assertion_failure("group end precedes start");
          range = {xe, ye};
        } else {
          if (ye > xe) return assertion_failure("group end precedes start");
          range = {ye, xe};
        }
        return c(State{y.env, ye, y.captures.with_group(index, range)});
      });
    });
  }

  Result compile_node(const node::NonCapturingGroup& n, const Regex&, const RegexContext& ctx,
                      Direction dir, const std::shared_ptr<NodeSite>&) {
    return compile(n.body, ctx.push(frame::NonCapturingInner{}), dir);
  }

  Result compile_node(const node::Lookaround& n, const Regex&, const RegexContext& ctx,
                      Direction, const std::shared_ptr<NodeSite>&) {
    Direction inner_dir = is_lookbehind(n.kind) ? Direction::Backward : Direction::Forward;
    auto m = compile(n.body, ctx.push(frame::LookaroundInner{n.kind}), inner_dir);
    if (!m) return m;
    return matchers::lookaround_matcher<Char>(n.kind, std::move(m).value());
  }

  Result compile_node(const node::Anchor& n, const Regex&, const RegexContext&, Direction,
                      const std::shared_ptr<NodeSite>&) {
    return matchers::anchor_matcher<M>(n.kind, flags_);
  }

  Result compile_node(const node::Backreference& n, const Regex&, const RegexContext&,
                      Direction dir, const std::shared_ptr<NodeSite>&) {
    if (n.index == 0 || n.index > capture_count_) {
      return Unexpected{assertion("backreference \\" + std::to_string(n.index) +
                                  " exceeds group count")};
    }
    return matchers::backreference_matcher<M>(static_cast<std::size_t>(n.index), flags_, dir);
  }

  Result compile_node(const node::NamedBackreference& n, const Regex& self,
                      const RegexContext& ctx, Direction dir, const std::shared_ptr<NodeSite>&) {
    auto specs = group_specifiers_that_match(reconstruct_root(self, ctx), n.name);
    if (specs.size() != 1) {
      return Unexpected{assertion("named backreference \\k<" + n.name + "> matches " +
                                  std::to_string(specs.size()) + " groups")};
    }
    return matchers::backreference_matcher<M>(specs.front().index, flags_, dir);
  }

  Expected<CharSet, CompileError> property_set(const node::UnicodeProperty& p) const {
    auto s = unicode_property_set<M>(p.name, p.value);
    if (!s) return Unexpected{CompileError{CompileError::Kind::UnsupportedProperty, s.error().message()}};
    return p.negated ? s.value().complement() : s.value();
  }

  Regex root_;
  Flags flags_;
  std::size_t capture_count_;
  std::vector<std::shared_ptr<const NodeSite>> sites_;
};

}  // namespace detail

// The product of compilePattern: an anchored matcher over an input of
// model characters.
template <CharacterModel M>
class CompiledPattern {
 public:
  using Model = M;
  using Char = typename M::Char;

  // Runs the root matcher at `index` with the identity continuation.
  EngineOutcome<std::optional<Match>> match_at(std::span<const Char> input, std::size_t index,
                                               const RunOptions& options = {},
                                               MatchProbe<Char>* probe = nullptr) const {
    if (index > input.size()) return assertion_failure("start index beyond input length");
    RunEnv<Char> env{input, options, probe};
    MatchState<Char> x{&env, index, Captures(capture_count_)};
    matchers::Identity<Char> id;
    MatchOutcome<Char> r = root_matcher_(x, id);
    if (options.stats) options.stats->peak_depth = std::max(options.stats->peak_depth, env.peak_depth);
    if (!r.ok()) return r.error();
    if (!r.value()) return std::optional<Match>{};
    const MatchState<Char>& y = *r.value();
    if (y.end_index > input.size()) return assertion_failure("final state out of bounds");
    return std::optional<Match>{Match{index, y.end_index, y.captures}};
  }

  const Regex& root() const { return root_; }
  const Flags& flags() const { return flags_; }
  std::size_t capture_count() const { return capture_count_; }
  // Names indexed by group number - 1.
  const std::vector<std::optional<std::string>>& group_names() const { return group_names_; }
  // Every compiled node; sites()[0] is the root.
  const std::vector<std::shared_ptr<const NodeSite>>& sites() const { return sites_; }

 private:
  friend Expected<CompiledPattern<M>, CompileError> compile_pattern<M>(const Regex&,
                                                                       const Flags&);
  CompiledPattern() = default;

  Regex root_;
  Flags flags_;
  std::size_t capture_count_ = 0;
  std::vector<std::optional<std::string>> group_names_;
  std::vector<std::shared_ptr<const NodeSite>> sites_;
  Matcher<Char> root_matcher_;
};

template <CharacterModel M>
Expected<CompiledPattern<M>, CompileError> compile_pattern(const Regex& root, const Flags& flags) {
  detail::PatternCompiler<M> compiler(root, flags);
  auto m = compiler.compile(root, RegexContext{}, Direction::Forward);
  if (!m) return Unexpected{std::move(m).error()};
  CompiledPattern<M> out;
  out.root_ = root;
  out.flags_ = flags;
  out.capture_count_ = compiler.capture_count();
  out.group_names_ = capture_group_names(root);
  out.sites_ = std::move(compiler.sites());
  out.root_matcher_ = std::move(m).value();
  return out;
}

// Compiles a single subterm in isolation; `root` supplies group numbering.
template <CharacterModel M>
Expected<Matcher<typename M::Char>, CompileError> compile_sub_pattern(
    const Regex& root, const Regex& node, const RegexContext& ctx, const Flags& flags,
    Direction dir) {
  detail::PatternCompiler<M> compiler(root, flags);
  return compiler.compile(node, ctx, dir);
}

}  // namespace cpsre
