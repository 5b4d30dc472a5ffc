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

// Strictly-nullable analysis, the star-elimination rewrite it justifies,
// and a brute-force equivalence checker for pairs of patterns.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cpsre/ast.hpp"
#include "cpsre/executor.hpp"
#include "cpsre/expected.hpp"
#include "cpsre/parser.hpp"

namespace cpsre {

// True when the node can only ever match the empty string. Syntactic and
// conservative: backreferences and character matchers never qualify.
inline bool strictly_nullable(const RegexNode& n) {
  switch (n.kind()) {
    case NodeKind::Empty:
    case NodeKind::Anchor:
    case NodeKind::Lookaround:
      return true;
    case NodeKind::Disjunction: {
      const auto& d = n.as<node::Disjunction>();
      return strictly_nullable(*d.left) && strictly_nullable(*d.right);
    }
    case NodeKind::Concat: {
      const auto& c = n.as<node::Concat>();
      return strictly_nullable(*c.left) && strictly_nullable(*c.right);
    }
    case NodeKind::Quantified:
      return strictly_nullable(*n.as<node::Quantified>().body);
    case NodeKind::Group:
      return strictly_nullable(*n.as<node::Group>().body);
    case NodeKind::NonCapturingGroup:
      return strictly_nullable(*n.as<node::NonCapturingGroup>().body);
    default:
      return false;
  }
}

struct RewriteResult {
  Regex root;
  std::size_t rewrites = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline Regex rewrite_sn_stars(const Regex& n, const RegexContext& ctx, RewriteResult& out) {
  auto kids = children(*n);
  if (kids.empty()) return n;
  std::vector<Regex> rewritten;
  bool changed = false;
  for (auto& [child, f] : kids) {
    Regex r = rewrite_sn_stars(child, ctx.push(f), out);
    changed = changed || r != child;
    rewritten.push_back(std::move(r));
  }
  Regex self = n;
  if (changed) {
    self = std::visit(
        [&](const auto& x) -> Regex {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, node::Disjunction>) {
            return re::alt(rewritten[0], rewritten[1]);
          } else if constexpr (std::is_same_v<T, node::Concat>) {
            return re::concat(rewritten[0], rewritten[1]);
          } else if constexpr (std::is_same_v<T, node::Quantified>) {
            return re::quant(rewritten[0], x.quantifier);
          } else if constexpr (std::is_same_v<T, node::Group>) {
            return re::group(rewritten[0], x.name);
          } else if constexpr (std::is_same_v<T, node::NonCapturingGroup>) {
            return re::ncgroup(rewritten[0]);
          } else if constexpr (std::is_same_v<T, node::Lookaround>) {
            return re::look(x.kind, rewritten[0]);
          } else {
            return n;
          }
        },
        n->variant());
  }
  const auto* q = self->get_if<node::Quantified>();
  if (q && q->quantifier.is_greedy_star() && strictly_nullable(*q->body)) {
    if (count_left_capturing_parens_within(*q->body) > 0) {
      out.warnings.push_back("kept star at " + ctx.path() +
                             ": its strictly nullable body contains capturing groups");
      return self;
    }
    ++out.rewrites;
    return re::empty();
  }
  return self;
}

}  // namespace detail

// Replaces every greedy `r*` with Empty when r is strictly nullable and
// has no capturing groups (removing groups would renumber the rest).
inline RewriteResult rewrite_strictly_nullable_stars(const Regex& root) {
  RewriteResult out;
  out.root = detail::rewrite_sn_stars(root, RegexContext{}, out);
  return out;
}

// ---------------------------------------------------------------------------
// Equivalence checking

struct Counterexample {
  std::u16string input;
  std::size_t start = 0;
  std::optional<ExecRecord> a;
  std::optional<ExecRecord> b;
};

struct EquivalenceReport {
  bool equivalent = true;
  std::optional<Counterexample> counterexample;
  std::size_t cases_checked = 0;
};

// Same presence, end index and capture ranges. A capture index present in
// only one record counts as undefined in the other.
inline bool same_anchored_result(const std::optional<ExecRecord>& a,
                                 const std::optional<ExecRecord>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  if (a->index != b->index || a->end_index != b->end_index) return false;
  const std::size_t n = std::max(a->captures.size(), b->captures.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<CaptureRecord> ca = i < a->captures.size() ? a->captures[i] : std::nullopt;
    std::optional<CaptureRecord> cb = i < b->captures.size() ? b->captures[i] : std::nullopt;
    if (ca.has_value() != cb.has_value()) return false;
    if (ca && (ca->start != cb->start || ca->end != cb->end)) return false;
  }
  return true;
}

// Compares anchored results on each input at every start index, in order.
inline Expected<EquivalenceReport, std::string> check_equivalence_on(
    const Regex& a, const Regex& b, const Flags& flags, const std::vector<std::u16string>& inputs) {
  auto pa = Pattern::compile(a, flags);
  if (!pa) return Unexpected{"first pattern: " + pa.error().to_string()};
  auto pb = Pattern::compile(b, flags);
  if (!pb) return Unexpected{"second pattern: " + pb.error().to_string()};
  EquivalenceReport report;
  for (const auto& input : inputs) {
    const std::size_t len = pa->length(input);
    for (std::size_t start = 0; start <= len; ++start) {
      auto ra = pa->match_at(input, start);
      if (!ra.ok()) return Unexpected{std::string("first pattern: ") + to_string(ra.error().kind)};
      auto rb = pb->match_at(input, start);
      if (!rb.ok()) return Unexpected{std::string("second pattern: ") + to_string(rb.error().kind)};
      ++report.cases_checked;
      if (!same_anchored_result(ra.value(), rb.value())) {
        report.equivalent = false;
        report.counterexample = Counterexample{input, start, ra.value(), rb.value()};
        return report;
      }
    }
  }
  return report;
}

// Every string over `alphabet` of length <= max_len, shortest first, then
// lexicographic in alphabet order.
inline std::vector<std::u16string> enumerate_strings(const std::u32string& alphabet,
                                                     std::size_t max_len) {
  std::vector<std::u16string> out;
  std::vector<std::u32string> layer{U""};
  for (std::size_t len = 0; len <= max_len; ++len) {
    for (const auto& s : layer) out.push_back(utf16_from_code_points(s));
    if (len == max_len || alphabet.empty()) break;
    std::vector<std::u32string> next;
    next.reserve(layer.size() * alphabet.size());
    for (const auto& s : layer) {
      for (char32_t c : alphabet) next.push_back(s + c);
    }
    layer = std::move(next);
  }
  return out;
}

inline Expected<EquivalenceReport, std::string> check_equivalence(const Regex& a, const Regex& b,
                                                                  const Flags& flags,
                                                                  const std::u32string& alphabet,
                                                                  std::size_t max_len) {
  return check_equivalence_on(a, b, flags, enumerate_strings(alphabet, max_len));
}

}  // namespace cpsre
