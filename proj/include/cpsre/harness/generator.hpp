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

// Seeded random generation of ASTs, flags and inputs.
//
// Draws use mt19937_64 with plain modulo reduction so that a seed means
// the same cases on every platform and standard library.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cpsre/ast.hpp"
#include "cpsre/charmodel.hpp"
#include "cpsre/early_errors.hpp"

namespace cpsre::harness {

struct FlagsDistribution {
  double ignore_case = 0.25;
  double multiline = 0.25;
  double dot_all = 0.25;
  double unicode = 0.3;
  double sticky = 0.1;
  double global = 0.1;
};

struct FuzzConfig {
  std::uint64_t seed = 42;
  std::u32string alphabet = U"abc";
  int max_regex_depth = 6;
  std::size_t max_input_len = 8;
  std::uint64_t max_finite_bound = 5;
  FlagsDistribution flags;
  std::size_t case_count = 10000;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Uniform-ish in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  bool chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 engine_;
};

struct GeneratedCase {
  std::size_t id = 0;
  Regex ast;
  Flags flags;
  std::u16string input;
  std::size_t start = 0;  // in model characters
};

namespace detail {

class AstGenerator {
 public:
  AstGenerator(const FuzzConfig& cfg, Rng& rng, bool unicode)
      : cfg_(cfg), rng_(rng), unicode_(unicode) {}

  Regex generate() { return fix_backrefs(node(0)); }
  Regex generate_strictly_nullable() { return fix_backrefs(sn_node(0)); }

 private:
  char32_t letter() { return cfg_.alphabet[rng_.below(cfg_.alphabet.size())]; }

  // Without `u` a pattern character is a code unit: astral letters become
  // their lead surrogate inside classes and a surrogate pair elsewhere.
  char32_t class_letter() {
    char32_t c = letter();
    return unicode_ || c <= 0xFFFF ? c : 0xD800 + ((c - 0x10000) >> 10);
  }

  Regex char_leaf() {
    char32_t c = letter();
    if (unicode_ || c <= 0xFFFF) return re::chr(c);
    return re::concat(re::chr(0xD800 + ((c - 0x10000) >> 10)), re::chr(0xDC00 + ((c - 0x10000) & 0x3FF)));
  }

  Quantifier quantifier() {
    Quantifier q;
    q.greedy = rng_.chance(0.6);
    switch (rng_.below(6)) {
      case 0: q.min = 0; q.max = std::nullopt; break;  // *
      case 1: q.min = 1; q.max = std::nullopt; break;  // +
      case 2: q.min = 0; q.max = 1; break;             // ?
      default: {
        q.min = rng_.below(cfg_.max_finite_bound + 1);
        if (rng_.chance(0.3)) {
          q.max = std::nullopt;
        } else {
          q.max = q.min + rng_.below(cfg_.max_finite_bound - q.min + 1);
        }
      }
    }
    return q;
  }

  node::ClassAtom class_atom() {
    switch (rng_.below(unicode_ ? 4 : 3)) {
      case 0:
      case 1: {
        char32_t a = class_letter();
        char32_t b = class_letter();
        if (a > b) std::swap(a, b);
        if (rng_.chance(0.5)) b = a;
        return node::ClassRange{a, b};
      }
      case 2:
        return node::ClassEscape{static_cast<ClassEscapeKind>(rng_.below(6))};
      default:
        return property();
    }
  }

  node::UnicodeProperty property() {
    static const std::vector<std::string> kValues = {"Letter", "Lowercase_Letter",
                                                     "Uppercase_Letter", "Decimal_Number"};
    return node::UnicodeProperty{"General_Category", rng_.pick(kValues), rng_.chance(0.3)};
  }

  Regex leaf() {
    // Weights: Char 8, Empty 2, Dot 2, Class 3, ClassEscape 2, Property 2,
    // Anchor 3, Backreference 2, NamedBackreference 2.
    std::uint64_t r = rng_.below(26);
    if (r < 8) return char_leaf();
    if (r < 10) return re::empty();
    if (r < 12) return re::dot();
    if (r < 15) {
      std::vector<node::ClassAtom> atoms;
      std::uint64_t n = rng_.below(4);
      for (std::uint64_t i = 0; i < n; ++i) atoms.push_back(class_atom());
      return re::cls(rng_.chance(0.3), std::move(atoms));
    }
    if (r < 17) return re::class_escape(static_cast<ClassEscapeKind>(rng_.below(6)));
    if (r < 19) {
      if (!unicode_) return re::class_escape(static_cast<ClassEscapeKind>(rng_.below(6)));
      return re::make(property());
    }
    if (r < 22) return re::anchor(static_cast<AnchorKind>(rng_.below(4)));
    if (r < 24) return re::backref(1);  // index fixed up later
    return re::named_backref("");      // name fixed up later
  }

  Regex node(int depth) {
    const double leaf_p = depth >= cfg_.max_regex_depth ? 1.0 : 0.25 + 0.12 * depth;
    if (rng_.chance(leaf_p)) return leaf();
    // Weights: Disjunction 3, Concat 5, Quantified 4, Group 3,
    // NonCapturingGroup 2, Lookaround 3.
    std::uint64_t r = rng_.below(20);
    // Operands are drawn in separate statements: argument evaluation
    // order is unspecified and would make seeds compiler-dependent.
    if (r < 8) {
      Regex left = node(depth + 1);
      Regex right = node(depth + 1);
      return r < 3 ? re::alt(std::move(left), std::move(right))
                   : re::concat(std::move(left), std::move(right));
    }
    if (r < 12) {
      Regex body = node(depth + 1);
      return re::quant(std::move(body), quantifier());
    }
    if (r < 15) {
      std::optional<std::string> name;
      if (rng_.chance(0.4)) name = "n" + std::to_string(++name_counter_);
      return re::group(node(depth + 1), std::move(name));
    }
    if (r < 17) return re::ncgroup(node(depth + 1));
    auto kind = static_cast<LookKind>(rng_.below(4));
    return re::look(kind, node(depth + 1));
  }

  // Only SN constructors on the way down; lookaround bodies are unrestricted.
  Regex sn_node(int depth) {
    const double leaf_p = depth >= cfg_.max_regex_depth ? 1.0 : 0.25 + 0.12 * depth;
    if (rng_.chance(leaf_p)) {
      std::uint64_t r = rng_.below(8);
      if (r < 2) return re::empty();
      if (r < 5) return re::anchor(static_cast<AnchorKind>(rng_.below(4)));
      auto kind = static_cast<LookKind>(rng_.below(4));
      return re::look(kind, node(depth + 1));
    }
    std::uint64_t r = rng_.below(17);
    if (r < 8) {
      Regex left = sn_node(depth + 1);
      Regex right = sn_node(depth + 1);
      return r < 3 ? re::alt(std::move(left), std::move(right))
                   : re::concat(std::move(left), std::move(right));
    }
    if (r < 12) {
      Regex body = sn_node(depth + 1);
      return re::quant(std::move(body), quantifier());
    }
    if (r < 15) {
      std::optional<std::string> name;
      if (rng_.chance(0.4)) name = "n" + std::to_string(++name_counter_);
      return re::group(sn_node(depth + 1), std::move(name));
    }
    return re::ncgroup(sn_node(depth + 1));
  }

  // Points every backreference at an existing group; drops those that
  // cannot be satisfied.
  Regex fix_backrefs(const Regex& root) {
    const std::size_t groups = count_left_capturing_parens_within(*root);
    std::vector<std::string> names;
    for (const auto& n : capture_group_names(root)) {
      if (n) names.push_back(*n);
    }
    return rebuild(root, groups, names);
  }

  Regex rebuild(const Regex& n, std::size_t groups, const std::vector<std::string>& names) {
    if (n->is<node::Backreference>()) {
      if (groups == 0) return char_leaf();
      return re::backref(1 + rng_.below(groups));
    }
    if (n->is<node::NamedBackreference>()) {
      if (names.empty()) {
        if (groups == 0) return char_leaf();
        return re::backref(1 + rng_.below(groups));
      }
      return re::named_backref(rng_.pick(names));
    }
    return std::visit(
        [&](const auto& x) -> Regex {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, node::Disjunction>) {
            Regex left = rebuild(x.left, groups, names);
            return re::alt(std::move(left), rebuild(x.right, groups, names));
          } else if constexpr (std::is_same_v<T, node::Concat>) {
            Regex left = rebuild(x.left, groups, names);
            return re::concat(std::move(left), rebuild(x.right, groups, names));
          } else if constexpr (std::is_same_v<T, node::Quantified>) {
            return re::quant(rebuild(x.body, groups, names), x.quantifier);
          } else if constexpr (std::is_same_v<T, node::Group>) {
            return re::group(rebuild(x.body, groups, names), x.name);
          } else if constexpr (std::is_same_v<T, node::NonCapturingGroup>) {
            return re::ncgroup(rebuild(x.body, groups, names));
          } else if constexpr (std::is_same_v<T, node::Lookaround>) {
            return re::look(x.kind, rebuild(x.body, groups, names));
          } else {
            return n;
          }
        },
        n->variant());
  }

  const FuzzConfig& cfg_;
  Rng& rng_;
  bool unicode_;
  std::size_t name_counter_ = 0;
};

}  // namespace detail

inline Flags generate_flags(const FuzzConfig& cfg, Rng& rng) {
  Flags f;
  f.ignore_case = rng.chance(cfg.flags.ignore_case);
  f.multiline = rng.chance(cfg.flags.multiline);
  f.dot_all = rng.chance(cfg.flags.dot_all);
  f.unicode = rng.chance(cfg.flags.unicode);
  f.sticky = rng.chance(cfg.flags.sticky);
  f.global = rng.chance(cfg.flags.global);
  return f;
}

// An AST that passes validate(), with flags.
inline std::pair<Regex, Flags> generate_regex(const FuzzConfig& cfg, Rng& rng) {
  Flags flags = generate_flags(cfg, rng);
  while (true) {
    Regex r = detail::AstGenerator(cfg, rng, flags.unicode).generate();
    if (validate(r, flags).empty()) return {r, flags};
  }
}

// A strictly nullable AST that passes validate(), with flags.
inline std::pair<Regex, Flags> generate_strictly_nullable(const FuzzConfig& cfg, Rng& rng) {
  Flags flags = generate_flags(cfg, rng);
  while (true) {
    Regex r = detail::AstGenerator(cfg, rng, flags.unicode).generate_strictly_nullable();
    if (validate(r, flags).empty()) return {r, flags};
  }
}

inline std::u16string generate_input(const FuzzConfig& cfg, Rng& rng) {
  std::u32string s;
  std::uint64_t len = rng.below(cfg.max_input_len + 1);
  for (std::uint64_t i = 0; i < len; ++i) s.push_back(cfg.alphabet[rng.below(cfg.alphabet.size())]);
  return utf16_from_code_points(s);
}

// The deterministic case list for a configuration.
inline std::vector<GeneratedCase> generate_cases(const FuzzConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<GeneratedCase> out;
  out.reserve(cfg.case_count);
  for (std::size_t i = 0; i < cfg.case_count; ++i) {
    GeneratedCase c;
    c.id = i;
    std::tie(c.ast, c.flags) = generate_regex(cfg, rng);
    c.input = generate_input(cfg, rng);
    std::size_t len = c.flags.unicode ? CodePointModel::tokenize(c.input).size() : c.input.size();
    c.start = rng.below(len + 1);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace cpsre::harness
