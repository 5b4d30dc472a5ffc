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

// Regex syntax tree, flags, and zipper contexts.
//
// Nodes are immutable and shared through `Regex` (a shared pointer to a
// const node). Concatenation and disjunction are binary; sequences are
// right-nested. Capture-group indices are never stored in the tree: they
// are derived from a node's context, which records the path of incomplete
// parent nodes from the node up to the root.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cpsre/expected.hpp"

namespace cpsre {

// ---------------------------------------------------------------------------
// Flags

struct Flags {
  bool global = false;       // g
  bool ignore_case = false;  // i
  bool multiline = false;    // m
  bool dot_all = false;      // s
  bool unicode = false;      // u
  bool sticky = false;       // y
  bool has_indices = false;  // d

  // Parses a string of flag letters ("dgimsuy" in any order). Rejects
  // unknown letters, repeated letters and the unsupported `v` flag.
  static Expected<Flags, std::string> parse(std::string_view letters) {
    Flags f;
    for (char ch : letters) {
      bool* slot = nullptr;
      switch (ch) {
        case 'g': slot = &f.global; break;
        case 'i': slot = &f.ignore_case; break;
        case 'm': slot = &f.multiline; break;
        case 's': slot = &f.dot_all; break;
        case 'u': slot = &f.unicode; break;
        case 'y': slot = &f.sticky; break;
        case 'd': slot = &f.has_indices; break;
        case 'v':
          return Unexpected{std::string("the v flag is not supported")};
        default:
          return Unexpected{std::string("unknown flag '") + ch + "'"};
      }
      if (*slot) return Unexpected{std::string("repeated flag '") + ch + "'"};
      *slot = true;
    }
    return f;
  }

  // Canonical letter order, as printed by RegExp.prototype.flags.
  std::string to_string() const {
    std::string s;
    if (has_indices) s += 'd';
    if (global) s += 'g';
    if (ignore_case) s += 'i';
    if (multiline) s += 'm';
    if (dot_all) s += 's';
    if (unicode) s += 'u';
    if (sticky) s += 'y';
    return s;
  }

  friend bool operator==(const Flags&, const Flags&) = default;
};

// ---------------------------------------------------------------------------
// Node payloads

class RegexNode;
using Regex = std::shared_ptr<const RegexNode>;

struct Quantifier {
  std::uint64_t min = 0;
  std::optional<std::uint64_t> max;  // nullopt means unbounded
  bool greedy = true;

  static Quantifier star(bool greedy = true) { return {0, std::nullopt, greedy}; }
  static Quantifier plus(bool greedy = true) { return {1, std::nullopt, greedy}; }
  static Quantifier optional(bool greedy = true) { return {0, 1, greedy}; }
  static Quantifier exactly(std::uint64_t n, bool greedy = true) {
    return {n, n, greedy};
  }
  static Quantifier range(std::uint64_t lo, std::optional<std::uint64_t> hi,
                          bool greedy = true) {
    return {lo, hi, greedy};
  }

  bool is_greedy_star() const { return min == 0 && !max && greedy; }

  friend bool operator==(const Quantifier&, const Quantifier&) = default;
};

enum class LookKind { Ahead, Behind, NegAhead, NegBehind };
enum class AnchorKind { InputStart, InputEnd, WordBoundary, NotWordBoundary };
enum class ClassEscapeKind { Digit, NotDigit, Word, NotWord, Space, NotSpace };

inline bool is_lookbehind(LookKind k) {
  return k == LookKind::Behind || k == LookKind::NegBehind;
}
inline bool is_negative(LookKind k) {
  return k == LookKind::NegAhead || k == LookKind::NegBehind;
}

namespace node {

struct Empty {
  friend bool operator==(const Empty&, const Empty&) = default;
};
struct Char {
  char32_t value;
  friend bool operator==(const Char&, const Char&) = default;
};
struct Dot {
  friend bool operator==(const Dot&, const Dot&) = default;
};

// Class atoms hold resolved code points; escapes are decoded by the parser.
struct ClassRange {
  char32_t lo;
  char32_t hi;
  friend bool operator==(const ClassRange&, const ClassRange&) = default;
};
struct ClassEscape {
  ClassEscapeKind kind;
  friend bool operator==(const ClassEscape&, const ClassEscape&) = default;
};
struct UnicodeProperty {
  std::string name;
  std::string value;  // empty for lone binary-property names
  bool negated = false;
  friend bool operator==(const UnicodeProperty&, const UnicodeProperty&) = default;
};
using ClassAtom = std::variant<ClassRange, ClassEscape, UnicodeProperty>;

struct CharacterClass {
  bool negated = false;
  std::vector<ClassAtom> atoms;
  friend bool operator==(const CharacterClass&, const CharacterClass&) = default;
};

struct Disjunction {
  Regex left;
  Regex right;
};
struct Concat {
  Regex left;
  Regex right;
};
struct Quantified {
  Regex body;
  Quantifier quantifier;
};
struct Group {
  Regex body;
  std::optional<std::string> name;
};
struct NonCapturingGroup {
  Regex body;
};
struct Lookaround {
  LookKind kind;
  Regex body;
};
struct Anchor {
  AnchorKind kind;
  friend bool operator==(const Anchor&, const Anchor&) = default;
};
struct Backreference {
  std::uint64_t index;  // 1-based
  friend bool operator==(const Backreference&, const Backreference&) = default;
};
struct NamedBackreference {
  std::string name;
  friend bool operator==(const NamedBackreference&,
                         const NamedBackreference&) = default;
};

}  // namespace node

enum class NodeKind {
  Empty,
  Char,
  Dot,
  CharacterClass,
  ClassEscape,
  UnicodeProperty,
  Disjunction,
  Concat,
  Quantified,
  Group,
  NonCapturingGroup,
  Lookaround,
  Anchor,
  Backreference,
  NamedBackreference,
};
inline constexpr std::size_t kNodeKindCount = 15;

class RegexNode {
 public:
  using Variant =
      std::variant<node::Empty, node::Char, node::Dot, node::CharacterClass,
                   node::ClassEscape, node::UnicodeProperty, node::Disjunction,
                   node::Concat, node::Quantified, node::Group,
                   node::NonCapturingGroup, node::Lookaround, node::Anchor,
                   node::Backreference, node::NamedBackreference>;

  template <class T>
  explicit RegexNode(T payload) : v_(std::move(payload)) {}

  NodeKind kind() const { return static_cast<NodeKind>(v_.index()); }
  const Variant& variant() const { return v_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(v_);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v_);
  }

 private:
  Variant v_;
};

// Structural equality.
bool equal(const RegexNode& a, const RegexNode& b);

inline bool equal(const Regex& a, const Regex& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return equal(*a, *b);
}

inline bool equal(const RegexNode& a, const RegexNode& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = b.as<T>();
        if constexpr (std::is_same_v<T, node::Disjunction> ||
                      std::is_same_v<T, node::Concat>) {
          return equal(x.left, y.left) && equal(x.right, y.right);
        } else if constexpr (std::is_same_v<T, node::Quantified>) {
          return x.quantifier == y.quantifier && equal(x.body, y.body);
        } else if constexpr (std::is_same_v<T, node::Group>) {
          return x.name == y.name && equal(x.body, y.body);
        } else if constexpr (std::is_same_v<T, node::NonCapturingGroup>) {
          return equal(x.body, y.body);
        } else if constexpr (std::is_same_v<T, node::Lookaround>) {
          return x.kind == y.kind && equal(x.body, y.body);
        } else {
          return x == y;
        }
      },
      a.variant());
}

const char* to_string(NodeKind k);
const char* to_string(LookKind k);
const char* to_string(AnchorKind k);
char to_letter(ClassEscapeKind k);

inline const char* to_string(NodeKind k) {
  static constexpr const char* kNames[] = {
      "Empty",        "Char",       "Dot",
      "CharacterClass", "ClassEscape", "UnicodeProperty",
      "Disjunction",  "Concat",     "Quantified",
      "Group",        "NonCapturingGroup", "Lookaround",
      "Anchor",       "Backreference", "NamedBackreference"};
  return kNames[static_cast<std::size_t>(k)];
}

inline const char* to_string(LookKind k) {
  switch (k) {
    case LookKind::Ahead: return "Ahead";
    case LookKind::Behind: return "Behind";
    case LookKind::NegAhead: return "NegAhead";
    case LookKind::NegBehind: return "NegBehind";
  }
  return "?";
}

inline const char* to_string(AnchorKind k) {
  switch (k) {
    case AnchorKind::InputStart: return "InputStart";
    case AnchorKind::InputEnd: return "InputEnd";
    case AnchorKind::WordBoundary: return "WordBoundary";
    case AnchorKind::NotWordBoundary: return "NotWordBoundary";
  }
  return "?";
}

inline char to_letter(ClassEscapeKind k) {
  switch (k) {
    case ClassEscapeKind::Digit: return 'd';
    case ClassEscapeKind::NotDigit: return 'D';
    case ClassEscapeKind::Word: return 'w';
    case ClassEscapeKind::NotWord: return 'W';
    case ClassEscapeKind::Space: return 's';
    case ClassEscapeKind::NotSpace: return 'S';
  }
  return '?';
}

inline std::optional<ClassEscapeKind> class_escape_from_letter(char32_t c) {
  switch (c) {
    case 'd': return ClassEscapeKind::Digit;
    case 'D': return ClassEscapeKind::NotDigit;
    case 'w': return ClassEscapeKind::Word;
    case 'W': return ClassEscapeKind::NotWord;
    case 's': return ClassEscapeKind::Space;
    case 'S': return ClassEscapeKind::NotSpace;
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Builders

namespace re {

template <class T>
Regex make(T payload) {
  return std::make_shared<const RegexNode>(std::move(payload));
}

inline Regex empty() { return make(node::Empty{}); }
inline Regex chr(char32_t c) { return make(node::Char{c}); }
inline Regex dot() { return make(node::Dot{}); }
inline Regex cls(bool negated, std::vector<node::ClassAtom> atoms) {
  return make(node::CharacterClass{negated, std::move(atoms)});
}
inline Regex class_escape(ClassEscapeKind k) { return make(node::ClassEscape{k}); }
inline Regex property(std::string name, std::string value, bool negated = false) {
  return make(node::UnicodeProperty{std::move(name), std::move(value), negated});
}
inline Regex alt(Regex l, Regex r) {
  return make(node::Disjunction{std::move(l), std::move(r)});
}
inline Regex concat(Regex l, Regex r) {
  return make(node::Concat{std::move(l), std::move(r)});
}
inline Regex quant(Regex body, Quantifier q) {
  return make(node::Quantified{std::move(body), q});
}
inline Regex star(Regex body, bool greedy = true) {
  return quant(std::move(body), Quantifier::star(greedy));
}
inline Regex plus(Regex body, bool greedy = true) {
  return quant(std::move(body), Quantifier::plus(greedy));
}
inline Regex opt(Regex body, bool greedy = true) {
  return quant(std::move(body), Quantifier::optional(greedy));
}
inline Regex group(Regex body, std::optional<std::string> name = std::nullopt) {
  return make(node::Group{std::move(body), std::move(name)});
}
inline Regex ncgroup(Regex body) { return make(node::NonCapturingGroup{std::move(body)}); }
inline Regex look(LookKind k, Regex body) {
  return make(node::Lookaround{k, std::move(body)});
}
inline Regex anchor(AnchorKind k) { return make(node::Anchor{k}); }
inline Regex backref(std::uint64_t index) { return make(node::Backreference{index}); }
inline Regex named_backref(std::string name) {
  return make(node::NamedBackreference{std::move(name)});
}

// Right-nested concatenation; an empty list yields Empty.
inline Regex seq(std::vector<Regex> items) {
  if (items.empty()) return empty();
  Regex acc = std::move(items.back());
  for (std::size_t i = items.size() - 1; i-- > 0;) acc = concat(std::move(items[i]), acc);
  return acc;
}

// Right-nested disjunction.
inline Regex alts(std::vector<Regex> items) {
  if (items.empty()) return empty();
  Regex acc = std::move(items.back());
  for (std::size_t i = items.size() - 1; i-- > 0;) acc = alt(std::move(items[i]), acc);
  return acc;
}

inline Regex literal(std::u32string_view text) {
  std::vector<Regex> items;
  for (char32_t c : text) items.push_back(chr(c));
  return seq(std::move(items));
}

}  // namespace re

// ---------------------------------------------------------------------------
// Zipper contexts

namespace frame {
struct DisjunctionLeft {
  Regex right;
};
struct DisjunctionRight {
  Regex left;
};
struct ConcatLeft {
  Regex right;
};
struct ConcatRight {
  Regex left;
};
struct QuantifiedInner {
  Quantifier quantifier;
};
struct GroupInner {
  std::optional<std::string> name;
};
struct NonCapturingInner {};
struct LookaroundInner {
  LookKind kind;
};
}  // namespace frame

using ContextFrame =
    std::variant<frame::DisjunctionLeft, frame::DisjunctionRight,
                 frame::ConcatLeft, frame::ConcatRight, frame::QuantifiedInner,
                 frame::GroupInner, frame::NonCapturingInner,
                 frame::LookaroundInner>;

inline const char* frame_name(const ContextFrame& f) {
  static constexpr const char* kNames[] = {
      "DisjunctionLeft", "DisjunctionRight", "ConcatLeft",
      "ConcatRight",     "QuantifiedInner",  "GroupInner",
      "NonCapturingInner", "LookaroundInner"};
  return kNames[f.index()];
}

// Persistent singly linked list of frames, innermost first. Pushing shares
// the tail, so contexts of siblings share their common ancestry.
class RegexContext {
  struct Cell {
    ContextFrame frame;
    std::shared_ptr<const Cell> next;
  };

 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = ContextFrame;
    using difference_type = std::ptrdiff_t;
    using pointer = const ContextFrame*;
    using reference = const ContextFrame&;

    iterator() = default;
    explicit iterator(const Cell* c) : cell_(c) {}
    reference operator*() const { return cell_->frame; }
    pointer operator->() const { return &cell_->frame; }
    iterator& operator++() {
      cell_ = cell_->next.get();
      return *this;
    }
    iterator operator++(int) {
      iterator tmp = *this;
      ++*this;
      return tmp;
    }
    friend bool operator==(const iterator&, const iterator&) = default;

   private:
    const Cell* cell_ = nullptr;
  };

  RegexContext() = default;

  RegexContext push(ContextFrame f) const {
    RegexContext out;
    out.head_ = std::make_shared<const Cell>(Cell{std::move(f), head_});
    out.size_ = size_ + 1;
    return out;
  }

  bool empty() const { return !head_; }
  std::size_t size() const { return size_; }
  const ContextFrame& innermost() const { return head_->frame; }
  RegexContext parent() const {
    RegexContext out;
    out.head_ = head_->next;
    out.size_ = size_ - 1;
    return out;
  }

  iterator begin() const { return iterator(head_.get()); }
  iterator end() const { return iterator(); }

  // Frames outermost first, joined with '/', prefixed with "root".
  std::string path() const {
    std::vector<const char*> names;
    for (const auto& f : *this) names.push_back(frame_name(f));
    std::string s = "root";
    for (auto it = names.rbegin(); it != names.rend(); ++it) {
      s += '/';
      s += *it;
    }
    return s;
  }

 private:
  std::shared_ptr<const Cell> head_;
  std::size_t size_ = 0;
};

// Structural equality of contexts (frames and the sibling subtrees they hold).
inline bool equal(const RegexContext& a, const RegexContext& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->index() != ib->index()) return false;
    bool same = std::visit(
        [&](const auto& fa) -> bool {
          using F = std::decay_t<decltype(fa)>;
          const F& fb = std::get<F>(*ib);
          if constexpr (std::is_same_v<F, frame::DisjunctionLeft> ||
                        std::is_same_v<F, frame::ConcatLeft>) {
            return equal(fa.right, fb.right);
          } else if constexpr (std::is_same_v<F, frame::DisjunctionRight> ||
                               std::is_same_v<F, frame::ConcatRight>) {
            return equal(fa.left, fb.left);
          } else if constexpr (std::is_same_v<F, frame::QuantifiedInner>) {
            return fa.quantifier == fb.quantifier;
          } else if constexpr (std::is_same_v<F, frame::GroupInner>) {
            return fa.name == fb.name;
          } else if constexpr (std::is_same_v<F, frame::LookaroundInner>) {
            return fa.kind == fb.kind;
          } else {
            return true;
          }
        },
        *ia);
    if (!same) return false;
  }
  return true;
}

// A focused subterm together with its context.
struct Zipper {
  Regex node;
  RegexContext context;
};

// Plugs `node` into a single frame.
inline Regex plug(Regex node, const ContextFrame& f) {
  return std::visit(
      [&](const auto& fr) -> Regex {
        using F = std::decay_t<decltype(fr)>;
        if constexpr (std::is_same_v<F, frame::DisjunctionLeft>) {
          return re::alt(std::move(node), fr.right);
        } else if constexpr (std::is_same_v<F, frame::DisjunctionRight>) {
          return re::alt(fr.left, std::move(node));
        } else if constexpr (std::is_same_v<F, frame::ConcatLeft>) {
          return re::concat(std::move(node), fr.right);
        } else if constexpr (std::is_same_v<F, frame::ConcatRight>) {
          return re::concat(fr.left, std::move(node));
        } else if constexpr (std::is_same_v<F, frame::QuantifiedInner>) {
          return re::quant(std::move(node), fr.quantifier);
        } else if constexpr (std::is_same_v<F, frame::GroupInner>) {
          return re::group(std::move(node), fr.name);
        } else if constexpr (std::is_same_v<F, frame::NonCapturingInner>) {
          return re::ncgroup(std::move(node));
        } else {
          return re::look(fr.kind, std::move(node));
        }
      },
      f);
}

inline Regex reconstruct_root(Regex node, const RegexContext& ctx) {
  for (const auto& f : ctx) node = plug(std::move(node), f);
  return node;
}

// Immediate children of `node`, each with the frame that leads back to it.
inline std::vector<std::pair<Regex, ContextFrame>> children(const RegexNode& n) {
  std::vector<std::pair<Regex, ContextFrame>> out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, node::Disjunction>) {
          out.emplace_back(x.left, frame::DisjunctionLeft{x.right});
          out.emplace_back(x.right, frame::DisjunctionRight{x.left});
        } else if constexpr (std::is_same_v<T, node::Concat>) {
          out.emplace_back(x.left, frame::ConcatLeft{x.right});
          out.emplace_back(x.right, frame::ConcatRight{x.left});
        } else if constexpr (std::is_same_v<T, node::Quantified>) {
          out.emplace_back(x.body, frame::QuantifiedInner{x.quantifier});
        } else if constexpr (std::is_same_v<T, node::Group>) {
          out.emplace_back(x.body, frame::GroupInner{x.name});
        } else if constexpr (std::is_same_v<T, node::NonCapturingGroup>) {
          out.emplace_back(x.body, frame::NonCapturingInner{});
        } else if constexpr (std::is_same_v<T, node::Lookaround>) {
          out.emplace_back(x.body, frame::LookaroundInner{x.kind});
        }
      },
      n.variant());
  return out;
}

// Every subterm of `root` (root included) with its context, in pre-order.
inline std::vector<Zipper> enumerate_subterms(const Regex& root) {
  std::vector<Zipper> out;
  std::vector<Zipper> stack{{root, RegexContext{}}};
  while (!stack.empty()) {
    Zipper z = std::move(stack.back());
    stack.pop_back();
    auto kids = children(*z.node);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      stack.push_back({it->first, z.context.push(std::move(it->second))});
    }
    out.push_back(std::move(z));
  }
  return out;
}

// Number of capturing groups in the subtree rooted at `n`.
inline std::size_t count_left_capturing_parens_within(const RegexNode& n) {
  std::size_t count = n.is<node::Group>() ? 1 : 0;
  for (const auto& [child, f] : children(n)) {
    count += count_left_capturing_parens_within(*child);
  }
  return count;
}

// Number of capturing-group left parentheses strictly before the focused
// node in a pre-order traversal of the reconstructed root.
inline std::size_t count_left_capturing_parens_before(const RegexContext& ctx) {
  std::size_t count = 0;
  for (const auto& f : ctx) {
    if (const auto* d = std::get_if<frame::DisjunctionRight>(&f)) {
      count += count_left_capturing_parens_within(*d->left);
    } else if (const auto* c = std::get_if<frame::ConcatRight>(&f)) {
      count += count_left_capturing_parens_within(*c->left);
    } else if (std::holds_alternative<frame::GroupInner>(f)) {
      count += 1;
    }
  }
  return count;
}

struct GroupSpecifier {
  std::size_t index;  // 1-based
  RegexContext context;
};

// All capturing groups of `root` named `name`, in pre-order.
inline std::vector<GroupSpecifier> group_specifiers_that_match(
    const Regex& root, std::string_view name) {
  std::vector<GroupSpecifier> out;
  for (const auto& z : enumerate_subterms(root)) {
    const auto* g = z.node->get_if<node::Group>();
    if (g && g->name && *g->name == name) {
      out.push_back({count_left_capturing_parens_before(z.context) + 1, z.context});
    }
  }
  return out;
}

// Names of the capturing groups, indexed by group number - 1.
inline std::vector<std::optional<std::string>> capture_group_names(const Regex& root) {
  std::vector<std::optional<std::string>> names;
  for (const auto& z : enumerate_subterms(root)) {
    if (const auto* g = z.node->get_if<node::Group>()) names.push_back(g->name);
  }
  return names;
}

inline std::size_t node_count(const RegexNode& n) {
  std::size_t count = 1;
  for (const auto& [child, f] : children(n)) count += node_count(*child);
  return count;
}

}  // namespace cpsre
