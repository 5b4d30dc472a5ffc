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

// Execution: scanning for a start position and packaging the result as an
// exec-style record. The executor is pure; lastIndex is an argument and
// callers decide how to thread it between calls.
//
// Indices in an ExecRecord count characters of the active model (code
// units without `u`, code points with it). to_code_unit_offsets converts
// a record to UTF-16 offsets, which is what a JavaScript host reports.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cpsre/ast.hpp"
#include "cpsre/charmodel.hpp"
#include "cpsre/compiler.hpp"
#include "cpsre/early_errors.hpp"
#include "cpsre/expected.hpp"
#include "cpsre/parser.hpp"

namespace cpsre {

struct CaptureRecord {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;  // UTF-8
  friend bool operator==(const CaptureRecord&, const CaptureRecord&) = default;
};

struct ExecRecord {
  std::size_t index = 0;
  std::size_t end_index = 0;
  std::string matched;  // UTF-8
  std::vector<std::optional<CaptureRecord>> captures;  // groups 1..n
  std::vector<std::pair<std::string, std::optional<CaptureRecord>>> named_groups;  // by group index
  std::size_t input_length = 0;
  friend bool operator==(const ExecRecord&, const ExecRecord&) = default;
};

using ExecOutcome = EngineOutcome<std::optional<ExecRecord>>;

namespace detail {

template <CharacterModel M>
std::string slice_utf8(std::span<const typename M::Char> input, std::size_t start, std::size_t end) {
  std::vector<typename M::Char> part(input.begin() + start, input.begin() + end);
  return utf8_from_utf16(M::render(part));
}

}  // namespace detail

template <CharacterModel M>
ExecRecord make_exec_record(const CompiledPattern<M>& p, std::span<const typename M::Char> input,
                            const Match& m) {
  ExecRecord rec;
  rec.index = m.start;
  rec.end_index = m.end_index;
  rec.matched = detail::slice_utf8<M>(input, m.start, m.end_index);
  rec.input_length = input.size();
  for (std::size_t k = 1; k <= m.captures.size(); ++k) {
    const auto& slot = m.captures.group(k);
    std::optional<CaptureRecord> cap;
    if (slot) cap = CaptureRecord{slot->start, slot->end, detail::slice_utf8<M>(input, slot->start, slot->end)};
    rec.captures.push_back(cap);
    const auto& name = p.group_names()[k - 1];
    if (name) rec.named_groups.emplace_back(*name, cap);
  }
  return rec;
}

// Tries lastIndex, lastIndex+1, ... (only lastIndex when sticky).
template <CharacterModel M>
ExecOutcome exec(const CompiledPattern<M>& p, std::span<const typename M::Char> input,
                 std::size_t last_index, const RunOptions& options = {},
                 MatchProbe<typename M::Char>* probe = nullptr) {
  if (last_index > input.size()) return std::optional<ExecRecord>{};
  for (std::size_t i = last_index; i <= input.size(); ++i) {
    auto r = p.match_at(input, i, options, probe);
    if (!r.ok()) return r.error();
    if (r.value()) return std::optional<ExecRecord>{make_exec_record(p, input, *r.value())};
    if (p.flags().sticky) break;
  }
  return std::optional<ExecRecord>{};
}

template <CharacterModel M>
EngineOutcome<bool> test(const CompiledPattern<M>& p, std::span<const typename M::Char> input,
                         const RunOptions& options = {}) {
  auto r = exec(p, input, 0, options);
  if (!r.ok()) return r.error();
  return r.value().has_value();
}

// Successive exec calls; an empty match advances lastIndex by one character.
template <CharacterModel M>
EngineOutcome<std::vector<ExecRecord>> match_all(const CompiledPattern<M>& p,
                                                 std::span<const typename M::Char> input,
                                                 const RunOptions& options = {}) {
  std::vector<ExecRecord> out;
  std::size_t last_index = 0;
  while (last_index <= input.size()) {
    auto r = exec(p, input, last_index, options);
    if (!r.ok()) return r.error();
    if (!r.value()) break;
    const ExecRecord& rec = *r.value();
    last_index = rec.end_index == rec.index ? rec.end_index + 1 : rec.end_index;
    out.push_back(rec);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pattern: a compiled pattern whose character model follows the `u` flag.

struct PatternError {
  enum class Kind { Parse, Early, Compile };
  Kind kind;
  std::string message;
  std::size_t position = 0;         // Parse only
  std::vector<EarlyError> early;    // Early only

  // One line per problem.
  std::string to_string() const {
    switch (kind) {
      case Kind::Parse:
        return "PARSE_ERROR at " + std::to_string(position) + ": " + message;
      case Kind::Early: {
        std::string s;
        for (const auto& e : early) {
          if (!s.empty()) s += '\n';
          s += e.to_line();
        }
        return s;
      }
      case Kind::Compile:
        return "COMPILE_ERROR " + message;
    }
    return message;
  }
};

class Pattern {
 public:
  using Impl = std::variant<CompiledPattern<Utf16Model>, CompiledPattern<CodePointModel>>;

  // Validates and compiles an AST.
  static Expected<Pattern, PatternError> compile(const Regex& root, const Flags& flags) {
    auto errors = validate(root, flags);
    if (!errors.empty()) {
      std::string first = errors.front().to_line();
      return Unexpected{PatternError{PatternError::Kind::Early, first, 0, std::move(errors)}};
    }
    if (flags.unicode) return build<CodePointModel>(root, flags);
    return build<Utf16Model>(root, flags);
  }

  // Parses, validates and compiles UTF-8 pattern text.
  static Expected<Pattern, PatternError> from_source(std::string_view source, const Flags& flags) {
    auto ast = parse_pattern(source, flags);
    if (!ast) {
      return Unexpected{PatternError{PatternError::Kind::Parse, ast.error().message,
                                     ast.error().position, {}}};
    }
    return compile(ast.value(), flags);
  }

  const Flags& flags() const {
    return std::visit([](const auto& p) -> const Flags& { return p.flags(); }, impl_);
  }
  const Regex& root() const {
    return std::visit([](const auto& p) -> const Regex& { return p.root(); }, impl_);
  }
  std::size_t capture_count() const {
    return std::visit([](const auto& p) { return p.capture_count(); }, impl_);
  }
  const Impl& impl() const { return impl_; }

  // Number of model characters in `input`.
  std::size_t length(std::u16string_view input) const {
    return std::visit(
        [&](const auto& p) {
          using M = typename std::decay_t<decltype(p)>::Model;
          return M::tokenize(input).size();
        },
        impl_);
  }

  ExecOutcome exec(std::u16string_view input, std::size_t last_index,
                   const RunOptions& options = {}) const {
    return std::visit(
        [&](const auto& p) -> ExecOutcome {
          using M = typename std::decay_t<decltype(p)>::Model;
          auto chars = M::tokenize(input);
          return cpsre::exec(p, std::span<const typename M::Char>(chars), last_index, options);
        },
        impl_);
  }

  // Anchored match at `index` (no scanning).
  ExecOutcome match_at(std::u16string_view input, std::size_t index,
                       const RunOptions& options = {}) const {
    return std::visit(
        [&](const auto& p) -> ExecOutcome {
          using M = typename std::decay_t<decltype(p)>::Model;
          auto chars = M::tokenize(input);
          std::span<const typename M::Char> span(chars);
          auto r = p.match_at(span, index, options);
          if (!r.ok()) return r.error();
          if (!r.value()) return std::optional<ExecRecord>{};
          return std::optional<ExecRecord>{make_exec_record(p, span, *r.value())};
        },
        impl_);
  }

  EngineOutcome<bool> test(std::u16string_view input, const RunOptions& options = {}) const {
    auto r = exec(input, 0, options);
    if (!r.ok()) return r.error();
    return r.value().has_value();
  }

  EngineOutcome<std::vector<ExecRecord>> match_all(std::u16string_view input,
                                                   const RunOptions& options = {}) const {
    return std::visit(
        [&](const auto& p) -> EngineOutcome<std::vector<ExecRecord>> {
          using M = typename std::decay_t<decltype(p)>::Model;
          auto chars = M::tokenize(input);
          return cpsre::match_all(p, std::span<const typename M::Char>(chars), options);
        },
        impl_);
  }

  // Rewrites every index of `rec` from model characters to UTF-16 offsets.
  ExecRecord to_code_unit_offsets(const ExecRecord& rec, std::u16string_view input) const {
    if (!flags().unicode) return rec;
    auto chars = CodePointModel::tokenize(input);
    std::vector<std::size_t> offset(chars.size() + 1, 0);
    for (std::size_t i = 0; i < chars.size(); ++i) offset[i + 1] = offset[i] + (chars[i] > 0xFFFF ? 2 : 1);
    ExecRecord out = rec;
    out.index = offset[rec.index];
    out.end_index = offset[rec.end_index];
    out.input_length = input.size();
    auto fix = [&](std::optional<CaptureRecord>& c) {
      if (c) {
        c->start = offset[c->start];
        c->end = offset[c->end];
      }
    };
    for (auto& c : out.captures) fix(c);
    for (auto& [name, c] : out.named_groups) fix(c);
    return out;
  }

  // The inverse direction for a start index: UTF-16 offset to model index.
  std::size_t char_index_from_code_units(std::u16string_view input, std::size_t units) const {
    if (!flags().unicode) return units;
    auto chars = CodePointModel::tokenize(input.substr(0, std::min(units, input.size())));
    return chars.size() + (units > input.size() ? units - input.size() : 0);
  }

 private:
  explicit Pattern(Impl impl) : impl_(std::move(impl)) {}

  template <CharacterModel M>
  static Expected<Pattern, PatternError> build(const Regex& root, const Flags& flags) {
    auto c = compile_pattern<M>(root, flags);
    if (!c) {
      return Unexpected{PatternError{PatternError::Kind::Compile,
                                     std::string(to_string(c.error().kind)) + ": " + c.error().message,
                                     0,
                                     {}}};
    }
    return Pattern(Impl(std::in_place_type<CompiledPattern<M>>, std::move(c).value()));
  }

  Impl impl_;
};

}  // namespace cpsre
