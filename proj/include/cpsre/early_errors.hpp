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

// Static rejection of ill-formed patterns. A pattern that validates is one
// the compiler and matchers must handle without internal errors.

#pragma once

#include <set>
#include <string>
#include <vector>

#include "cpsre/ast.hpp"

namespace cpsre {

enum class EarlyErrorKind {
  QuantifierMinGtMax,
  DuplicateGroupName,
  DanglingNamedBackref,
  NumericBackrefOutOfRange,
  InvalidClassRange,
};

inline const char* to_string(EarlyErrorKind k) {
  switch (k) {
    case EarlyErrorKind::QuantifierMinGtMax: return "QuantifierMinGtMax";
    case EarlyErrorKind::DuplicateGroupName: return "DuplicateGroupName";
    case EarlyErrorKind::DanglingNamedBackref: return "DanglingNamedBackref";
    case EarlyErrorKind::NumericBackrefOutOfRange: return "NumericBackrefOutOfRange";
    case EarlyErrorKind::InvalidClassRange: return "InvalidClassRange";
  }
  return "?";
}

struct EarlyError {
  EarlyErrorKind kind;
  std::string detail;
  RegexContext location;

  // `EARLY_ERROR <kind> at <context-path>`
  std::string to_line() const {
    return std::string("EARLY_ERROR ") + to_string(kind) + " at " + location.path();
  }
};

// All violations in pre-order of the offending node; empty means ok.
inline std::vector<EarlyError> validate(const Regex& root, const Flags& /*flags*/) {
  std::vector<EarlyError> errors;
  const auto subterms = enumerate_subterms(root);
  const std::size_t groups = count_left_capturing_parens_within(*root);

  std::set<std::string, std::less<>> names;
  for (const auto& z : subterms) {
    if (const auto* g = z.node->get_if<node::Group>(); g && g->name) names.insert(*g->name);
  }

  std::set<std::string, std::less<>> seen;
  for (const auto& z : subterms) {
    const RegexNode& n = *z.node;
    if (const auto* q = n.get_if<node::Quantified>()) {
      const auto& qt = q->quantifier;
      if (qt.max && qt.min > *qt.max) {
        errors.push_back({EarlyErrorKind::QuantifierMinGtMax,
                          "quantifier {" + std::to_string(qt.min) + "," + std::to_string(*qt.max) +
                              "} has min > max",
                          z.context});
      }
    } else if (const auto* g = n.get_if<node::Group>()) {
      if (g->name && !seen.insert(*g->name).second) {
        errors.push_back({EarlyErrorKind::DuplicateGroupName,
                          "group name '" + *g->name + "' is defined more than once", z.context});
      }
    } else if (const auto* b = n.get_if<node::NamedBackreference>()) {
      if (!names.count(b->name)) {
        errors.push_back({EarlyErrorKind::DanglingNamedBackref,
                          "no group named '" + b->name + "'", z.context});
      }
    } else if (const auto* b = n.get_if<node::Backreference>()) {
      if (b->index == 0 || b->index > groups) {
        errors.push_back({EarlyErrorKind::NumericBackrefOutOfRange,
                          "backreference \\" + std::to_string(b->index) + " but only " +
                              std::to_string(groups) + " groups",
                          z.context});
      }
    } else if (const auto* c = n.get_if<node::CharacterClass>()) {
      for (const auto& atom : c->atoms) {
        const auto* r = std::get_if<node::ClassRange>(&atom);
        if (r && r->lo > r->hi) {
          errors.push_back({EarlyErrorKind::InvalidClassRange, "class range out of order",
                            z.context});
          break;
        }
      }
    }
  }
  return errors;
}

}  // namespace cpsre
