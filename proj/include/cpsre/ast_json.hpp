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

// JSON form of an AST plus flags. See docs/ast-json.md for the schema.
//
//   {"version": 1, "flags": "gu", "ast": <node>}
//
// A node is an object tagged by "kind"; code points are integers.

#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "cpsre/ast.hpp"
#include "cpsre/expected.hpp"
#include "json.hpp"

namespace cpsre {

inline constexpr int kAstJsonVersion = 1;

struct DecodeError {
  std::string path;  // JSON pointer of the offending value
  std::string message;

  std::string to_string() const { return "decode error at " + path + ": " + message; }
};

struct FlaggedAst {
  Regex ast;
  Flags flags;
};

namespace detail {

inline nlohmann::json class_atom_to_json(const node::ClassAtom& a) {
  using nlohmann::json;
  if (const auto* r = std::get_if<node::ClassRange>(&a)) {
    return json{{"kind", "Range"}, {"lo", static_cast<std::uint32_t>(r->lo)},
                {"hi", static_cast<std::uint32_t>(r->hi)}};
  }
  if (const auto* e = std::get_if<node::ClassEscape>(&a)) {
    return json{{"kind", "ClassEscape"}, {"escape", std::string(1, to_letter(e->kind))}};
  }
  const auto& p = std::get<node::UnicodeProperty>(a);
  return json{{"kind", "UnicodeProperty"}, {"name", p.name}, {"value", p.value},
              {"negated", p.negated}};
}

inline nlohmann::json node_to_json(const RegexNode& n) {
  using nlohmann::json;
  json j{{"kind", to_string(n.kind())}};
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, node::Char>) {
          j["value"] = static_cast<std::uint32_t>(x.value);
        } else if constexpr (std::is_same_v<T, node::CharacterClass>) {
          j["negated"] = x.negated;
          j["items"] = json::array();
          for (const auto& a : x.atoms) j["items"].push_back(class_atom_to_json(a));
        } else if constexpr (std::is_same_v<T, node::ClassEscape>) {
          j["escape"] = std::string(1, to_letter(x.kind));
        } else if constexpr (std::is_same_v<T, node::UnicodeProperty>) {
          j["name"] = x.name;
          j["value"] = x.value;
          j["negated"] = x.negated;
        } else if constexpr (std::is_same_v<T, node::Disjunction> ||
                             std::is_same_v<T, node::Concat>) {
          j["left"] = node_to_json(*x.left);
          j["right"] = node_to_json(*x.right);
        } else if constexpr (std::is_same_v<T, node::Quantified>) {
          j["body"] = node_to_json(*x.body);
          j["min"] = x.quantifier.min;
          j["max"] = x.quantifier.max ? json(*x.quantifier.max) : json(nullptr);
          j["greedy"] = x.quantifier.greedy;
        } else if constexpr (std::is_same_v<T, node::Group>) {
          j["body"] = node_to_json(*x.body);
          j["name"] = x.name ? json(*x.name) : json(nullptr);
        } else if constexpr (std::is_same_v<T, node::NonCapturingGroup>) {
          j["body"] = node_to_json(*x.body);
        } else if constexpr (std::is_same_v<T, node::Lookaround>) {
          j["look"] = to_string(x.kind);
          j["body"] = node_to_json(*x.body);
        } else if constexpr (std::is_same_v<T, node::Anchor>) {
          j["anchor"] = to_string(x.kind);
        } else if constexpr (std::is_same_v<T, node::Backreference>) {
          j["index"] = x.index;
        } else if constexpr (std::is_same_v<T, node::NamedBackreference>) {
          j["name"] = x.name;
        }
      },
      n.variant());
  return j;
}

class JsonDecoder {
 public:
  explicit JsonDecoder(bool unicode) : max_char_(unicode ? 0x10FFFF : 0xFFFF) {}

  Expected<Regex, DecodeError> node(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) return fail(path, "node must be an object");
    auto kind = string_field(j, "kind", path);
    if (!kind) return Unexpected{std::move(kind).error()};
    const std::string& k = kind.value();
    if (k == "Empty") return re::empty();
    if (k == "Dot") return re::dot();
    if (k == "Char") {
      auto v = code_point(j, "value", path);
      if (!v) return Unexpected{std::move(v).error()};
      return re::chr(v.value());
    }
    if (k == "CharacterClass") {
      auto neg = bool_field(j, "negated", path);
      if (!neg) return Unexpected{std::move(neg).error()};
      if (!j.contains("items") || !j["items"].is_array()) return fail(path + "/items", "expected array");
      std::vector<node::ClassAtom> atoms;
      for (std::size_t i = 0; i < j["items"].size(); ++i) {
        auto a = class_atom(j["items"][i], path + "/items/" + std::to_string(i));
        if (!a) return Unexpected{std::move(a).error()};
        atoms.push_back(std::move(a).value());
      }
      return re::cls(neg.value(), std::move(atoms));
    }
    if (k == "ClassEscape") {
      auto e = escape_field(j, path);
      if (!e) return Unexpected{std::move(e).error()};
      return re::class_escape(e.value());
    }
    if (k == "UnicodeProperty") {
      auto p = property(j, path);
      if (!p) return Unexpected{std::move(p).error()};
      return re::make(std::move(p).value());
    }
    if (k == "Disjunction" || k == "Concat") {
      auto l = child(j, "left", path);
      if (!l) return l;
      auto r = child(j, "right", path);
      if (!r) return r;
      return k == "Concat" ? re::concat(std::move(l).value(), std::move(r).value())
                           : re::alt(std::move(l).value(), std::move(r).value());
    }
    if (k == "Quantified") {
      auto body = child(j, "body", path);
      if (!body) return body;
      Quantifier q;
      if (!j.contains("min") || !j["min"].is_number_unsigned()) {
        return fail(path + "/min", "expected nonnegative integer");
      }
      q.min = j["min"].get<std::uint64_t>();
      if (!j.contains("max")) return fail(path + "/max", "missing field");
      if (j["max"].is_null()) {
        q.max = std::nullopt;
      } else if (j["max"].is_number_unsigned()) {
        q.max = j["max"].get<std::uint64_t>();
      } else {
        return fail(path + "/max", "expected nonnegative integer or null");
      }
      auto g = bool_field(j, "greedy", path);
      if (!g) return Unexpected{std::move(g).error()};
      q.greedy = g.value();
      return re::quant(std::move(body).value(), q);
    }
    if (k == "Group") {
      auto body = child(j, "body", path);
      if (!body) return body;
      std::optional<std::string> name;
      if (j.contains("name") && !j["name"].is_null()) {
        if (!j["name"].is_string() || j["name"].get<std::string>().empty()) {
          return fail(path + "/name", "expected non-empty string or null");
        }
        name = j["name"].get<std::string>();
      }
      return re::group(std::move(body).value(), std::move(name));
    }
    if (k == "NonCapturingGroup") {
      auto body = child(j, "body", path);
      if (!body) return body;
      return re::ncgroup(std::move(body).value());
    }
    if (k == "Lookaround") {
      auto look = string_field(j, "look", path);
      if (!look) return Unexpected{std::move(look).error()};
      std::optional<LookKind> kind;
      for (LookKind c : {LookKind::Ahead, LookKind::Behind, LookKind::NegAhead, LookKind::NegBehind}) {
        if (look.value() == to_string(c)) kind = c;
      }
      if (!kind) return fail(path + "/look", "unknown lookaround kind");
      auto body = child(j, "body", path);
      if (!body) return body;
      return re::look(*kind, std::move(body).value());
    }
    if (k == "Anchor") {
      auto a = string_field(j, "anchor", path);
      if (!a) return Unexpected{std::move(a).error()};
      for (AnchorKind c : {AnchorKind::InputStart, AnchorKind::InputEnd, AnchorKind::WordBoundary,
                           AnchorKind::NotWordBoundary}) {
        if (a.value() == to_string(c)) return re::anchor(c);
      }
      return fail(path + "/anchor", "unknown anchor kind");
    }
    if (k == "Backreference") {
      if (!j.contains("index") || !j["index"].is_number_unsigned() || j["index"].get<std::uint64_t>() == 0) {
        return fail(path + "/index", "expected positive integer");
      }
      return re::backref(j["index"].get<std::uint64_t>());
    }
    if (k == "NamedBackreference") {
      auto n = string_field(j, "name", path);
      if (!n) return Unexpected{std::move(n).error()};
      if (n.value().empty()) return fail(path + "/name", "empty group name");
      return re::named_backref(std::move(n).value());
    }
    return fail(path + "/kind", "unknown node kind '" + k + "'");
  }

 private:
  static Unexpected<DecodeError> fail(std::string path, std::string msg) {
    return Unexpected{DecodeError{std::move(path), std::move(msg)}};
  }

  Expected<Regex, DecodeError> child(const nlohmann::json& j, const char* key,
                                     const std::string& path) {
    if (!j.contains(key)) return fail(path + "/" + key, "missing field");
    return node(j[key], path + "/" + key);
  }

  static Expected<std::string, DecodeError> string_field(const nlohmann::json& j, const char* key,
                                                         const std::string& path) {
    if (!j.contains(key) || !j[key].is_string()) return fail(path + "/" + key, "expected string");
    return j[key].get<std::string>();
  }

  static Expected<bool, DecodeError> bool_field(const nlohmann::json& j, const char* key,
                                                const std::string& path) {
    if (!j.contains(key) || !j[key].is_boolean()) return fail(path + "/" + key, "expected boolean");
    return j[key].get<bool>();
  }

  Expected<char32_t, DecodeError> code_point(const nlohmann::json& j, const char* key,
                                             const std::string& path) const {
    if (!j.contains(key) || !j[key].is_number_unsigned() || j[key].get<std::uint64_t>() > max_char_) {
      return fail(path + "/" + key,
                  "expected code point <= " + std::to_string(static_cast<std::uint32_t>(max_char_)));
    }
    return static_cast<char32_t>(j[key].get<std::uint64_t>());
  }

  static Expected<ClassEscapeKind, DecodeError> escape_field(const nlohmann::json& j,
                                                             const std::string& path) {
    auto e = string_field(j, "escape", path);
    if (!e) return Unexpected{std::move(e).error()};
    if (e.value().size() == 1) {
      if (auto k = class_escape_from_letter(static_cast<unsigned char>(e.value()[0]))) return *k;
    }
    return fail(path + "/escape", "expected one of d D w W s S");
  }

  static Expected<node::UnicodeProperty, DecodeError> property(const nlohmann::json& j,
                                                               const std::string& path) {
    auto name = string_field(j, "name", path);
    if (!name) return Unexpected{std::move(name).error()};
    auto value = string_field(j, "value", path);
    if (!value) return Unexpected{std::move(value).error()};
    auto neg = bool_field(j, "negated", path);
    if (!neg) return Unexpected{std::move(neg).error()};
    return node::UnicodeProperty{std::move(name).value(), std::move(value).value(), neg.value()};
  }

  Expected<node::ClassAtom, DecodeError> class_atom(const nlohmann::json& j,
                                                    const std::string& path) {
    if (!j.is_object()) return fail(path, "class item must be an object");
    auto kind = string_field(j, "kind", path);
    if (!kind) return Unexpected{std::move(kind).error()};
    if (kind.value() == "Range") {
      auto lo = code_point(j, "lo", path);
      if (!lo) return Unexpected{std::move(lo).error()};
      auto hi = code_point(j, "hi", path);
      if (!hi) return Unexpected{std::move(hi).error()};
      return node::ClassAtom{node::ClassRange{lo.value(), hi.value()}};
    }
    if (kind.value() == "ClassEscape") {
      auto e = escape_field(j, path);
      if (!e) return Unexpected{std::move(e).error()};
      return node::ClassAtom{node::ClassEscape{e.value()}};
    }
    if (kind.value() == "UnicodeProperty") {
      auto p = property(j, path);
      if (!p) return Unexpected{std::move(p).error()};
      return node::ClassAtom{std::move(p).value()};
    }
    return fail(path + "/kind", "unknown class item kind '" + kind.value() + "'");
  }

  char32_t max_char_;
};

}  // namespace detail

inline nlohmann::json ast_to_json_value(const Regex& root, const Flags& flags) {
  return nlohmann::json{{"version", kAstJsonVersion},
                        {"flags", flags.to_string()},
                        {"ast", detail::node_to_json(*root)}};
}

inline std::string ast_to_json(const Regex& root, const Flags& flags, int indent = -1) {
  return ast_to_json_value(root, flags).dump(indent);
}

inline Expected<FlaggedAst, DecodeError> ast_from_json_value(const nlohmann::json& doc) {
  if (!doc.is_object()) return Unexpected{DecodeError{"", "document must be an object"}};
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != kAstJsonVersion) {
    return Unexpected{DecodeError{"/version", "unsupported schema version"}};
  }
  if (!doc.contains("flags") || !doc["flags"].is_string()) {
    return Unexpected{DecodeError{"/flags", "expected string"}};
  }
  auto flags = Flags::parse(doc["flags"].get<std::string>());
  if (!flags) return Unexpected{DecodeError{"/flags", flags.error()}};
  if (!doc.contains("ast")) return Unexpected{DecodeError{"/ast", "missing field"}};
  auto root = detail::JsonDecoder(flags.value().unicode).node(doc["ast"], "/ast");
  if (!root) return Unexpected{std::move(root).error()};
  return FlaggedAst{std::move(root).value(), flags.value()};
}

inline Expected<FlaggedAst, DecodeError> ast_from_json(std::string_view text) {
  auto doc = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return Unexpected{DecodeError{"", "malformed JSON"}};
  return ast_from_json_value(doc);
}

}  // namespace cpsre
