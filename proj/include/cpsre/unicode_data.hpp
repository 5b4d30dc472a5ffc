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

// Case-folding and property tables.
//
// The tables come from a line-oriented text file (data/unicode_data.txt),
// embedded into the build. Format, one record per line, `#` starts a
// comment:
//
//   FORMAT 1
//   UNICODE <version>
//   FOLD <hex> <hex>                   simple case folding
//   UPPER <hex> <hex>                  single-code-point toUppercase (BMP)
//   PROP <name>=<value> <hexlo>..<hexhi>

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpsre/expected.hpp"

namespace cpsre {

using CodePointMap = std::vector<std::pair<char32_t, char32_t>>;
using CodePointRanges = std::vector<std::pair<char32_t, char32_t>>;

class UnicodeData {
 public:
  static constexpr int kFormatVersion = 1;

  static Expected<UnicodeData, std::string> parse(std::string_view text);
  static const UnicodeData& builtin();

  const std::string& unicode_version() const { return version_; }

  char32_t simple_fold(char32_t c) const {
    auto v = lookup(fold_, c);
    return v ? *v : c;
  }
  std::optional<char32_t> upper(char32_t c) const { return lookup(upper_, c); }

  const CodePointMap& fold_entries() const { return fold_; }
  const CodePointMap& upper_entries() const { return upper_; }

  // Ranges for `name=value`, or nullptr when the data has no such property.
  const CodePointRanges* property(std::string_view name, std::string_view value) const {
    std::string key;
    key.reserve(name.size() + value.size() + 1);
    key.append(name).append("=").append(value);
    auto it = props_.find(key);
    return it == props_.end() ? nullptr : &it->second;
  }

 private:
  static std::optional<char32_t> lookup(const CodePointMap& m, char32_t c) {
    auto it = std::lower_bound(m.begin(), m.end(), c,
                               [](const auto& e, char32_t k) { return e.first < k; });
    if (it == m.end() || it->first != c) return std::nullopt;
    return it->second;
  }

  std::string version_;
  CodePointMap fold_;
  CodePointMap upper_;
  std::map<std::string, CodePointRanges, std::less<>> props_;
};

namespace detail {

inline std::optional<char32_t> parse_hex(std::string_view s) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || v > 0x10FFFF) {
    return std::nullopt;
  }
  return static_cast<char32_t>(v);
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

inline Expected<UnicodeData, std::string> UnicodeData::parse(std::string_view text) {
  UnicodeData d;
  bool saw_format = false;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    return Unexpected{"line " + std::to_string(line_no) + ": " + msg};
  };
  while (!text.empty()) {
    ++line_no;
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    std::string_view tag = fields[0];
    if (tag == "FORMAT") {
      if (fields.size() != 2 || fields[1] != "1") return fail("unsupported format version");
      saw_format = true;
    } else if (tag == "UNICODE") {
      if (fields.size() != 2) return fail("malformed UNICODE record");
      d.version_ = std::string(fields[1]);
    } else if (tag == "FOLD" || tag == "UPPER") {
      if (fields.size() != 3) return fail("malformed mapping record");
      auto from = detail::parse_hex(fields[1]);
      auto to = detail::parse_hex(fields[2]);
      if (!from || !to) return fail("bad code point");
      (tag == "FOLD" ? d.fold_ : d.upper_).emplace_back(*from, *to);
    } else if (tag == "PROP") {
      if (fields.size() != 3) return fail("malformed PROP record");
      std::string_view key = fields[1];
      if (key.find('=') == std::string_view::npos) return fail("PROP key needs name=value");
      std::string_view range = fields[2];
      auto dots = range.find("..");
      if (dots == std::string_view::npos) return fail("PROP range needs lo..hi");
      auto lo = detail::parse_hex(range.substr(0, dots));
      auto hi = detail::parse_hex(range.substr(dots + 2));
      if (!lo || !hi || *lo > *hi) return fail("bad PROP range");
      d.props_[std::string(key)].emplace_back(*lo, *hi);
    } else {
      return fail("unknown record '" + std::string(tag) + "'");
    }
  }
  if (!saw_format) return Unexpected{std::string("missing FORMAT record")};
  auto by_key = [](const auto& a, const auto& b) { return a.first < b.first; };
  std::sort(d.fold_.begin(), d.fold_.end(), by_key);
  std::sort(d.upper_.begin(), d.upper_.end(), by_key);
  for (auto& [k, ranges] : d.props_) std::sort(ranges.begin(), ranges.end());
  return d;
}

inline const UnicodeData& UnicodeData::builtin() {
  static constexpr char kText[] =
#include "cpsre/unicode_data_text.inc"
      ;
  static const UnicodeData data = [] {
    auto parsed = parse(std::string_view(kText, sizeof(kText) - 1));
    // The embedded file is validated by the unit tests; a corrupt build
    // yields empty tables rather than a crash.
    return parsed ? std::move(parsed).value() : UnicodeData{};
  }();
  return data;
}

}  // namespace cpsre
