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

// Differential testing against an external oracle process.
//
// Wire protocol: JSON lines over the child's stdin/stdout, UTF-8, one
// request per line and exactly one response per line, in order.
//
//   request   {"pattern": "...", "flags": "dgimsuy", "input": "<escaped>",
//              "lastIndex": N}
//   response  {"status": "ok", "matched": true, "index": I, "endIndex": E,
//              "captures": [{"start": S, "end": T} | null, ...],
//              "named": {"name": {"start": S, "end": T} | null, ...}}
//             {"status": "ok", "matched": false}
//             {"status": "error", "message": "..."}
//
// "input" uses the escape syntax of escape.hpp. All offsets are UTF-16
// code units, as a JavaScript host reports them. The oracle is expected
// to set lastIndex and call exec; since a host ignores lastIndex unless
// the pattern is global or sticky, requests with a nonzero lastIndex
// carry the `g` flag (it changes nothing else about one exec call).

#pragma once

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpsre/ast_json.hpp"
#include "cpsre/executor.hpp"
#include "cpsre/expected.hpp"
#include "cpsre/harness/escape.hpp"
#include "cpsre/harness/generator.hpp"
#include "cpsre/parser.hpp"
#include "json.hpp"

namespace cpsre::harness {

struct OracleRequest {
  std::string pattern;  // UTF-8 source
  std::string flags;
  std::u16string input;
  std::size_t last_index = 0;  // UTF-16 units

  nlohmann::json to_json() const {
    return {{"pattern", pattern}, {"flags", flags}, {"input", encode_escaped(input)},
            {"lastIndex", last_index}};
  }

  static Expected<OracleRequest, std::string> from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("pattern") || !j["pattern"].is_string() ||
        !j.contains("flags") || !j["flags"].is_string() || !j.contains("input") ||
        !j["input"].is_string() || !j.contains("lastIndex") ||
        !j["lastIndex"].is_number_unsigned()) {
      return Unexpected{std::string("malformed request")};
    }
    auto input = decode_escaped(j["input"].get<std::string>());
    if (!input) return Unexpected{"bad input escape: " + input.error()};
    return OracleRequest{j["pattern"].get<std::string>(), j["flags"].get<std::string>(),
                         std::move(input).value(), j["lastIndex"].get<std::size_t>()};
  }
};

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct OracleResponse {
  bool ok = true;  // status
  std::string message;
  bool matched = false;
  std::size_t index = 0;
  std::size_t end_index = 0;
  std::vector<std::optional<Span>> captures;
  std::map<std::string, std::optional<Span>> named;

  nlohmann::json to_json() const {
    using nlohmann::json;
    if (!ok) return {{"status", "error"}, {"message", message}};
    if (!matched) return {{"status", "ok"}, {"matched", false}};
    auto span = [](const std::optional<Span>& s) -> json {
      return s ? json{{"start", s->start}, {"end", s->end}} : json(nullptr);
    };
    json caps = json::array();
    for (const auto& c : captures) caps.push_back(span(c));
    json names = json::object();
    for (const auto& [k, v] : named) names[k] = span(v);
    return {{"status", "ok"}, {"matched", true}, {"index", index}, {"endIndex", end_index},
            {"captures", caps}, {"named", names}};
  }

  static Expected<OracleResponse, std::string> from_json(const nlohmann::json& j) {
    OracleResponse r;
    if (!j.is_object() || !j.contains("status") || !j["status"].is_string()) {
      return Unexpected{std::string("response without status")};
    }
    if (j["status"] == "error") {
      r.ok = false;
      if (j.contains("message") && j["message"].is_string()) r.message = j["message"];
      return r;
    }
    if (j["status"] != "ok") return Unexpected{std::string("unknown status")};
    if (!j.contains("matched") || !j["matched"].is_boolean()) {
      return Unexpected{std::string("response without matched")};
    }
    r.matched = j["matched"].get<bool>();
    if (!r.matched) return r;
    auto span = [](const nlohmann::json& s) -> Expected<std::optional<Span>, std::string> {
      if (s.is_null()) return std::optional<Span>{};
      if (!s.is_object() || !s.contains("start") || !s.contains("end") ||
          !s["start"].is_number_unsigned() || !s["end"].is_number_unsigned()) {
        return Unexpected{std::string("malformed span")};
      }
      return std::optional<Span>{Span{s["start"].get<std::size_t>(), s["end"].get<std::size_t>()}};
    };
    if (!j.contains("index") || !j["index"].is_number_unsigned() || !j.contains("endIndex") ||
        !j["endIndex"].is_number_unsigned()) {
      return Unexpected{std::string("response without index/endIndex")};
    }
    r.index = j["index"].get<std::size_t>();
    r.end_index = j["endIndex"].get<std::size_t>();
    if (j.contains("captures")) {
      if (!j["captures"].is_array()) return Unexpected{std::string("captures must be an array")};
      for (const auto& c : j["captures"]) {
        auto s = span(c);
        if (!s) return Unexpected{s.error()};
        r.captures.push_back(s.value());
      }
    }
    if (j.contains("named") && !j["named"].is_null()) {
      if (!j["named"].is_object()) return Unexpected{std::string("named must be an object")};
      for (const auto& [k, v] : j["named"].items()) {
        auto s = span(v);
        if (!s) return Unexpected{s.error()};
        r.named[k] = s.value();
      }
    }
    return r;
  }
};

// The response this engine would give, offsets in UTF-16 units.
inline OracleResponse engine_response(const Pattern& p, const std::optional<ExecRecord>& rec,
                                      std::u16string_view input) {
  OracleResponse r;
  if (!rec) return r;
  ExecRecord units = p.to_code_unit_offsets(*rec, input);
  r.matched = true;
  r.index = units.index;
  r.end_index = units.end_index;
  auto span = [](const std::optional<CaptureRecord>& c) -> std::optional<Span> {
    if (!c) return std::nullopt;
    return Span{c->start, c->end};
  };
  for (const auto& c : units.captures) r.captures.push_back(span(c));
  for (const auto& [name, c] : units.named_groups) r.named[name] = span(c);
  return r;
}

// Empty when the two agree; otherwise a description of the first difference.
inline std::string compare_responses(const OracleResponse& ours, const OracleResponse& theirs) {
  if (!theirs.ok) return "oracle error: " + theirs.message;
  if (ours.matched != theirs.matched) {
    return std::string("matched: ours=") + (ours.matched ? "true" : "false") +
           " oracle=" + (theirs.matched ? "true" : "false");
  }
  if (!ours.matched) return "";
  if (ours.index != theirs.index || ours.end_index != theirs.end_index) {
    return "span: ours=[" + std::to_string(ours.index) + "," + std::to_string(ours.end_index) +
           ") oracle=[" + std::to_string(theirs.index) + "," + std::to_string(theirs.end_index) +
           ")";
  }
  if (ours.captures.size() != theirs.captures.size()) return "capture count differs";
  auto show = [](const std::optional<Span>& s) {
    return s ? "[" + std::to_string(s->start) + "," + std::to_string(s->end) + ")"
             : std::string("undefined");
  };
  for (std::size_t i = 0; i < ours.captures.size(); ++i) {
    if (ours.captures[i] != theirs.captures[i]) {
      return "group " + std::to_string(i + 1) + ": ours=" + show(ours.captures[i]) +
             " oracle=" + show(theirs.captures[i]);
    }
  }
  if (ours.named != theirs.named) return "named groups differ";
  return "";
}

// ---------------------------------------------------------------------------
// Child process

struct OracleUnavailable {
  std::string message;
};

// Runs `sh -c command` with piped stdin/stdout.
class OracleClient {
 public:
  static Expected<OracleClient, OracleUnavailable> spawn(const std::string& command) {
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0) return Unexpected{OracleUnavailable{"pipe failed"}};
    if (pipe(from_child) != 0) {
      close(to_child[0]);
      close(to_child[1]);
      return Unexpected{OracleUnavailable{"pipe failed"}};
    }
    pid_t pid = fork();
    if (pid < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
      return Unexpected{OracleUnavailable{"fork failed"}};
    }
    if (pid == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    // A dead oracle must surface as an error, not kill us.
    signal(SIGPIPE, SIG_IGN);
    OracleClient c;
    c.pid_ = pid;
    c.in_ = fdopen(to_child[1], "w");
    c.out_ = fdopen(from_child[0], "r");
    if (!c.in_ || !c.out_) return Unexpected{OracleUnavailable{"fdopen failed"}};
    return c;
  }

  OracleClient(OracleClient&& o) noexcept
      : pid_(std::exchange(o.pid_, -1)),
        in_(std::exchange(o.in_, nullptr)),
        out_(std::exchange(o.out_, nullptr)) {}
  OracleClient& operator=(OracleClient&&) = delete;
  ~OracleClient() { shutdown(); }

  Expected<OracleResponse, OracleUnavailable> query(const OracleRequest& req) {
    std::string line = req.to_json().dump() + "\n";
    if (!in_ || std::fwrite(line.data(), 1, line.size(), in_) != line.size() ||
        std::fflush(in_) != 0) {
      return Unexpected{OracleUnavailable{"oracle closed its input"}};
    }
    std::string reply;
    int ch;
    while ((ch = std::fgetc(out_)) != EOF && ch != '\n') reply += static_cast<char>(ch);
    if (ch == EOF && reply.empty()) return Unexpected{OracleUnavailable{"oracle exited"}};
    auto j = nlohmann::json::parse(reply, nullptr, false);
    if (j.is_discarded()) return Unexpected{OracleUnavailable{"unparseable oracle reply: " + reply}};
    auto r = OracleResponse::from_json(j);
    if (!r) return Unexpected{OracleUnavailable{"malformed oracle reply: " + r.error()}};
    return std::move(r).value();
  }

 private:
  OracleClient() = default;

  void shutdown() {
    if (in_) std::fclose(in_);
    if (out_) std::fclose(out_);
    in_ = out_ = nullptr;
    if (pid_ > 0) {
      int status;
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }

  pid_t pid_ = -1;
  std::FILE* in_ = nullptr;
  std::FILE* out_ = nullptr;
};

// Builds the request for a pattern run at `start` (model characters).
inline OracleRequest make_request(const Pattern& p, std::u16string_view input, std::size_t start) {
  OracleRequest req;
  Flags flags = p.flags();
  flags.has_indices = false;
  std::size_t units = start;
  if (flags.unicode) {
    auto chars = CodePointModel::tokenize(input);
    units = 0;
    for (std::size_t i = 0; i < start && i < chars.size(); ++i) units += chars[i] > 0xFFFF ? 2 : 1;
  }
  if (units > 0 && !flags.sticky) flags.global = true;
  req.pattern = print_pattern(p.root(), p.flags());
  req.flags = flags.to_string();
  req.input = std::u16string(input);
  req.last_index = units;
  return req;
}

struct Disagreement {
  std::size_t case_id = 0;
  std::string detail;
  std::string request;  // JSON line sent to the oracle
  std::string ast_json;
};

struct DiffReport {
  std::size_t cases = 0;
  std::size_t agreed = 0;
  std::size_t skipped_resource_limit = 0;
  std::size_t engine_errors = 0;
  std::size_t skipped_folding = 0;
  std::vector<Disagreement> disagreements;
  bool ok() const { return disagreements.empty(); }
};

// Code points whose simple case folding changed in Unicode 15.1. Hosts
// built against older ICU data fold them differently, so disagreements on
// inputs or patterns that contain them are reported apart.
inline const std::vector<char32_t>& folding_sensitive_code_points() {
  static const std::vector<char32_t> kPoints = {0x0390, 0x1FD3, 0x03B0, 0x1FE3, 0xFB05, 0xFB06};
  return kPoints;
}

inline bool touches_folding_sensitive(const OracleRequest& req) {
  if (req.flags.find('i') == std::string::npos) return false;
  auto has = [](const std::u16string& s) {
    for (char16_t c : s) {
      for (char32_t p : folding_sensitive_code_points()) {
        if (c == p) return true;
      }
    }
    return false;
  };
  return has(req.input) || has(utf16_from_utf8(req.pattern));
}

// One case against the oracle. Returns the disagreement, if any.
inline Expected<std::optional<std::string>, OracleUnavailable> compare_with_oracle(
    OracleClient& oracle, const Pattern& p, std::u16string_view input, std::size_t start,
    const RunOptions& run, OracleRequest* sent = nullptr) {
  OracleRequest req = make_request(p, input, start);
  if (sent) *sent = req;
  auto theirs = oracle.query(req);
  if (!theirs) return Unexpected{theirs.error()};
  auto ours = p.exec(input, start, run);
  if (!ours.ok()) return std::optional<std::string>{};  // caller filters engine errors first
  std::string diff = compare_responses(engine_response(p, ours.value(), input), theirs.value());
  if (diff.empty()) return std::optional<std::string>{};
  return std::optional<std::string>{diff};
}

// Runs every case through the engine and the oracle. Cases whose engine
// run hits ResourceLimit are skipped.
inline Expected<DiffReport, OracleUnavailable> differential_run(
    const std::vector<GeneratedCase>& cases, OracleClient& oracle, const RunOptions& run = {}) {
  DiffReport report;
  for (const auto& c : cases) {
    ++report.cases;
    auto p = Pattern::compile(c.ast, c.flags);
    if (!p) {
      report.disagreements.push_back({c.id, "engine rejected a generated pattern: " + p.error().to_string(),
                                      "", ast_to_json(c.ast, c.flags)});
      continue;
    }
    auto ours = p->exec(c.input, c.start, run);
    if (!ours.ok()) {
      if (ours.error().kind == EngineErrorKind::ResourceLimit) {
        ++report.skipped_resource_limit;
      } else {
        ++report.engine_errors;
        report.disagreements.push_back({c.id, std::string("engine error: ") + to_string(ours.error().kind),
                                        "", ast_to_json(c.ast, c.flags)});
      }
      continue;
    }
    OracleRequest req;
    auto diff = compare_with_oracle(oracle, *p, c.input, c.start, run, &req);
    if (!diff) return Unexpected{diff.error()};
    if (!diff.value()) {
      ++report.agreed;
    } else if (touches_folding_sensitive(req)) {
      ++report.skipped_folding;
    } else {
      report.disagreements.push_back(
          {c.id, *diff.value(), req.to_json().dump(), ast_to_json(c.ast, c.flags)});
    }
  }
  return report;
}

}  // namespace cpsre::harness
