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

// cpsre command-line tool. See README.md for the subcommands and exit codes.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cpsre/cpsre.hpp"
#include "json.hpp"

namespace {

using cpsre::ExecRecord;
using cpsre::Flags;
using cpsre::Pattern;
using cpsre::Regex;
using nlohmann::json;
namespace h = cpsre::harness;

// Exit codes shared by every subcommand.
constexpr int kOk = 0;
constexpr int kNegative = 1;  // no match, violations, counterexample
constexpr int kError = 2;     // bad pattern, bad input, infrastructure

struct Options {
  std::string flags;
  bool json = false;
  std::uint64_t seed = 42;
  std::size_t cases = 10000;
  std::string alphabet;
  std::size_t max_len = 0;
  std::string oracle_cmd;
  std::size_t max_depth = cpsre::RunOptions{}.max_depth;

  std::string pattern;
  std::string pattern_b;
  std::string input;
  std::size_t start = 0;
  bool sticky = false;
  bool ast_json = false;
  int regex_depth = 6;
  std::string corpus;
};

cpsre::RunOptions run_options(const Options& o) {
  cpsre::RunOptions r;
  r.max_depth = o.max_depth;
  return r;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

json error_json(const std::string& kind, const std::string& message) {
  return {{"status", "error"}, {"kind", kind}, {"message", message}};
}

int fail(const Options& o, const std::string& kind, const std::string& message) {
  if (o.json) print_json(error_json(kind, message));
  std::cerr << message << "\n";
  return kError;
}

std::optional<Flags> parse_flags(const Options& o, std::string letters) {
  auto f = Flags::parse(letters);
  if (!f) {
    fail(o, "flags", "invalid flags: " + f.error());
    return std::nullopt;
  }
  return f.value();
}

std::optional<std::string> read_file(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// The AST and flags named on the command line: pattern text plus --flags,
// or with --ast-json a JSON AST document (path or "-") carrying its flags.
std::optional<cpsre::FlaggedAst> load_ast(const Options& o, const std::string& pattern) {
  if (o.ast_json) {
    auto text = read_file(pattern);
    if (!text) {
      fail(o, "io", "cannot read " + pattern);
      return std::nullopt;
    }
    auto doc = cpsre::ast_from_json(*text);
    if (!doc) {
      fail(o, "decode", doc.error().to_string());
      return std::nullopt;
    }
    return doc.value();
  }
  auto flags = parse_flags(o, o.flags);
  if (!flags) return std::nullopt;
  if (o.sticky) flags->sticky = true;
  auto ast = cpsre::parse_pattern(pattern, *flags);
  if (!ast) {
    fail(o, "parse", "PARSE_ERROR at " + std::to_string(ast.error().position) + ": " +
                         ast.error().message);
    return std::nullopt;
  }
  return cpsre::FlaggedAst{ast.value(), *flags};
}

std::optional<Pattern> load_pattern(const Options& o, const std::string& pattern) {
  auto ast = load_ast(o, pattern);
  if (!ast) return std::nullopt;
  if (o.sticky) ast->flags.sticky = true;
  auto p = Pattern::compile(ast->ast, ast->flags);
  if (!p) {
    fail(o, p.error().kind == cpsre::PatternError::Kind::Early ? "early" : "compile",
         p.error().to_string());
    return std::nullopt;
  }
  return std::move(p).value();
}

json capture_json(const std::optional<cpsre::CaptureRecord>& c) {
  if (!c) return nullptr;
  return {{"start", c->start}, {"end", c->end}, {"text", c->text}};
}

json record_json(const Pattern& p, const std::optional<ExecRecord>& rec) {
  json j = {{"status", "ok"}, {"matched", rec.has_value()},
            {"unit", p.flags().unicode ? "code_point" : "code_unit"}};
  if (!rec) return j;
  j["index"] = rec->index;
  j["endIndex"] = rec->end_index;
  j["match"] = rec->matched;
  j["inputLength"] = rec->input_length;
  json caps = json::array();
  for (const auto& c : rec->captures) caps.push_back(capture_json(c));
  j["captures"] = caps;
  json named = json::object();
  for (const auto& [name, c] : rec->named_groups) named[name] = capture_json(c);
  j["named"] = named;
  return j;
}

void print_record_text(const std::optional<ExecRecord>& rec) {
  std::cout << h::describe(rec) << "\n";
  if (!rec) return;
  std::cout << "  match \"" << rec->matched << "\"\n";
  for (std::size_t k = 0; k < rec->captures.size(); ++k) {
    const auto& c = rec->captures[k];
    std::cout << "  g" << k + 1;
    for (const auto& [name, nc] : rec->named_groups) {
      if (nc == c && c) std::cout << " <" << name << ">";
    }
    if (c) {
      std::cout << " \"" << c->text << "\"\n";
    } else {
      std::cout << " undefined\n";
    }
  }
}

std::optional<std::u16string> decode_input(const Options& o, const std::string& text) {
  auto input = h::decode_escaped(text);
  if (!input) {
    fail(o, "input", "invalid input: " + input.error());
    return std::nullopt;
  }
  return input.value();
}

int engine_failure(const Options& o, const cpsre::EngineError& e) {
  return fail(o, "engine", std::string("ENGINE_ERROR ") + cpsre::to_string(e.kind) + ": " + e.detail);
}

// ---------------------------------------------------------------------------

int cmd_match(const Options& o) {
  auto p = load_pattern(o, o.pattern);
  if (!p) return kError;
  auto input = decode_input(o, o.input);
  if (!input) return kError;
  auto r = p->exec(*input, o.start, run_options(o));
  if (!r.ok()) return engine_failure(o, r.error());
  if (o.json) {
    print_json(record_json(*p, r.value()));
  } else {
    print_record_text(r.value());
  }
  return r.value() ? kOk : kNegative;
}

int cmd_test(const Options& o) {
  auto p = load_pattern(o, o.pattern);
  if (!p) return kError;
  auto input = decode_input(o, o.input);
  if (!input) return kError;
  auto r = p->test(*input, run_options(o));
  if (!r.ok()) return engine_failure(o, r.error());
  if (o.json) {
    print_json({{"status", "ok"}, {"result", r.value()}});
  } else {
    std::cout << (r.value() ? "true" : "false") << "\n";
  }
  return r.value() ? kOk : kNegative;
}

void dump_tree(const Regex& n, const Flags& flags, int indent) {
  std::cout << std::string(static_cast<std::size_t>(indent) * 2, ' ') << cpsre::to_string(n->kind())
            << "  " << cpsre::print_pattern(n, flags) << "\n";
  for (const auto& [child, frame] : cpsre::children(*n)) dump_tree(child, flags, indent + 1);
}

int cmd_ast(const Options& o) {
  auto ast = load_ast(o, o.pattern);
  if (!ast) return kError;
  if (o.json) {
    std::cout << cpsre::ast_to_json(ast->ast, ast->flags, 2) << "\n";
  } else {
    std::cout << "/" << cpsre::print_pattern(ast->ast, ast->flags) << "/" << ast->flags.to_string()
              << "\n";
    dump_tree(ast->ast, ast->flags, 0);
  }
  return kOk;
}

int cmd_validate(const Options& o) {
  auto ast = load_ast(o, o.pattern);
  if (!ast) return kError;
  auto errors = cpsre::validate(ast->ast, ast->flags);
  if (o.json) {
    json list = json::array();
    for (const auto& e : errors) {
      list.push_back({{"kind", cpsre::to_string(e.kind)}, {"detail", e.detail},
                      {"location", e.location.path()}});
    }
    print_json({{"status", "ok"}, {"valid", errors.empty()}, {"errors", list}});
  } else if (errors.empty()) {
    std::cout << "OK\n";
  } else {
    for (const auto& e : errors) std::cout << e.to_line() << "\n";
  }
  return errors.empty() ? kOk : kNegative;
}

h::FuzzConfig fuzz_config(const Options& o) {
  h::FuzzConfig cfg;
  cfg.seed = o.seed;
  cfg.case_count = o.cases;
  cfg.max_regex_depth = o.regex_depth;
  if (o.max_len > 0) cfg.max_input_len = o.max_len;
  if (!o.alphabet.empty()) {
    auto a = cpsre::decode_utf8(o.alphabet);
    if (a) cfg.alphabet = a.value();
  }
  return cfg;
}

json diff_json(const h::DiffReport& r) {
  json dis = json::array();
  for (const auto& d : r.disagreements) {
    dis.push_back({{"case", d.case_id}, {"detail", d.detail}, {"request", d.request},
                   {"ast", d.ast_json.empty() ? json(nullptr) : json::parse(d.ast_json)}});
  }
  return {{"cases", r.cases},
          {"agreed", r.agreed},
          {"skippedResourceLimit", r.skipped_resource_limit},
          {"skippedFolding", r.skipped_folding},
          {"engineErrors", r.engine_errors},
          {"disagreements", dis}};
}

void print_diff_text(const h::DiffReport& r) {
  std::cout << "diff: " << r.cases << " cases, " << r.agreed << " agreed, "
            << r.skipped_resource_limit << " skipped (ResourceLimit), " << r.skipped_folding
            << " skipped (folding), " << r.disagreements.size() << " disagreements\n";
  for (const auto& d : r.disagreements) {
    std::cout << "  case " << d.case_id << ": " << d.detail << "\n    request " << d.request
              << "\n    ast " << d.ast_json << "\n";
  }
}

int cmd_fuzz(const Options& o) {
  if (o.alphabet.size() > 0 && !cpsre::decode_utf8(o.alphabet)) {
    return fail(o, "alphabet", "alphabet is not valid UTF-8");
  }
  auto cfg = fuzz_config(o);
  if (cfg.alphabet.empty()) return fail(o, "alphabet", "alphabet must not be empty");
  auto cases = h::generate_cases(cfg);
  h::SuiteOptions so;
  so.run = run_options(o);
  auto report = h::run_invariant_suite(cases, so);

  std::optional<h::DiffReport> diff;
  if (!o.oracle_cmd.empty()) {
    auto client = h::OracleClient::spawn(o.oracle_cmd);
    if (!client) return fail(o, "oracle", "OracleUnavailable: " + client.error().message);
    auto d = h::differential_run(cases, client.value(), so.run);
    if (!d) return fail(o, "oracle", "OracleUnavailable: " + d.error().message);
    diff = std::move(d).value();
  }

  if (o.json) {
    json viol = json::array();
    for (const auto& v : report.violations) {
      viol.push_back({{"case", v.case_id}, {"kind", h::to_string(v.kind)}, {"detail", v.detail},
                      {"repro", v.repro}});
    }
    json j = {{"status", "ok"},
              {"seed", cfg.seed},
              {"cases", report.cases},
              {"matched", report.matched},
              {"resourceLimited", report.resource_limited},
              {"resourceLimitedCases", report.resource_limited_ids},
              {"continuationChecks", report.continuation_checks},
              {"repeatCalls", report.repeat_calls},
              {"maxRepeatDepth", report.max_repeat_depth},
              {"violations", viol}};
    if (diff) j["diff"] = diff_json(*diff);
    print_json(j);
  } else {
    std::cout << "fuzz: seed " << cfg.seed << ", " << report.cases << " cases, " << report.matched
              << " matched, " << report.resource_limited << " hit ResourceLimit, "
              << report.continuation_checks << " continuation checks, max RepeatMatcher depth "
              << report.max_repeat_depth << ", " << report.violations.size() << " violations\n";
    for (const auto& v : report.violations) {
      std::cout << "  case " << v.case_id << " " << h::to_string(v.kind) << ": " << v.detail
                << "\n    repro: " << v.repro << "\n";
    }
    if (diff) print_diff_text(*diff);
  }
  bool ok = report.ok() && (!diff || diff->ok());
  return ok ? kOk : kNegative;
}

int cmd_diff(const Options& o) {
  if (o.oracle_cmd.empty()) return fail(o, "usage", "diff needs --oracle-cmd");
  auto client = h::OracleClient::spawn(o.oracle_cmd);
  if (!client) return fail(o, "oracle", "OracleUnavailable: " + client.error().message);

  h::DiffReport report;
  if (!o.corpus.empty()) {
    std::ifstream in(o.corpus);
    if (!in) return fail(o, "io", "cannot read " + o.corpus);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto c = h::parse_corpus_line(line, line_no);
      if (!c || !c.value() || c.value()->expect == h::CorpusCase::Expect::Error) continue;
      auto p = Pattern::from_source(c.value()->pattern, c.value()->flags);
      if (!p) continue;
      ++report.cases;
      h::OracleRequest req;
      auto d = h::compare_with_oracle(client.value(), *p, c.value()->input, c.value()->start,
                                      run_options(o), &req);
      if (!d) return fail(o, "oracle", "OracleUnavailable: " + d.error().message);
      if (!d.value()) {
        ++report.agreed;
      } else if (h::touches_folding_sensitive(req)) {
        ++report.skipped_folding;
      } else {
        report.disagreements.push_back({line_no, *d.value(), req.to_json().dump(),
                                        cpsre::ast_to_json(p->root(), p->flags())});
      }
    }
  } else {
    auto cases = h::generate_cases(fuzz_config(o));
    auto d = h::differential_run(cases, client.value(), run_options(o));
    if (!d) return fail(o, "oracle", "OracleUnavailable: " + d.error().message);
    report = std::move(d).value();
  }
  if (o.json) {
    json j = diff_json(report);
    j["status"] = "ok";
    print_json(j);
  } else {
    print_diff_text(report);
  }
  return report.ok() ? kOk : kNegative;
}

int cmd_check_rewrite(const Options& o) {
  auto a = load_ast(o, o.pattern);
  if (!a) return kError;
  Regex b;
  if (o.pattern_b.empty()) {
    auto rewritten = cpsre::rewrite_strictly_nullable_stars(a->ast);
    for (const auto& w : rewritten.warnings) std::cerr << "warning: " << w << "\n";
    b = rewritten.root;
    if (!o.json) {
      std::cout << "rewrite: /" << cpsre::print_pattern(b, a->flags) << "/ ("
                << rewritten.rewrites << " stars removed)\n";
    }
  } else {
    auto parsed = load_ast(o, o.pattern_b);
    if (!parsed) return kError;
    b = parsed->ast;
  }
  auto alphabet = cpsre::decode_utf8(o.alphabet.empty() ? std::string("ab") : o.alphabet);
  if (!alphabet) return fail(o, "alphabet", "alphabet is not valid UTF-8");
  const std::size_t max_len = o.max_len > 0 ? o.max_len : 4;
  auto report = cpsre::check_equivalence(a->ast, b, a->flags, alphabet.value(), max_len);
  if (!report) return fail(o, "pattern", report.error());
  if (o.json) {
    json j = {{"status", "ok"},
              {"equivalent", report->equivalent},
              {"casesChecked", report->cases_checked},
              {"second", cpsre::print_pattern(b, a->flags)}};
    if (report->counterexample) {
      const auto& c = *report->counterexample;
      auto result = [](const std::optional<ExecRecord>& r) -> json {
        if (!r) return nullptr;
        json caps = json::array();
        for (const auto& g : r->captures) caps.push_back(capture_json(g));
        return {{"index", r->index}, {"endIndex", r->end_index}, {"captures", caps}};
      };
      j["counterexample"] = {{"input", h::encode_escaped(c.input)},
                             {"start", c.start},
                             {"first", result(c.a)},
                             {"second", result(c.b)}};
    }
    print_json(j);
  } else if (report->equivalent) {
    std::cout << "EQUIVALENT on " << report->cases_checked << " (input, start) pairs\n";
  } else {
    const auto& c = *report->counterexample;
    std::cout << "COUNTEREXAMPLE input \"" << h::encode_escaped(c.input) << "\" start " << c.start
              << "\n  first:  " << h::describe(c.a) << "\n  second: " << h::describe(c.b) << "\n";
  }
  return report->equivalent ? kOk : kNegative;
}

int cmd_corpus(const Options& o) {
  std::ifstream in(o.corpus);
  if (!in) return fail(o, "io", "cannot read " + o.corpus);
  auto report = h::run_corpus(in, run_options(o));
  if (o.json) {
    auto list = [](const std::vector<h::CorpusFailure>& v) {
      json a = json::array();
      for (const auto& f : v) a.push_back({{"line", f.line}, {"message", f.message}});
      return a;
    };
    print_json({{"status", "ok"},
                {"cases", report.cases},
                {"passed", report.passed},
                {"failures", list(report.failures)},
                {"malformed", list(report.malformed)}});
  } else {
    for (const auto& f : report.malformed) std::cout << "line " << f.line << ": malformed: " << f.message << "\n";
    for (const auto& f : report.failures) std::cout << "line " << f.line << ": FAIL " << f.message << "\n";
    std::cout << "corpus: " << report.passed << "/" << report.cases << " passed";
    if (!report.malformed.empty()) std::cout << ", " << report.malformed.size() << " malformed lines";
    std::cout << "\n";
  }
  return report.ok() ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpsre: ECMAScript regular expressions, compiled to continuation-passing matchers"};
  app.require_subcommand(1);
  Options o;

  auto shared = [&](CLI::App* sub) {
    sub->add_option("--flags", o.flags, "Flag letters (dgimsuy)");
    sub->add_flag("--json", o.json, "Machine-readable output");
    sub->add_option("--max-depth", o.max_depth, "Matcher recursion limit (ResourceLimit beyond)")
        ->check(CLI::PositiveNumber);
  };
  auto campaign = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Generator seed");
    sub->add_option("--cases", o.cases, "Number of generated cases");
    sub->add_option("--alphabet", o.alphabet, "Characters for generated regexes and inputs");
    sub->add_option("--max-len", o.max_len, "Maximum generated input length");
    sub->add_option("--depth", o.regex_depth, "Maximum generated AST depth")->check(CLI::NonNegativeNumber);
  };

  auto* match = app.add_subcommand("match", "Run exec and print the match record");
  match->add_option("pattern", o.pattern)->required();
  match->add_option("input", o.input, "Input with \\xHH / \\uHHHH escapes")->required();
  match->add_option("--start", o.start, "lastIndex to scan from");
  match->add_flag("--sticky", o.sticky, "Add the y flag");
  match->add_flag("--ast-json", o.ast_json, "PATTERN names a JSON AST file ('-' for stdin)");
  shared(match);

  auto* test = app.add_subcommand("test", "Print whether the pattern matches anywhere");
  test->add_option("pattern", o.pattern)->required();
  test->add_option("input", o.input)->required();
  test->add_flag("--ast-json", o.ast_json, "PATTERN names a JSON AST file ('-' for stdin)");
  shared(test);

  auto* ast = app.add_subcommand("ast", "Print the AST (JSON with --json)");
  ast->add_option("pattern", o.pattern)->required();
  ast->add_flag("--ast-json", o.ast_json, "PATTERN names a JSON AST file ('-' for stdin)");
  shared(ast);

  auto* validate = app.add_subcommand("validate", "Report early errors");
  validate->add_option("pattern", o.pattern)->required();
  validate->add_flag("--ast-json", o.ast_json, "PATTERN names a JSON AST file ('-' for stdin)");
  shared(validate);

  auto* fuzz = app.add_subcommand("fuzz", "Run the invariant suite on generated cases");
  campaign(fuzz);
  fuzz->add_option("--oracle-cmd", o.oracle_cmd, "Also compare every case with this oracle");
  shared(fuzz);

  auto* diff = app.add_subcommand("diff", "Compare generated or corpus cases with an oracle");
  campaign(diff);
  diff->add_option("--oracle-cmd", o.oracle_cmd, "Shell command speaking the oracle protocol")->required();
  diff->add_option("--corpus", o.corpus, "Use the cases of this corpus file");
  shared(diff);

  auto* rewrite = app.add_subcommand(
      "check-rewrite", "Search for an input telling two patterns apart (default second: SN rewrite)");
  rewrite->add_option("pattern", o.pattern)->required();
  rewrite->add_option("other", o.pattern_b);
  rewrite->add_option("--alphabet", o.alphabet, "Input alphabet (default ab)");
  rewrite->add_option("--max-len", o.max_len, "Longest input (default 4)");
  shared(rewrite);

  auto* corpus = app.add_subcommand("corpus", "Run a conformance corpus file");
  corpus->add_option("file", o.corpus)->required();
  shared(corpus);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n\n";
    const CLI::App* failed = &app;
    for (const auto* sub : app.get_subcommands()) failed = sub;
    std::cerr << failed->help();
    return kError;
  }

  auto dispatch = [&]() -> int {
    if (*match) return cmd_match(o);
    if (*test) return cmd_test(o);
    if (*ast) return cmd_ast(o);
    if (*validate) return cmd_validate(o);
    if (*fuzz) return cmd_fuzz(o);
    if (*diff) return cmd_diff(o);
    if (*rewrite) return cmd_check_rewrite(o);
    if (*corpus) return cmd_corpus(o);
    return kError;
  };
  return cpsre::run_with_stack(cpsre::stack_bytes_for_depth(o.max_depth), dispatch);
}
