// Copyright 2026 The HEC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// One PASS/FAIL line per acceptance criterion; exits non-zero on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "egraph_props.hpp"
#include "fixtures.hpp"
#include "hec/corpus.hpp"
#include "hec/dynamic_rules.hpp"
#include "hec/interpreter.hpp"
#include "hec/runner.hpp"
#include "hec/static_rules.hpp"

using namespace hec;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

FunctionReport run(const Function& a, const Function& b) { return verify_functions(a, b); }

FunctionReport run(const std::string& a, const std::string& b) {
  return run(fixtures::function(a), fixtures::function(b));
}

size_t proven_rules(const FunctionReport& r, TransformKind kind) {
  size_t n = 0;
  for (const auto& e : r.rule_log) n += e.kind == kind && e.status == ConditionStatus::Proven;
  return n;
}

struct Pair {
  std::string name;
  Function a;
  Function b;
  VerdictKind expected;
};

/// Hand-written pairs plus the generated kernels.
std::vector<Pair> full_corpus() {
  std::vector<Pair> out;
  const std::tuple<const char*, const char*, VerdictKind> hand[] = {
      {"and_xor_baseline", "and_xor_hoisted", VerdictKind::Equivalent},
      {"and_xor_baseline", "and_xor_demorgan", VerdictKind::Equivalent},
      {"and_xor_baseline", "and_xor_tiled", VerdictKind::Equivalent},
      {"and_xor_baseline", "and_xor_unrolled", VerdictKind::Equivalent},
      {"copy_loop", "copy_loop_nested_unroll", VerdictKind::Equivalent},
      {"counter_offset_range", "counter_offset_range_unrolled", VerdictKind::NotEquivalent},
      {"shift_copy_increment", "shift_copy_increment_fused", VerdictKind::NotEquivalent},
  };
  for (const auto& [a, b, v] : hand)
    out.push_back({std::string(a) + "/" + b, fixtures::function(a), fixtures::function(b), v});
  for (const auto& p : generated_corpus())
    out.push_back({p.name, parse_module_text(p.source_a).functions.at(0),
                   parse_module_text(p.source_b).functions.at(0), p.expected});
  return out;
}

Outcome motivating_examples() {
  Outcome o;
  struct Case {
    const char* b;
    std::function<bool(const FunctionReport&)> shape;
    const char* what;
  };
  const Case cases[] = {
      {"and_xor_hoisted", [](const FunctionReport& r) { return r.dynamic_rules == 0; }, "hoisting needs no dynamic rules"},
      {"and_xor_demorgan", [](const FunctionReport& r) { return r.dynamic_rules == 0; }, "De Morgan by static rules"},
      {"and_xor_tiled", [](const FunctionReport& r) { return proven_rules(r, TransformKind::Tiling) >= 1; },
       "tiling rule"},
      {"and_xor_unrolled", [](const FunctionReport& r) { return proven_rules(r, TransformKind::Unrolling) >= 1; },
       "unrolling rule"},
  };
  double worst = 0;
  for (const auto& c : cases) {
    auto t = Clock::now();
    auto r = run("and_xor_baseline", c.b);
    double s = seconds_since(t);
    worst = std::max(worst, s);
    o.require(r.verdict.kind == VerdictKind::Equivalent, std::string(c.b) + " not equivalent");
    o.require(c.shape(r), std::string(c.b) + ": " + c.what + " missing");
    o.require(s < 10, std::string(c.b) + " took " + secs(s));
  }
  if (o.pass) o.detail = "slowest " + secs(worst);
  return o;
}

Outcome nested_unroll() {
  Outcome o;
  auto r = run("copy_loop", "copy_loop_nested_unroll");
  o.require(r.verdict.kind == VerdictKind::Equivalent, "not equivalent");
  o.require(r.iterations == 2, "rounds = " + std::to_string(r.iterations));
  if (o.pass) o.detail = "rounds 2, rules " + std::to_string(r.dynamic_rules);
  return o;
}

Outcome boundary_bug() {
  Outcome o;
  auto r = run("counter_offset_range", "counter_offset_range_unrolled");
  o.require(r.verdict.kind == VerdictKind::NotEquivalent, "verdict " + to_string(r.verdict.kind));
  if (!o.pass) return o;
  o.require(r.verdict.witness.has_value() && r.verdict.witness->symbols.count(1), "no %arg1 witness");
  if (!o.pass) return o;
  int64_t v = r.verdict.witness->symbols.at(1);
  o.require(v < 10, "witness %arg1 = " + std::to_string(v));
  if (o.pass) o.detail = "%arg1 = " + std::to_string(v);
  return o;
}

Outcome fusion_bug() {
  Outcome o;
  auto r = run("shift_copy_increment", "shift_copy_increment_fused");
  o.require(r.verdict.kind == VerdictKind::NotEquivalent && r.verdict.witness.has_value(),
            "verdict " + to_string(r.verdict.kind));
  if (!o.pass) return o;
  const auto& a = r.verdict.witness->final_a;
  const auto& b = r.verdict.witness->final_b;
  o.require(a.size() == 11 && b.size() == 11, "final states have the wrong size");
  if (!o.pass) return o;
  int64_t v = a[0];
  o.require(b[0] == v, "first elements differ");
  for (size_t k = 1; k < 11; ++k) {
    o.require(a[k] == v + 1, "A[" + std::to_string(k) + "] != v+1");
    o.require(b[k] == v + static_cast<int64_t>(k), "B[" + std::to_string(k) + "] != v+k");
  }
  if (o.pass) o.detail = "v = " + std::to_string(v);
  return o;
}

Outcome trip_count_clause() {
  Outcome o;
  std::vector<LoopSignature> loops;
  Term root = fixtures::term("and_xor_unrolled");
  for (const auto& item : root.args())
    if (auto s = loop_signature(item)) loops.push_back(*s);
  o.require(loops.size() == 2, "expected two loops");
  if (!o.pass) return o;
  auto r = check_unrolling(loops[0], loops[1], SymbolDomain{});
  o.require(r.status == ConditionStatus::Proven, "condition not proven");
  bool seen = false;
  for (const auto& c : r.trace)
    if (c.name == "trip-count") {
      seen = true;
      o.require(c.text == "101 == (add 1 (mul 50 2))", "clause " + c.text);
    }
  o.require(seen, "no trip-count clause");
  if (o.pass) o.detail = "101 == 1 + 50*2";
  return o;
}

Outcome soundness_gate() {
  Outcome o;
  std::vector<std::string> types;
  for (int w = 1; w <= 8; ++w) types.push_back("i" + std::to_string(w));
  auto t = Clock::now();
  auto rules = default_ruleset(types);
  for (const auto& r : rules)
    if (auto cex = check_rule_sound(r)) o.require(false, *cex);
  double s = seconds_since(t);
  o.require(s < 60, "took " + secs(s));
  if (o.pass) o.detail = std::to_string(rules.size()) + " rules in " + secs(s);
  return o;
}

Outcome egraph_properties() {
  Outcome o;
  std::mt19937 rng(2026);
  for (int trial = 0; trial < 200 && o.pass; ++trial) {
    o.require(egraph_props::hashcons_dedup(rng), "hashcons duplicate in trial " + std::to_string(trial));
    std::string err = egraph_props::check_random_graph(rng);
    o.require(err.empty(), err + " in trial " + std::to_string(trial));
  }
  if (o.pass) o.detail = "200 graphs";
  return o;
}

Outcome oracle_agreement(const std::vector<Pair>& corpus, const std::vector<FunctionReport>& reports) {
  Outcome o;
  size_t equivalent = 0;
  o.require(corpus.size() >= 30, "only " + std::to_string(corpus.size()) + " pairs");
  for (size_t i = 0; i < corpus.size(); ++i) {
    o.require(reports[i].verdict.kind == corpus[i].expected,
              corpus[i].name + " verdict " + to_string(reports[i].verdict.kind));
    if (reports[i].verdict.kind != VerdictKind::Equivalent) continue;
    ++equivalent;
    DiffOptions d;
    d.samples = 200;
    auto res = differential_test(corpus[i].a, corpus[i].b, d);
    o.require(!res.counterexample, corpus[i].name + " diverges under sampling");
  }
  if (o.pass)
    o.detail = std::to_string(corpus.size()) + " pairs, " + std::to_string(equivalent) + " equivalent, 0 violations";
  return o;
}

Outcome gemm_trend() {
  Outcome o;
  Function base = parse_module_text(kernel_source(Kernel::Gemm, 16)).functions.at(0);
  size_t last = 0;
  std::string counts;
  for (int64_t f : {2, 4, 8, 16}) {
    Function b = parse_module_text(kernel_source(Kernel::Gemm, 16, {LoopTransform::Kind::Unroll, f}))
                     .functions.at(0);
    auto t = Clock::now();
    auto r = run(base, b);
    double s = seconds_since(t);
    o.require(r.verdict.kind == VerdictKind::Equivalent, "U" + std::to_string(f) + " not equivalent");
    o.require(r.e_classes > last, "e-classes did not grow at U" + std::to_string(f));
    if (f == 8) o.require(s < 120, "U8 took " + secs(s));
    last = r.e_classes;
    counts += (counts.empty() ? "" : ", ") + ("U" + std::to_string(f) + "=" + std::to_string(r.e_classes));
  }
  o.detail = o.pass ? counts : o.detail + " (" + counts + ")";
  return o;
}

Outcome reflexive_symmetric(const std::vector<Pair>& corpus, const std::vector<FunctionReport>& reports) {
  Outcome o;
  size_t checked = 0;
  for (const char* f : fixtures::kAllFiles) {
    Function fn = fixtures::function(f);
    o.require(run(fn, fn).verdict.kind == VerdictKind::Equivalent, std::string(f) + " not reflexive");
    ++checked;
  }
  for (size_t i = 0; i < corpus.size(); ++i) {
    for (const Function* fn : {&corpus[i].a, &corpus[i].b}) {
      o.require(run(*fn, *fn).verdict.kind == VerdictKind::Equivalent, corpus[i].name + " side not reflexive");
      ++checked;
    }
    auto swapped = run(corpus[i].b, corpus[i].a);
    o.require(swapped.verdict.kind == reports[i].verdict.kind, corpus[i].name + " changes under swap");
  }
  if (o.pass) o.detail = std::to_string(checked) + " files, " + std::to_string(corpus.size()) + " swaps";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int n, const char* title, const std::function<Outcome()>& f) {
    auto t = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::printf("%s %2d %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", n, title, o.detail.c_str(),
                secs(seconds_since(t)).c_str());
    std::fflush(stdout);
  };
  report(1, "motivating examples", motivating_examples);
  report(2, "nested unrolling in two rounds", nested_unroll);
  report(3, "loop boundary bug witness", boundary_bug);
  report(4, "illegal fusion memory witness", fusion_bug);
  report(5, "unrolling trip-count clause", trip_count_clause);
  report(6, "static rule soundness gate", soundness_gate);
  report(7, "e-graph property suite", egraph_properties);
  auto corpus = full_corpus();
  std::vector<FunctionReport> reports;
  for (const auto& p : corpus) reports.push_back(run(p.a, p.b));
  report(8, "oracle agreement", [&] { return oracle_agreement(corpus, reports); });
  report(9, "gemm e-class growth", gemm_trend);
  report(10, "reflexivity and symmetry", [&] { return reflexive_symmetric(corpus, reports); });
  return failures == 0 ? 0 : 1;
}
