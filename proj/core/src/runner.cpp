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

#include "hec/runner.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hec/frontend.hpp"
#include "hec/graph.hpp"

namespace hec {

using Clock = std::chrono::steady_clock;

std::string to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::Equivalent: return "equivalent";
    case VerdictKind::NotEquivalent: return "not-equivalent";
    case VerdictKind::Unknown: return "unknown";
  }
  return "?";
}

EClassId insert_combine(EGraph& egraph, EClassId a, EClassId b) {
  return egraph.insert("combine", {a, b});
}

Term combine_block(const Term& block, const std::vector<std::pair<Term, Term>>& pairs) {
  std::map<Term, Term> redirect;
  auto redirected = [&](const Term& t) {
    if (redirect.empty()) return t;
    return t.rewrite([&](const Term& x) -> std::optional<Term> {
      auto it = redirect.find(x);
      if (it != redirect.end()) return it->second;
      return std::nullopt;
    });
  };
  std::vector<Term> items;
  const auto& old = block.args();
  for (size_t i = 0; i < old.size(); ++i) {
    if (i + 1 < old.size() &&
        std::find(pairs.begin(), pairs.end(), std::make_pair(old[i], old[i + 1])) != pairs.end()) {
      Term c = Term::make("combine", {redirected(old[i]), redirected(old[i + 1])});
      redirect[old[i]] = c;
      redirect[old[i + 1]] = c;
      items.push_back(c);
      ++i;
      continue;
    }
    items.push_back(redirected(old[i]));
  }
  return Term::make("block", items);
}

namespace {

SaturationLimits limits_until(const RunnerConfig& config, Clock::time_point deadline) {
  SaturationLimits l;
  l.max_iterations = config.saturation_iterations;
  l.max_enodes = config.max_enodes;
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  l.wall_clock = std::max(left, std::chrono::milliseconds(1));
  return l;
}

RewriteRule ground_rule(const std::string& name, const Term& lhs, const Term& rhs) {
  RewriteRule r;
  r.name = name;
  r.lhs = lhs;
  r.rhs = rhs;
  return r;
}

}  // namespace

FixpointResult iteration_fixpoint(EGraph& egraph, EClassId root_a, EClassId root_b,
                                  const std::vector<RewriteRule>& static_rules,
                                  const RunnerConfig& config) {
  const auto deadline = Clock::now() + config.timeout;
  FixpointResult result;
  std::vector<RewriteRule> hybrid = static_rules;
  std::set<std::pair<TransformKind, std::vector<Term>>> attempted;
  auto unified = [&] { return egraph.in_same_class(root_a, root_b); };
  result.unified = unified();
  for (size_t round = 1; !result.unified && round <= config.max_rounds; ++round) {
    if (Clock::now() >= deadline || egraph.num_nodes() >= config.max_enodes) {
      result.limit_hit = true;
      break;
    }
    Term rep_a = egraph.extract(root_a);
    Term rep_b = egraph.extract(root_b);
    size_t fresh = 0;
    std::map<Term, std::vector<std::pair<Term, Term>>> pairs_by_block;
    for (const Candidate& c : find_candidates(rep_a, rep_b)) {
      if (!attempted.insert({c.kind, c.loops}).second) continue;
      RuleAttempt attempt = generate_rule(c, config.domain, &egraph);
      RuleLogEntry entry;
      entry.round = round;
      entry.kind = c.kind;
      entry.candidate = c.describe();
      entry.status = attempt.condition.status;
      entry.trace = attempt.condition.trace;
      for (const auto& [sym, v] : attempt.condition.witness) entry.witness[sym.str()] = v;
      if (attempt.rule) {
        const DynamicRule& rule = *attempt.rule;
        entry.name = rule.name;
        egraph.merge(egraph.add(rule.lhs), egraph.add(rule.rhs));
        std::string tag = rule.name + "#" + std::to_string(round) + "." + std::to_string(fresh);
        hybrid.push_back(ground_rule(tag, rule.lhs, rule.rhs));
        hybrid.push_back(ground_rule(tag + "-rev", rule.rhs, rule.lhs));
        if (c.is_pair()) pairs_by_block[c.block].push_back({c.loops[0], c.loops[1]});
        ++fresh;
      } else {
        entry.name = to_string(c.kind);
      }
      result.log.push_back(std::move(entry));
      if (Clock::now() >= deadline) break;
    }
    for (const auto& [block, pairs] : pairs_by_block)
      egraph.merge(egraph.add(block), egraph.add(combine_block(block, pairs)));
    egraph.rebuild();
    if (fresh == 0) break;
    ++result.rounds;
    result.new_rule_counts.push_back(fresh);
    if (!unified()) {
      auto rep = egraph.saturate(hybrid, limits_until(config, deadline), unified);
      if (rep.stop == StopReason::NodeLimit || rep.stop == StopReason::Timeout) result.limit_hit = true;
    }
    result.stats.push_back({fresh, egraph.num_classes(), egraph.num_nodes()});
    result.unified = unified();
    if (result.limit_hit) break;
  }
  if (!result.unified && result.rounds == config.max_rounds) result.limit_hit = true;
  return result;
}

namespace {

const std::vector<RewriteRule>& default_rewrites() {
  static const std::vector<RewriteRule> rules = to_rewrites(default_ruleset());
  return rules;
}

std::optional<unsigned> argument_position(const std::string& name) {
  if (name.rfind("%arg", 0) != 0 || name.size() == 4) return std::nullopt;
  unsigned pos = 0;
  for (char ch : name.substr(4)) {
    if (ch < '0' || ch > '9') return std::nullopt;
    pos = pos * 10 + static_cast<unsigned>(ch - '0');
  }
  return pos;
}

Witness make_witness(const Function& a, const Function& b, const Counterexample& cx,
                     const InterpOptions& interp) {
  Witness w;
  w.symbols = cx.symbols;
  w.initial = cx.initial;
  w.divergence = cx.divergence;
  w.text = cx.describe(a);
  if (cx.divergence.kind == Divergence::Kind::Memory) {
    auto final_of = [&](const Function& fn) -> std::vector<int64_t> {
      try {
        auto r = execute(fn, cx.symbols, cx.initial, interp);
        auto it = r.memory.buffers.find(cx.divergence.memref);
        if (it != r.memory.buffers.end()) return it->second.data;
      } catch (const Error&) {
      }
      return {};
    };
    w.final_a = final_of(a);
    w.final_b = final_of(b);
  }
  return w;
}

}  // namespace

FunctionReport verify_functions(const Function& a, const Function& b, const RunnerConfig& config) {
  const auto start = Clock::now();
  const auto deadline = start + config.timeout;
  FunctionReport report;
  report.name = a.name;

  DataflowGraph ga = build_graph(a);
  DataflowGraph gb = build_graph(b);
  if (config.capture_dumps) {
    report.graph_a = ga.report() + "\n" + ga.dot();
    report.graph_b = gb.report() + "\n" + gb.dot();
  }
  EGraph egraph;
  egraph.set_folder(fold_constant);
  EClassId ra = egraph.add(graph_to_term(ga));
  EClassId rb = egraph.add(graph_to_term(gb));
  egraph.rebuild();
  auto unified = [&] { return egraph.in_same_class(ra, rb); };

  std::vector<RewriteRule> rules;
  if (config.default_rules) rules = default_rewrites();
  if (!config.extra_rules.empty()) {
    auto extra = to_rewrites(config.extra_rules);
    rules.insert(rules.end(), extra.begin(), extra.end());
  }

  bool limit_hit = false;
  if (!unified()) {
    auto rep = egraph.saturate(rules, limits_until(config, deadline), unified);
    report.static_iterations = rep.iterations;
    limit_hit = rep.stop == StopReason::NodeLimit || rep.stop == StopReason::Timeout;
  }
  std::vector<Symbols> hints;
  if (!unified() && !limit_hit) {
    RunnerConfig rest = config;
    rest.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    FixpointResult fix = iteration_fixpoint(egraph, ra, rb, rules, rest);
    report.iterations = fix.rounds;
    for (size_t n : fix.new_rule_counts) report.dynamic_rules += n;
    report.rounds = fix.stats;
    limit_hit = fix.limit_hit;
    for (const auto& entry : fix.log) {
      if (entry.status != ConditionStatus::Refuted || entry.witness.empty()) continue;
      Symbols s;
      for (const auto& [name, v] : entry.witness)
        if (auto pos = argument_position(name)) s[*pos] = v;
      if (!s.empty()) hints.push_back(s);
    }
    report.rule_log = fix.log;
  }
  report.e_classes = egraph.num_classes();
  report.e_nodes = egraph.num_nodes();
  if (config.capture_dumps) report.egraph_dot = egraph.dot();

  if (unified()) {
    report.verdict.kind = VerdictKind::Equivalent;
  } else {
    DiffOptions opts;
    opts.samples = config.samples;
    opts.seed = config.seed;
    opts.symbol_lo = config.symbol_lo;
    opts.symbol_hi = config.symbol_hi;
    opts.priority_symbols = hints;
    DiffResult diff = differential_test(a, b, opts);
    if (diff.counterexample) {
      report.verdict.kind = VerdictKind::NotEquivalent;
      report.verdict.witness = make_witness(a, b, *diff.counterexample, opts.interp);
    } else {
      report.verdict.kind = VerdictKind::Unknown;
      report.verdict.reason = limit_hit ? "limits" : "no-new-rules";
    }
  }
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return report;
}

VerificationReport verify_modules(const ProgramModule& a, const ProgramModule& b,
                                  const RunnerConfig& config) {
  std::vector<std::pair<const Function*, const Function*>> pairs;
  if (a.functions.size() == 1 && b.functions.size() == 1) {
    pairs.push_back({&a.functions[0], &b.functions[0]});
  } else {
    if (a.functions.size() != b.functions.size())
      throw FunctionMismatch("modules define " + std::to_string(a.functions.size()) + " and " +
                             std::to_string(b.functions.size()) + " functions");
    for (const auto& f : a.functions) {
      const Function* g = b.find_function(f.name);
      if (!g) throw FunctionMismatch("no function @" + f.name + " in the second module");
      pairs.push_back({&f, g});
    }
  }
  VerificationReport report;
  report.verdict.kind = VerdictKind::Equivalent;
  for (const auto& [fa, fb] : pairs) {
    FunctionReport fr = verify_functions(*fa, *fb, config);
    report.iterations += fr.iterations;
    report.dynamic_rules += fr.dynamic_rules;
    report.e_classes += fr.e_classes;
    report.e_nodes += fr.e_nodes;
    report.wall_time_ms += fr.wall_time_ms;
    VerdictKind& k = report.verdict.kind;
    if (fr.verdict.kind == VerdictKind::NotEquivalent && k != VerdictKind::NotEquivalent) {
      report.verdict = fr.verdict;
    } else if (fr.verdict.kind == VerdictKind::Unknown && k == VerdictKind::Equivalent) {
      report.verdict = fr.verdict;
    }
    report.functions.push_back(std::move(fr));
  }
  return report;
}

VerificationReport verify(const std::string& path_a, const std::string& path_b,
                          const RunnerConfig& config) {
  ProgramModule a = parse_module_file(path_a);
  ProgramModule b = parse_module_file(path_b);
  return verify_modules(a, b, config);
}

namespace {

using nlohmann::json;

json witness_json(const std::optional<Witness>& w) {
  if (!w) return nullptr;
  json symbols = json::object();
  for (const auto& [pos, v] : w->symbols) symbols["%arg" + std::to_string(pos)] = v;
  json out{{"text", w->text},
           {"symbols", symbols},
           {"kind", w->divergence.kind == Divergence::Kind::Memory ? "memory" : "return"},
           {"memref", "%arg" + std::to_string(w->divergence.memref)},
           {"index", w->divergence.index},
           {"value_a", w->divergence.value_a},
           {"value_b", w->divergence.value_b}};
  if (!w->final_a.empty()) out["final_a"] = w->final_a;
  if (!w->final_b.empty()) out["final_b"] = w->final_b;
  return out;
}

json log_json(const std::vector<RuleLogEntry>& log) {
  json out = json::array();
  for (const auto& e : log) {
    json clauses = json::array();
    for (const auto& c : e.trace)
      clauses.push_back({{"name", c.name},
                         {"text", c.text},
                         {"status", to_string(c.status)},
                         {"method", c.method}});
    out.push_back({{"round", e.round},
                   {"kind", to_string(e.kind)},
                   {"rule", e.name},
                   {"candidate", e.candidate},
                   {"status", to_string(e.status)},
                   {"clauses", clauses},
                   {"witness", e.witness}});
  }
  return out;
}

json verdict_fields(json out, const Verdict& v) {
  out["verdict"] = to_string(v.kind);
  if (v.kind == VerdictKind::Unknown) out["reason"] = v.reason;
  out["witness"] = witness_json(v.witness);
  return out;
}

}  // namespace

std::string VerificationReport::to_json(int indent) const {
  json out = verdict_fields(json::object(), verdict);
  out["iterations"] = iterations;
  out["dynamic_rules"] = dynamic_rules;
  out["e_classes"] = e_classes;
  out["e_nodes"] = e_nodes;
  out["wall_time_ms"] = wall_time_ms;
  json log = json::array();
  json fns = json::array();
  for (const auto& f : functions) {
    for (auto& e : log_json(f.rule_log)) log.push_back(std::move(e));
    json rounds = json::array();
    for (const auto& r : f.rounds)
      rounds.push_back({{"new_rules", r.new_rules}, {"e_classes", r.e_classes}, {"e_nodes", r.e_nodes}});
    json fj = verdict_fields({{"name", f.name}}, f.verdict);
    fj["iterations"] = f.iterations;
    fj["dynamic_rules"] = f.dynamic_rules;
    fj["static_iterations"] = f.static_iterations;
    fj["rounds"] = rounds;
    fj["e_classes"] = f.e_classes;
    fj["e_nodes"] = f.e_nodes;
    fj["wall_time_ms"] = f.wall_time_ms;
    fns.push_back(std::move(fj));
  }
  out["rule_log"] = log;
  out["functions"] = fns;
  return out.dump(indent);
}

std::string VerificationReport::summary() const {
  std::ostringstream out;
  out << to_string(verdict.kind);
  if (verdict.kind == VerdictKind::Unknown) out << " (" << verdict.reason << ")";
  out.setf(std::ios::fixed);
  out.precision(1);
  out << "  time " << wall_time_ms << " ms  dynamic rules " << dynamic_rules << "  e-classes "
      << e_classes;
  return out.str();
}

}  // namespace hec
