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

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hec/ast.hpp"
#include "hec/condition.hpp"
#include "hec/dynamic_rules.hpp"
#include "hec/egraph.hpp"
#include "hec/error.hpp"
#include "hec/interpreter.hpp"
#include "hec/static_rules.hpp"

namespace hec {

/// The two modules do not define the same functions.
class FunctionMismatch : public Error {
 public:
  explicit FunctionMismatch(const std::string& what) : Error(what) {}
};

struct RunnerConfig {
  size_t max_rounds = 10;
  size_t max_enodes = 1000000;
  std::chrono::milliseconds timeout{std::chrono::seconds(600)};
  /// Iteration cap of each saturation run.
  size_t saturation_iterations = 30;
  /// Differential samples used when the roots do not unify.
  size_t samples = 200;
  uint64_t seed = 0;
  int64_t symbol_lo = 0;
  int64_t symbol_hi = 64;
  /// Domain of the symbolic condition checker.
  SymbolDomain domain;
  bool default_rules = true;
  std::vector<StaticRule> extra_rules;
  /// Keep graph and e-graph renderings in the report.
  bool capture_dumps = false;
};

enum class VerdictKind { Equivalent, NotEquivalent, Unknown };
std::string to_string(VerdictKind v);

struct Witness {
  Symbols symbols;
  MemoryState initial;
  Divergence divergence;
  /// Final contents of the diverging memref in each program.
  std::vector<int64_t> final_a;
  std::vector<int64_t> final_b;
  std::string text;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  /// For Unknown: "limits" or "no-new-rules".
  std::string reason;
  std::optional<Witness> witness;
};

struct RuleLogEntry {
  size_t round = 0;
  TransformKind kind = TransformKind::Unrolling;
  std::string name;
  std::string candidate;
  ConditionStatus status = ConditionStatus::Unknown;
  std::vector<ClauseTrace> trace;
  /// Symbol values that refute the condition, by term text.
  std::map<std::string, int64_t> witness;
};

struct RoundStats {
  size_t new_rules = 0;
  size_t e_classes = 0;
  size_t e_nodes = 0;
};

struct FunctionReport {
  std::string name;
  Verdict verdict;
  /// Dynamic rounds that produced at least one rule.
  size_t iterations = 0;
  size_t dynamic_rules = 0;
  std::vector<RoundStats> rounds;
  size_t static_iterations = 0;
  size_t e_classes = 0;
  size_t e_nodes = 0;
  double wall_time_ms = 0;
  std::vector<RuleLogEntry> rule_log;
  std::string graph_a;
  std::string graph_b;
  std::string egraph_dot;
};

struct VerificationReport {
  Verdict verdict;
  size_t iterations = 0;
  size_t dynamic_rules = 0;
  size_t e_classes = 0;
  size_t e_nodes = 0;
  double wall_time_ms = 0;
  std::vector<FunctionReport> functions;

  /// JSON object with the fields verdict, iterations, dynamic_rules,
  /// e_classes, e_nodes, wall_time_ms, witness, rule_log and functions.
  std::string to_json(int indent = 2) const;
  /// One line: verdict, runtime, dynamic rules, e-classes.
  std::string summary() const;
};

VerificationReport verify(const std::string& path_a, const std::string& path_b,
                          const RunnerConfig& config = {});
VerificationReport verify_modules(const ProgramModule& a, const ProgramModule& b,
                                  const RunnerConfig& config = {});
FunctionReport verify_functions(const Function& a, const Function& b,
                                const RunnerConfig& config = {});

/// Adds a combine node over two loop classes.
EClassId insert_combine(EGraph& egraph, EClassId a, EClassId b);

/// Copies of `block` in which each listed adjacent pair, scanned left to
/// right without overlap, is replaced by its combine node. Later token uses
/// of either loop are redirected to the combine.
Term combine_block(const Term& block, const std::vector<std::pair<Term, Term>>& pairs);

struct FixpointResult {
  size_t rounds = 0;
  std::vector<size_t> new_rule_counts;
  bool unified = false;
  bool limit_hit = false;
  std::vector<RuleLogEntry> log;
  std::vector<RoundStats> stats;
};

/// Dynamic rounds over two roots whose static saturation has finished.
FixpointResult iteration_fixpoint(EGraph& egraph, EClassId root_a, EClassId root_b,
                                  const std::vector<RewriteRule>& static_rules,
                                  const RunnerConfig& config);

}  // namespace hec
