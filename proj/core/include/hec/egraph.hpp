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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hec/graph.hpp"
#include "hec/term.hpp"

namespace hec {

using EClassId = uint32_t;
using Symbol = uint32_t;

struct ENode {
  Symbol op = 0;
  bool atom = false;
  std::vector<EClassId> children;

  friend bool operator==(const ENode&, const ENode&) = default;
  friend auto operator<=>(const ENode&, const ENode&) = default;
};

struct ENodeHash {
  size_t operator()(const ENode& n) const;
};

/// Variable bindings of one match, keyed by variable name without the `?`.
using Subst = std::map<std::string, EClassId>;

struct Match {
  EClassId root;
  Subst subst;
};

class EGraph;

struct RewriteRule {
  std::string name;
  /// Pattern; atoms starting with `?` are variables.
  Term lhs;
  Term rhs;
  /// Optional side condition evaluated on the frozen snapshot.
  std::function<bool(const EGraph&, const Subst&)> guard;
  /// Optional computed right-hand side; when set, `rhs` is ignored.
  std::function<std::optional<EClassId>(EGraph&, const Subst&)> apply;
};

struct SaturationLimits {
  size_t max_iterations = 30;
  size_t max_enodes = 1000000;
  std::chrono::milliseconds wall_clock{std::chrono::seconds(60)};
};

enum class StopReason { Saturated, IterationLimit, NodeLimit, Timeout, Goal };

std::string to_string(StopReason r);

struct SaturationReport {
  StopReason stop = StopReason::Saturated;
  size_t iterations = 0;
  size_t unions = 0;
  /// Successful applications per rule name, in first-application order.
  std::vector<std::pair<std::string, size_t>> applied;
};

/// Folds an operator applied to constant children; returns the constant
/// atom of the result or nothing.
using ConstantFolder =
    std::function<std::optional<Term>(const std::string& op, const std::vector<Term>& args)>;

/// Fixed child count of a label, or nothing for variadic labels.
std::optional<size_t> label_arity(const std::string& label);

class EGraph {
 public:
  EGraph();

  Symbol intern(const std::string& label);
  const std::string& symbol_name(Symbol s) const { return symbols_[s]; }

  /// Adds one e-node whose children are already present.
  EClassId insert(const std::string& label, const std::vector<EClassId>& children,
                  bool atom = false);
  EClassId add(const ENode& node);
  EClassId add(const Term& term);
  /// Class of an existing term, without inserting.
  std::optional<EClassId> lookup(const Term& term) const;

  EClassId find(EClassId id) const;
  EClassId merge(EClassId a, EClassId b);
  void rebuild();
  bool dirty() const { return !pending_.empty(); }

  bool in_same_class(EClassId a, EClassId b) const { return find(a) == find(b); }

  std::vector<Match> ematch(const Term& pattern) const;
  SaturationReport saturate(const std::vector<RewriteRule>& rules,
                            const SaturationLimits& limits,
                            const std::function<bool()>& goal = {});

  /// Instantiates a pattern under a substitution.
  EClassId instantiate(const Term& pattern, const Subst& subst);

  size_t num_classes() const { return live_classes_; }
  size_t num_nodes() const { return hashcons_.size(); }
  /// Canonical ids of all live classes, ascending.
  std::vector<EClassId> classes() const;
  const std::vector<ENode>& nodes(EClassId id) const { return classes_[find(id)].nodes; }

  std::optional<Term> constant_of(EClassId id) const { return classes_[find(id)].constant; }
  void set_folder(ConstantFolder f) { folder_ = std::move(f); }
  /// Set when two different constants were merged into one class.
  bool inconsistent() const { return inconsistent_; }

  /// A smallest-tree representative of a class.
  Term extract(EClassId id) const;
  std::vector<Term> extract_all(EClassId id, size_t limit) const;

  std::string dot() const;

 private:
  struct EClass {
    std::vector<ENode> nodes;
    std::vector<std::pair<ENode, EClassId>> parents;
    std::optional<Term> constant;
  };

  ENode canonicalize(const ENode& n) const;
  void repair(EClassId id);
  void try_fold(const ENode& n, EClassId cls);
  void set_constant(EClassId cls, const Term& c);
  void match_class(const Term& pat, EClassId cls, Subst& subst,
                   const std::function<void(const Subst&)>& yield) const;
  void compute_costs() const;

  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Symbol> symbol_ids_;
  mutable std::vector<EClassId> parent_;
  std::vector<EClass> classes_;
  std::unordered_map<ENode, EClassId, ENodeHash> hashcons_;
  std::vector<EClassId> pending_;
  /// Classes that contain a node with the given operator; may hold stale ids.
  std::vector<std::vector<EClassId>> by_op_;
  size_t live_classes_ = 0;
  ConstantFolder folder_;
  bool inconsistent_ = false;
  mutable std::vector<size_t> cost_;
  mutable std::vector<int64_t> best_;
  mutable bool costs_valid_ = false;
};

/// Inserts every vertex of the graph bottom-up; returns the root class.
EClassId construct_from_graph(EGraph& egraph, const DataflowGraph& graph);

}  // namespace hec
