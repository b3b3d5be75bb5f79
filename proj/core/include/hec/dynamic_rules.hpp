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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hec/condition.hpp"
#include "hec/egraph.hpp"
#include "hec/graph.hpp"
#include "hec/term.hpp"

namespace hec {

enum class TransformKind { Unrolling, Tiling, Fusion, Coalescing };

std::string to_string(TransformKind k);

class NonIntegralFactor : public Error {
 public:
  using Error::Error;
};

/// A `(forcontrol (forvalue m n k %iD) (block ...))` term taken apart.
struct LoopSignature {
  Term control;
  Term iv;
  Term m;
  Term n;
  int64_t k = 1;
  Term body;
  int depth = 0;
};

std::optional<LoopSignature> loop_signature(const Term& forcontrol);

/// Builds a loop whose body was written against `old_iv`.
Term make_loop(const Term& m, const Term& n, int64_t k, int depth, const Term& body,
               const Term& old_iv);

struct Candidate {
  TransformKind kind = TransformKind::Unrolling;
  /// 0 for the first program, 1 for the second.
  int side = 0;
  /// Block holding the loops and the index of the first one.
  Term block;
  size_t position = 0;
  /// Two adjacent loops for pairs, otherwise the single loop or nest.
  std::vector<Term> loops;

  bool is_pair() const { return loops.size() == 2; }
  std::string describe() const;
};

std::vector<Candidate> find_candidates(const Term& a, const Term& b);
std::vector<Candidate> find_candidates(const DataflowGraph& a, const DataflowGraph& b);

/// Concatenates `count` copies of `body` (written against `old_iv`) for the
/// loop `iv`, copy j seeing the induction value iv + j * stride. Loads and
/// stores that read the entry state see the last writer of earlier copies.
Term replicate_body(const Term& body, const Term& old_iv, const Term& iv, int64_t count,
                    int64_t stride);

bool body_is_replication(const Term& body1, const Term& iv1, const Term& body2,
                         const Term& iv2, int64_t factor, int64_t k2,
                         const EGraph* egraph = nullptr);

/// Main loop `main` followed by remainder `rem`, against the merged loop
/// m1..n2 step k2. Throws NonIntegralFactor when k2 does not divide k1.
ConditionResult check_unrolling(const LoopSignature& main, const LoopSignature& rem,
                                const SymbolDomain& domain, const EGraph* egraph = nullptr);
ConditionResult check_tiling(const LoopSignature& outer, const LoopSignature& inner,
                             const LoopSignature& flat, const SymbolDomain& domain);
ConditionResult check_fusion(const LoopSignature& loop1, const LoopSignature& loop2,
                             const LoopSignature& fused, const SymbolDomain& domain);
ConditionResult check_coalescing(const LoopSignature& outer, const LoopSignature& inner,
                                 const LoopSignature& flat, const SymbolDomain& domain);

/// A conflicting access pair that fusion would reorder.
struct DependenceWitness {
  std::string memref;
  std::string first;
  std::string second;
  /// iv1 - iv2 for the conflicting iterations, when known.
  std::optional<int64_t> distance;
  std::string str() const;
};

/// Whether fusing `body1` (loop `iv1`) with `body2` (loop `iv2`) could let an
/// access in body2 run before a conflicting access from a later iteration
/// of body1. Conservative: unanalyzable accesses count as violations.
std::optional<DependenceWitness> raw_violation(const Term& body1, const Term& iv1,
                                               const Term& body2, const Term& iv2);

struct DynamicRule {
  TransformKind kind = TransformKind::Unrolling;
  std::string name;
  /// Single-loop form.
  Term lhs;
  /// `(combine l1 l2)` for pairs, the original loop or nest otherwise.
  Term rhs;
  std::vector<Term> provenance;
  ConditionResult condition;
};

struct RuleAttempt {
  Candidate candidate;
  ConditionResult condition;
  std::optional<DynamicRule> rule;
};

RuleAttempt generate_rule(const Candidate& candidate, const SymbolDomain& domain,
                          const EGraph* egraph = nullptr);

}  // namespace hec
