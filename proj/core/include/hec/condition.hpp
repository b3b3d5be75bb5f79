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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hec/term.hpp"

namespace hec {

enum class ConditionStatus { Proven, Refuted, Unknown };

std::string to_string(ConditionStatus s);

/// `lhs == rhs`, required only where every guard term is positive.
struct Clause {
  std::string name;
  Term lhs;
  Term rhs;
  std::vector<Term> guards;
};

struct ClauseTrace {
  std::string name;
  std::string text;
  ConditionStatus status = ConditionStatus::Unknown;
  /// How the status was reached: `normalized`, `exhaustive`, `sampled`,
  /// or a structural reason.
  std::string method;
  /// Both sides at the witness, when refuted.
  std::optional<std::pair<int64_t, int64_t>> values;
};

struct ConditionResult {
  ConditionStatus status = ConditionStatus::Proven;
  /// Symbol values that falsify the condition, keyed by the symbol term.
  std::map<Term, int64_t> witness;
  std::vector<ClauseTrace> trace;

  /// Adds a non-arithmetic finding such as a structural mismatch.
  void fail(const std::string& name, const std::string& why, ConditionStatus status);
};

/// Symbols range over [lo, hi).
struct SymbolDomain {
  int64_t lo = 0;
  int64_t hi = int64_t{1} << 16;
  uint64_t seed = 0;
  /// Enumerate every point when the domain has at most this many.
  uint64_t exhaustive_limit = 1000000;
  size_t samples = 10000;
};

/// Checks all clauses jointly: proven by normalization when possible,
/// otherwise by exhaustive or sampled evaluation. The first failing point
/// in lexicographic order becomes the witness.
ConditionResult check_clauses(const std::vector<Clause>& clauses, const SymbolDomain& domain);

ConditionResult check_condition_symbolic(const Term& lhs, const Term& rhs,
                                         const SymbolDomain& domain);

/// max(0, ceildiv(n - m, k)), normalized.
Term trip_count(const Term& m, const Term& n, int64_t k);

}  // namespace hec
