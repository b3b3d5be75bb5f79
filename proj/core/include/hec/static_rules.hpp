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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hec/egraph.hpp"
#include "hec/term.hpp"

namespace hec {

/// A datapath rewrite at one integer type. Labels inside carry the type
/// suffix, so a rule only matches operands of that type.
struct StaticRule {
  std::string name;
  Term lhs;
  Term rhs;
  /// Type suffix: `i1` ... `i64` or `index`.
  std::string type;
  bool bidirectional = true;
  /// Variables that must bind to constants in [0, width).
  std::vector<std::string> shift_vars;
};

/// Bit width of a type suffix; `index` computes at 64 bits.
unsigned type_width(std::string_view type);
/// Constant atom for `value` at `type`: `true`/`false` for i1, signed
/// wrapped decimal otherwise.
Term constant_atom(int64_t value, std::string_view type);
/// Integer value of a constant atom; `true` is -1 (all ones).
std::optional<int64_t> constant_value(const Term& atom);

std::vector<std::string> default_types();
std::vector<StaticRule> default_ruleset(const std::vector<std::string>& types = default_types());

/// Parses `LHS <=> RHS : TYPE` (or `=>` for one direction) and runs the
/// soundness gate.
StaticRule parse_rule(std::string_view text, size_t line = 1);
std::vector<StaticRule> parse_rules_file(const std::filesystem::path& path);

/// Counterexample description when lhs and rhs disagree, nothing when the
/// rule holds. Exhaustive for small domains, sampled otherwise.
std::optional<std::string> check_rule_sound(const StaticRule& rule);

std::vector<RewriteRule> to_rewrites(const std::vector<StaticRule>& rules);

/// Constant folding for typed arith labels and affine labels.
std::optional<Term> fold_constant(const std::string& op, const std::vector<Term>& args);

}  // namespace hec
