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

#include "hec/ast.hpp"
#include "hec/term.hpp"

namespace hec {

class OutOfBounds : public Error {
 public:
  OutOfBounds(unsigned memref, std::vector<int64_t> index);
  unsigned memref() const { return memref_; }
  const std::vector<int64_t>& index() const { return index_; }

 private:
  unsigned memref_;
  std::vector<int64_t> index_;
};

class NonTermination : public Error {
 public:
  using Error::Error;
};

/// Division by zero or an out-of-range shift amount.
class Trap : public Error {
 public:
  using Error::Error;
};

class SignatureMismatch : public Error {
 public:
  using Error::Error;
};

struct Buffer {
  Type element;
  std::vector<int64_t> extents;
  /// Row-major, each value wrapped to the element width.
  std::vector<int64_t> data;

  friend bool operator==(const Buffer&, const Buffer&) = default;
};

/// Buffers keyed by function argument position.
struct MemoryState {
  std::map<unsigned, Buffer> buffers;
  friend bool operator==(const MemoryState&, const MemoryState&) = default;
};

/// Scalar arguments keyed by position.
using Symbols = std::map<unsigned, int64_t>;

struct ExecResult {
  MemoryState memory;
  std::vector<int64_t> returns;
  /// Loop iterations executed, summed over all loops.
  uint64_t iterations = 0;
};

struct InterpOptions {
  uint64_t max_steps = 100000000;
};

ExecResult execute(const Function& fn, const Symbols& symbols, const MemoryState& initial,
                   const InterpOptions& options = {});
MemoryState interpret(const ProgramModule& module, const Symbols& symbols,
                      const MemoryState& initial, const std::string& function = "");

/// Runs a function-root term of the rewriting alphabet directly.
ExecResult evaluate_term(const Term& root, const Symbols& symbols, const MemoryState& initial,
                         const InterpOptions& options = {});

struct Divergence {
  enum class Kind { Memory, Return };
  Kind kind = Kind::Memory;
  unsigned memref = 0;
  std::vector<int64_t> index;
  int64_t value_a = 0;
  int64_t value_b = 0;
};

struct Counterexample {
  Symbols symbols;
  MemoryState initial;
  Divergence divergence;
  uint64_t iterations_a = 0;
  uint64_t iterations_b = 0;

  std::string describe(const Function& fn) const;
};

struct DiffOptions {
  size_t samples = 100;
  uint64_t seed = 0;
  int64_t symbol_lo = 0;
  int64_t symbol_hi = 64;
  /// Extent used for `?` memref dimensions.
  int64_t dynamic_extent = 32;
  bool shrink = true;
  /// Bindings tried before random sampling, each with the first few memory fills.
  std::vector<Symbols> priority_symbols;
  InterpOptions interp;
};

struct DiffResult {
  std::optional<Counterexample> counterexample;
  size_t executed = 0;
  /// Samples where either program trapped or ran out of bounds.
  size_t trapped = 0;
};

/// Random program inputs for `fn` from sample number `index`.
std::pair<Symbols, MemoryState> sample_inputs(const Function& fn, const DiffOptions& options,
                                              uint64_t index);

/// First divergence between two runs: memory in argument and row-major
/// order, then returned values.
std::optional<Divergence> compare_runs(const ExecResult& a, const ExecResult& b);

DiffResult differential_test(const Function& a, const Function& b, const DiffOptions& options = {});

}  // namespace hec
