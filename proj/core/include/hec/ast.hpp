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
#include <string_view>
#include <vector>

#include "hec/affine.hpp"
#include "hec/error.hpp"

namespace hec {

/// `iN`, `index`, or `memref<AxBx...xT>`.
struct Type {
  enum class Kind { Int, Index, MemRef };
  static constexpr int64_t kDynamic = -1;

  Kind kind = Kind::Int;
  /// Bit width of an Int, or of a memref's integer element. Zero for index
  /// and for memrefs of index.
  unsigned width = 0;
  /// MemRef extents; kDynamic for `?`.
  std::vector<int64_t> shape;

  static Type integer(unsigned width) { return {Kind::Int, width, {}}; }
  static Type index() { return {Kind::Index, 0, {}}; }
  static Type memref(std::vector<int64_t> shape, Type element);

  bool is_int() const { return kind == Kind::Int; }
  bool is_index() const { return kind == Kind::Index; }
  bool is_memref() const { return kind == Kind::MemRef; }
  /// Scalar type of a memref's elements.
  Type element() const;
  std::string str() const;
  friend bool operator==(const Type&, const Type&) = default;
};

/// Affine map applied to SSA operands: dims first, then symbols.
struct MapUse {
  AffineMap map;
  std::vector<std::string> dims;
  std::vector<std::string> symbols;
  /// `#name` when the source referenced a named map.
  std::string map_name;

  friend bool operator==(const MapUse& a, const MapUse& b) {
    return a.map == b.map && a.dims == b.dims && a.symbols == b.symbols;
  }
};

/// Integer set constraint `expr >= 0` or `expr == 0`.
struct Constraint {
  AffineExpr expr;
  bool equality = false;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct IntegerSetUse {
  unsigned num_dims = 0;
  unsigned num_symbols = 0;
  std::vector<Constraint> constraints;
  std::vector<std::string> dims;
  std::vector<std::string> symbols;
  std::string set_name;

  friend bool operator==(const IntegerSetUse& a, const IntegerSetUse& b) {
    return a.num_dims == b.num_dims && a.num_symbols == b.num_symbols &&
           a.constraints == b.constraints && a.dims == b.dims &&
           a.symbols == b.symbols;
  }
};

enum class OpKind {
  Constant,
  Binary,
  Load,
  Store,
  Apply,
  For,
  If,
  Return,
};

struct Operation {
  OpKind kind = OpKind::Constant;
  /// Full operation name, e.g. `arith.addi`.
  std::string name;
  std::string result;
  /// Binary: lhs, rhs. Store: value. Return: returned values.
  std::vector<std::string> operands;
  /// Result type; for Load/Store the element type.
  Type type;
  /// Constant value, already wrapped to the type's width.
  int64_t value = 0;

  /// Load/Store memref, its type and the index map; Apply map.
  std::string memref;
  Type memref_type;
  MapUse map;

  /// For loop.
  std::string iv;
  MapUse lower;
  MapUse upper;
  int64_t step = 1;
  std::vector<Operation> body;

  /// If condition and else region (the then region is `body`).
  IntegerSetUse condition;
  std::vector<Operation> else_body;
  bool has_else = false;

  SourceLoc loc;

  friend bool operator==(const Operation& a, const Operation& b);
};

struct Argument {
  std::string name;
  Type type;
  friend bool operator==(const Argument&, const Argument&) = default;
};

struct Function {
  std::string name;
  std::vector<Argument> args;
  std::vector<Type> results;
  std::vector<Operation> body;
  SourceLoc loc;

  friend bool operator==(const Function& a, const Function& b) {
    return a.name == b.name && a.args == b.args && a.results == b.results &&
           a.body == b.body;
  }
};

struct ProgramModule {
  std::vector<std::pair<std::string, AffineMap>> maps;
  std::vector<std::pair<std::string, IntegerSetUse>> sets;
  std::vector<Function> functions;

  const Function* find_function(const std::string& name) const;
  friend bool operator==(const ProgramModule& a, const ProgramModule& b) {
    return a.maps == b.maps && a.sets == b.sets && a.functions == b.functions;
  }
};

/// Wraps `value` to a signed two's-complement integer of `width` bits.
int64_t wrap_to_width(int64_t value, unsigned width);

/// Applies a binary arith op (`addi`, `shli`, ...) at `width` bits; index
/// values use width 0 and compute at 64 bits. Returns nothing when the op
/// traps: division by zero or a shift amount outside [0, width).
std::optional<int64_t> eval_arith(std::string_view op, int64_t a, int64_t b, unsigned width);

}  // namespace hec
