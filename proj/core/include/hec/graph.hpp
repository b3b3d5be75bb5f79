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

#include <string>
#include <vector>

#include "hec/ast.hpp"
#include "hec/term.hpp"

namespace hec {

using VertexId = size_t;
using EdgeId = size_t;

/// One operation of the dataflow graph.
///
/// Affine payloads (`exprs`) are written over dims that stand for input
/// edges: for Fanin, dim i is input i + 1 (input 0 is the memref); for
/// ForValue, Apply and IfCond, dim i is input i.
struct Vertex {
  std::string name;  // Affine_Load_1
  std::string kind;  // Affine_Load
  unsigned index = 0;
  Type dtype;
  unsigned dimension = 0;
  std::vector<EdgeId> inputs;
  std::vector<EdgeId> outputs;
  /// Inputs that only order memory accesses; they do not count as uses.
  std::vector<bool> token_input;

  /// Term label or atom text: `arith_andi_i1`, `%arg0`, `true`.
  std::string label;
  std::vector<AffineExpr> exprs;
  std::vector<bool> equality;
  int64_t step = 1;
  /// Source name of a loop's induction variable.
  std::string var;
  /// Number of enclosing regions.
  int depth = 0;
  SourceLoc loc;
};

struct Edge {
  std::string name;
  VertexId source = 0;
  std::vector<VertexId> targets;
  Type type;
};

class ScopeViolation : public Error {
 public:
  explicit ScopeViolation(const std::string& name)
      : Error("value " + name + " used outside its region") {}
};

struct DataflowGraph {
  std::string function;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  VertexId root = 0;

  const Vertex* find(const std::string& vertex_name) const;
  /// Vertex and edge attribute listing, one record per vertex and edge.
  std::string report() const;
  std::string dot() const;
};

/// Builds the graph of the named function, or of the first function when
/// `function` is empty. Throws Error when the function does not exist.
DataflowGraph build_graph(const ProgramModule& module,
                          const std::string& function = "");
DataflowGraph build_graph(const Function& function);

/// Inputs of a Block vertex: values no operation of the block consumes,
/// plus every store's pseudo output and every nested loop, in source order.
std::vector<EdgeId> isolated_outputs(const DataflowGraph& graph,
                                     VertexId block);

/// Throws CycleDetected.
Term graph_to_term(const DataflowGraph& graph);
/// Throws MalformedTerm.
DataflowGraph term_to_graph(const Term& term);

/// Affine term <-> affine expression over the given leaf terms.
Term affine_to_term(const AffineExpr& expr, const std::vector<Term>& dims);
AffineExpr term_to_affine(const Term& term, std::vector<Term>* leaves);

}  // namespace hec
