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

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hec/error.hpp"

namespace hec {

/// Immutable parenthesized operator term, e.g.
/// `(forcontrol (forvalue 0 101 1 %i0) (block ...))`.
///
/// An atom is a bare symbol (`101`, `true`, `%arg0`). An application has an
/// operator and zero or more arguments; `(block)` is an application with no
/// arguments and is distinct from the atom `block`.
class Term {
 public:
  /// The atom `0`.
  Term();

  static Term atom(std::string symbol);
  static Term integer(int64_t value);
  static Term make(std::string op, std::vector<Term> args);

  const std::string& op() const { return node_->op; }
  const std::vector<Term>& args() const { return node_->args; }
  const Term& arg(size_t i) const { return node_->args.at(i); }
  size_t arity() const { return node_->args.size(); }
  bool is_atom() const { return node_->atom; }
  size_t hash() const { return node_->hash; }

  /// Integer value of a numeric atom.
  std::optional<int64_t> as_integer() const;

  /// Number of nodes in the tree (shared subterms counted per occurrence),
  /// saturating at SIZE_MAX / 2.
  size_t tree_size() const;
  bool contains(const Term& sub) const;
  /// Replace every occurrence of `from` (structurally) with `to`.
  Term replace(const Term& from, const Term& to) const;
  /// Rebuilds the term visiting each shared subterm once. `pre` may return a
  /// replacement, which is not descended into; otherwise the children are
  /// rebuilt and `post`, when set, maps the rebuilt node.
  Term rewrite(const std::function<std::optional<Term>(const Term&)>& pre,
               const std::function<Term(const Term&)>& post = {}) const;
  /// Calls `visit` once per distinct shared subterm, parents first; a false
  /// return skips the children.
  void walk(const std::function<bool(const Term&)>& visit) const;

  std::string str() const;
  /// Multi-line rendering with one application per line beyond `width`.
  std::string pretty(size_t width = 80) const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node {
    std::string op;
    std::vector<Term> args;
    bool atom = false;
    size_t hash = 0;
    size_t size = 1;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static std::shared_ptr<const Node> intern(std::shared_ptr<Node> n);
  void pretty_into(std::string& out, size_t indent, size_t width) const;

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  size_t operator()(const Term& t) const { return t.hash(); }
};

/// Parses one term; throws MalformedTerm on bad input or trailing text.
Term parse_term(std::string_view text);

}  // namespace hec
