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

#include "hec/graph.hpp"

#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "hec/quasi_affine.hpp"

namespace hec {

namespace {

AffineExpr remap(const AffineExpr& e,
                 const std::function<AffineExpr(AffineKind, unsigned)>& f) {
  const auto& ops = e.operands();
  auto each = [&] {
    std::vector<AffineExpr> out;
    for (const auto& o : ops) out.push_back(remap(o, f));
    return out;
  };
  switch (e.kind()) {
    case AffineKind::Constant:
      return e;
    case AffineKind::Dim:
    case AffineKind::Symbol:
      return f(e.kind(), e.position());
    case AffineKind::Add:
      return AffineExpr::add(remap(ops[0], f), remap(ops[1], f));
    case AffineKind::Mul:
      return AffineExpr::mul(remap(ops[0], f), remap(ops[1], f));
    case AffineKind::FloorDiv:
      return AffineExpr::floor_div(remap(ops[0], f), e.value());
    case AffineKind::CeilDiv:
      return AffineExpr::ceil_div(remap(ops[0], f), e.value());
    case AffineKind::Mod:
      return AffineExpr::mod(remap(ops[0], f), e.value());
    case AffineKind::Min:
      return AffineExpr::min(each());
    case AffineKind::Max:
      return AffineExpr::max(each());
  }
  return e;
}

std::string kind_from_op_name(const std::string& name) {
  // arith.addi -> Arith_Addi
  std::string out;
  bool upper = true;
  for (char c : name) {
    if (c == '.') {
      out += '_';
      upper = true;
    } else {
      out += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
      upper = false;
    }
  }
  return out;
}

std::string type_suffix(const Type& t) { return t.str(); }

class GraphBuilder {
 public:
  explicit GraphBuilder(const Function& f) : fn_(f) {}

  DataflowGraph build() {
    g_.function = fn_.name;
    collect_writes(fn_.body);
    VertexId entry = add_vertex("Entry", Type::index(), fn_.loc);
    g_.vertices[entry].label = "entry";
    entry_edge_ = add_output(entry, Type::index());
    Scope top;
    top.entry = entry_edge_;
    for (size_t i = 0; i < fn_.args.size(); ++i) {
      const auto& a = fn_.args[i];
      VertexId v = add_vertex("Argument", a.type, fn_.loc);
      g_.vertices[v].label = "%arg" + std::to_string(i);
      g_.vertices[v].var = a.name;
      g_.vertices[v].dimension = a.type.shape.size();
      EdgeId e = add_output(v, a.type);
      top.values[a.name] = e;
      if (written_names_.count(a.name)) written_.insert(e);
    }
    lower_region(fn_.body, top);
    g_.root = make_block(top, fn_.loc);
    return std::move(g_);
  }

 private:
  struct Scope {
    Scope* parent = nullptr;
    std::map<std::string, EdgeId> values;
    EdgeId entry = 0;
    int depth = 0;
    std::map<EdgeId, EdgeId> last_writer;
    std::set<EdgeId> written;
    std::vector<EdgeId> candidates;
  };

  void collect_writes(const std::vector<Operation>& ops) {
    for (const auto& op : ops) {
      if (op.kind == OpKind::Store) written_names_.insert(op.memref);
      collect_writes(op.body);
      collect_writes(op.else_body);
    }
  }

  VertexId add_vertex(const std::string& kind, Type dtype, SourceLoc loc) {
    Vertex v;
    v.kind = kind;
    v.index = counters_[kind]++;
    v.name = kind + "_" + std::to_string(v.index);
    v.dtype = dtype;
    v.loc = loc;
    g_.vertices.push_back(std::move(v));
    return g_.vertices.size() - 1;
  }

  EdgeId add_output(VertexId v, Type t, std::string name = "") {
    Edge e;
    e.name = name.empty() ? "%" + std::to_string(next_edge_++) : std::move(name);
    e.source = v;
    e.type = t;
    g_.edges.push_back(std::move(e));
    EdgeId id = g_.edges.size() - 1;
    g_.vertices[v].outputs.push_back(id);
    return id;
  }

  void connect(VertexId v, EdgeId e, bool token = false) {
    g_.vertices[v].inputs.push_back(e);
    g_.vertices[v].token_input.push_back(token);
    g_.edges[e].targets.push_back(v);
    if (!token) consumed_.insert(e);
  }

  EdgeId lookup(const Scope& s, const std::string& name, SourceLoc loc) {
    for (const Scope* p = &s; p; p = p->parent) {
      auto it = p->values.find(name);
      if (it != p->values.end()) return it->second;
    }
    (void)loc;
    throw ScopeViolation(name);
  }

  // Maps every dim and symbol operand of `uses` onto a shared slot list.
  std::vector<AffineExpr> slot_exprs(const Scope& s,
                                     const std::vector<const MapUse*>& uses,
                                     const std::vector<int>& combine,
                                     std::vector<EdgeId>* slots, SourceLoc loc) {
    std::vector<AffineExpr> out;
    for (size_t u = 0; u < uses.size(); ++u) {
      const MapUse& use = *uses[u];
      auto slot_of = [&](const std::string& name) {
        EdgeId e = lookup(s, name, loc);
        for (size_t i = 0; i < slots->size(); ++i)
          if ((*slots)[i] == e) return AffineExpr::dim(i);
        slots->push_back(e);
        return AffineExpr::dim(slots->size() - 1);
      };
      std::vector<AffineExpr> results;
      for (const auto& r : use.map.results) {
        results.push_back(remap(r, [&](AffineKind k, unsigned pos) {
          return slot_of(k == AffineKind::Dim ? use.dims.at(pos) : use.symbols.at(pos));
        }));
      }
      if (combine[u] == 0) {
        for (auto& r : results) out.push_back(r);
      } else if (results.size() == 1) {
        out.push_back(results[0]);
      } else {
        out.push_back(combine[u] < 0 ? AffineExpr::max(results) : AffineExpr::min(results));
      }
    }
    return out;
  }

  EdgeId token_for(Scope& s, EdgeId memref) {
    if (!written_.count(memref)) return entry_edge_;
    auto it = s.last_writer.find(memref);
    return it == s.last_writer.end() ? s.entry : it->second;
  }

  EdgeId fanin(Scope& s, const Operation& op, EdgeId memref) {
    VertexId f = add_vertex("Fanin", Type::index(), op.loc);
    std::vector<EdgeId> slots;
    auto exprs = slot_exprs(s, {&op.map}, {0}, &slots, op.loc);
    g_.vertices[f].exprs = exprs;
    g_.vertices[f].dimension = op.memref_type.shape.size();
    connect(f, memref);
    for (EdgeId e : slots) connect(f, e);
    return add_output(f, Type::index());
  }

  VertexId make_block(Scope& s, SourceLoc loc) {
    VertexId b = add_vertex("Block", Type::index(), loc);
    g_.vertices[b].depth = s.depth;
    for (EdgeId e : s.candidates)
      if (always_.count(e) || !consumed_.count(e)) connect(b, e);
    add_output(b, Type::index());
    return b;
  }

  void lower_region(const std::vector<Operation>& ops, Scope& s) {
    for (const auto& op : ops) lower(op, s);
  }

  void lower(const Operation& op, Scope& s) {
    switch (op.kind) {
      case OpKind::Constant: {
        VertexId v = add_vertex("Arith_Constant", op.type, op.loc);
        g_.vertices[v].label = op.type == Type::integer(1)
                                   ? (op.value ? "true" : "false")
                                   : std::to_string(op.value);
        EdgeId e = add_output(v, op.type);
        s.values[op.result] = e;
        s.candidates.push_back(e);
        break;
      }
      case OpKind::Binary: {
        VertexId v = add_vertex(kind_from_op_name(op.name), op.type, op.loc);
        std::string base = op.name.substr(op.name.find('.') + 1);
        g_.vertices[v].label = "arith_" + base + "_" + type_suffix(op.type);
        for (const auto& a : op.operands) connect(v, lookup(s, a, op.loc));
        EdgeId e = add_output(v, op.type);
        s.values[op.result] = e;
        s.candidates.push_back(e);
        break;
      }
      case OpKind::Apply: {
        VertexId v = add_vertex("Affine_Apply", Type::index(), op.loc);
        std::vector<EdgeId> slots;
        g_.vertices[v].exprs = slot_exprs(s, {&op.map}, {0}, &slots, op.loc);
        for (EdgeId e : slots) connect(v, e);
        EdgeId e = add_output(v, Type::index());
        s.values[op.result] = e;
        s.candidates.push_back(e);
        break;
      }
      case OpKind::Load: {
        EdgeId mem = lookup(s, op.memref, op.loc);
        EdgeId f = fanin(s, op, mem);
        VertexId v = add_vertex("Affine_Load", op.type, op.loc);
        g_.vertices[v].label = "load_" + type_suffix(op.type);
        g_.vertices[v].dimension = op.memref_type.shape.size();
        connect(v, f);
        connect(v, token_for(s, mem), true);
        EdgeId e = add_output(v, op.type);
        s.values[op.result] = e;
        s.candidates.push_back(e);
        break;
      }
      case OpKind::Store: {
        EdgeId mem = lookup(s, op.memref, op.loc);
        EdgeId value = lookup(s, op.operands[0], op.loc);
        EdgeId f = fanin(s, op, mem);
        VertexId v = add_vertex("Affine_Store", op.type, op.loc);
        g_.vertices[v].label = "store_" + type_suffix(op.type);
        g_.vertices[v].dimension = op.memref_type.shape.size();
        connect(v, value);
        connect(v, f);
        connect(v, token_for(s, mem), true);
        EdgeId e = add_output(v, op.type, "pseudo_" + std::to_string(stores_++));
        always_.insert(e);
        s.last_writer[mem] = e;
        s.written.insert(mem);
        s.candidates.push_back(e);
        break;
      }
      case OpKind::For: {
        VertexId fv = add_vertex("ForValue", Type::index(), op.loc);
        std::vector<EdgeId> slots;
        g_.vertices[fv].exprs =
            slot_exprs(s, {&op.lower, &op.upper}, {-1, 1}, &slots, op.loc);
        g_.vertices[fv].step = op.step;
        g_.vertices[fv].var = op.iv;
        g_.vertices[fv].depth = s.depth;
        for (EdgeId e : slots) connect(fv, e);
        EdgeId fv_edge = add_output(fv, Type::index());
        Scope body;
        body.parent = &s;
        body.entry = fv_edge;
        body.depth = s.depth + 1;
        body.values[op.iv] = fv_edge;
        lower_region(op.body, body);
        VertexId blk = make_block(body, op.loc);
        VertexId fc = add_vertex("ForControl", Type::index(), op.loc);
        connect(fc, fv_edge);
        connect(fc, g_.vertices[blk].outputs[0]);
        EdgeId e = add_output(fc, Type::index());
        finish_effect(s, body.written, e);
        break;
      }
      case OpKind::If: {
        VertexId c = add_vertex("IfCond", Type::index(), op.loc);
        std::vector<EdgeId> slots;
        MapUse as_map;
        as_map.map.num_dims = op.condition.num_dims;
        as_map.map.num_symbols = op.condition.num_symbols;
        for (const auto& k : op.condition.constraints) {
          as_map.map.results.push_back(k.expr);
          g_.vertices[c].equality.push_back(k.equality);
        }
        as_map.dims = op.condition.dims;
        as_map.symbols = op.condition.symbols;
        g_.vertices[c].exprs = slot_exprs(s, {&as_map}, {0}, &slots, op.loc);
        g_.vertices[c].depth = s.depth;
        for (EdgeId e : slots) connect(c, e);
        EdgeId cond = add_output(c, Type::integer(1));
        std::set<EdgeId> written;
        std::vector<EdgeId> blocks;
        for (const auto* region : {&op.body, &op.else_body}) {
          Scope inner;
          inner.parent = &s;
          inner.entry = cond;
          inner.depth = s.depth + 1;
          lower_region(*region, inner);
          blocks.push_back(g_.vertices[make_block(inner, op.loc)].outputs[0]);
          written.insert(inner.written.begin(), inner.written.end());
        }
        VertexId ic = add_vertex("IfControl", Type::index(), op.loc);
        connect(ic, cond);
        for (EdgeId b : blocks) connect(ic, b);
        finish_effect(s, written, add_output(ic, Type::index()));
        break;
      }
      case OpKind::Return: {
        VertexId v = add_vertex("Return", Type::index(), op.loc);
        for (const auto& a : op.operands) connect(v, lookup(s, a, op.loc));
        EdgeId e = add_output(v, Type::index());
        if (!op.operands.empty()) {
          always_.insert(e);
          s.candidates.push_back(e);
        }
        break;
      }
    }
  }

  void finish_effect(Scope& s, const std::set<EdgeId>& written, EdgeId e) {
    for (EdgeId m : written) {
      s.last_writer[m] = e;
      s.written.insert(m);
    }
    always_.insert(e);
    s.candidates.push_back(e);
  }

  const Function& fn_;
  DataflowGraph g_;
  std::map<std::string, unsigned> counters_;
  std::set<std::string> written_names_;
  std::set<EdgeId> written_;
  std::set<EdgeId> consumed_;
  std::set<EdgeId> always_;
  EdgeId entry_edge_ = 0;
  size_t next_edge_ = 0;
  unsigned stores_ = 0;
};

}  // namespace

DataflowGraph build_graph(const Function& function) {
  return GraphBuilder(function).build();
}

DataflowGraph build_graph(const ProgramModule& module,
                          const std::string& function) {
  if (module.functions.empty()) throw Error("module has no functions");
  if (function.empty()) return build_graph(module.functions.front());
  const Function* f = module.find_function(function);
  if (!f) throw Error("no function @" + function);
  return build_graph(*f);
}

std::vector<EdgeId> isolated_outputs(const DataflowGraph& graph,
                                     VertexId block) {
  const Vertex& v = graph.vertices.at(block);
  if (v.kind != "Block") throw Error(v.name + " is not a block");
  return v.inputs;
}

const Vertex* DataflowGraph::find(const std::string& vertex_name) const {
  for (const auto& v : vertices)
    if (v.name == vertex_name) return &v;
  return nullptr;
}

Term affine_to_term(const AffineExpr& expr, const std::vector<Term>& dims) {
  std::function<Term(const AffineExpr&)> go = [&](const AffineExpr& e) -> Term {
    const auto& ops = e.operands();
    switch (e.kind()) {
      case AffineKind::Constant:
        return Term::integer(e.value());
      case AffineKind::Dim:
      case AffineKind::Symbol:
        if (e.position() >= dims.size()) throw UnboundOperand(e.position());
        return dims[e.position()];
      case AffineKind::Add:
        return Term::make("add", {go(ops[0]), go(ops[1])});
      case AffineKind::Mul:
        return Term::make("mul", {go(ops[0]), go(ops[1])});
      case AffineKind::FloorDiv:
        return Term::make("floordiv", {go(ops[0]), go(ops[1])});
      case AffineKind::CeilDiv:
        return Term::make("ceildiv", {go(ops[0]), go(ops[1])});
      case AffineKind::Mod:
        return Term::make("mod", {go(ops[0]), go(ops[1])});
      case AffineKind::Min:
      case AffineKind::Max: {
        std::vector<Term> args;
        for (const auto& o : ops) args.push_back(go(o));
        return Term::make(e.kind() == AffineKind::Min ? "min" : "max", std::move(args));
      }
    }
    return Term::integer(0);
  };
  return normalize_affine(go(expr));
}

AffineExpr term_to_affine(const Term& t, std::vector<Term>* leaves) {
  auto leaf = [&](const Term& x) {
    for (size_t i = 0; i < leaves->size(); ++i)
      if ((*leaves)[i] == x) return AffineExpr::dim(i);
    leaves->push_back(x);
    return AffineExpr::dim(leaves->size() - 1);
  };
  if (auto v = t.as_integer()) return AffineExpr::constant(*v);
  if (t.is_atom() || !is_affine_label(t.op()) || t.arity() == 0) return leaf(t);
  const std::string& op = t.op();
  std::vector<AffineExpr> args;
  std::vector<Term> saved = *leaves;
  for (const auto& a : t.args()) args.push_back(term_to_affine(a, leaves));
  if (op == "add") {
    AffineExpr r = args[0];
    for (size_t i = 1; i < args.size(); ++i) r = r + args[i];
    return r;
  }
  if (op == "mul") {
    AffineExpr r = args[0];
    for (size_t i = 1; i < args.size(); ++i) {
      if (!r.is_constant() && !args[i].is_constant()) {
        *leaves = saved;
        return leaf(t);
      }
      r = r * args[i];
    }
    return r;
  }
  if (op == "min") return args.size() == 1 ? args[0] : AffineExpr::min(args);
  if (op == "max") return args.size() == 1 ? args[0] : AffineExpr::max(args);
  if (args.size() != 2 || !args[1].is_constant() || args[1].value() <= 0) {
    *leaves = saved;
    return leaf(t);
  }
  int64_t d = args[1].value();
  if (op == "floordiv") return AffineExpr::floor_div(args[0], d);
  if (op == "ceildiv") return AffineExpr::ceil_div(args[0], d);
  return AffineExpr::mod(args[0], d);
}

// ---------------------------------------------------------------- to term

Term graph_to_term(const DataflowGraph& g) {
  std::vector<std::optional<Term>> memo(g.vertices.size());
  std::vector<char> state(g.vertices.size(), 0);
  std::function<Term(VertexId)> term_of = [&](VertexId id) -> Term {
    if (memo[id]) return *memo[id];
    const Vertex& v = g.vertices[id];
    if (state[id] == 1) throw CycleDetected("cycle through vertex " + v.name);
    state[id] = 1;
    std::vector<Term> in;
    for (EdgeId e : v.inputs) in.push_back(term_of(g.edges[e].source));
    auto slots = [&](size_t from) {
      return std::vector<Term>(in.begin() + from, in.end());
    };
    Term t;
    const std::string& k = v.kind;
    if (k == "Argument" || k == "Entry" || k == "Arith_Constant") {
      t = Term::atom(v.label);
    } else if (k == "Affine_Apply") {
      t = affine_to_term(v.exprs.at(0), in);
    } else if (k == "Fanin") {
      std::vector<Term> args{in.at(0)};
      for (const auto& e : v.exprs) args.push_back(affine_to_term(e, slots(1)));
      t = Term::make("fanin", std::move(args));
    } else if (k == "ForValue") {
      t = Term::make("forvalue", {affine_to_term(v.exprs.at(0), in),
                                  affine_to_term(v.exprs.at(1), in),
                                  Term::integer(v.step),
                                  Term::atom("%i" + std::to_string(v.depth))});
    } else if (k == "IfCond") {
      std::vector<Term> args;
      for (size_t i = 0; i < v.exprs.size(); ++i)
        args.push_back(Term::make(v.equality.at(i) ? "eq0" : "ge0",
                                  {affine_to_term(v.exprs[i], in)}));
      args.push_back(Term::atom("%c" + std::to_string(v.depth)));
      t = Term::make("ifcond", std::move(args));
    } else if (k == "ForControl") {
      t = Term::make("forcontrol", in);
    } else if (k == "IfControl") {
      t = Term::make("ifcontrol", in);
    } else if (k == "Block") {
      t = Term::make("block", in);
    } else if (k == "Return") {
      t = Term::make("return", in);
    } else if (k == "Combine") {
      t = Term::make("combine", in);
    } else {
      // Arith ops, loads and stores carry their typed label.
      t = Term::make(v.label, in);
    }
    state[id] = 2;
    memo[id] = t;
    return t;
  };
  return term_of(g.root);
}

// ---------------------------------------------------------------- from term

namespace {

std::optional<Type> type_from_suffix(const std::string& label) {
  size_t us = label.rfind('_');
  if (us == std::string::npos) return std::nullopt;
  std::string s = label.substr(us + 1);
  if (s == "index") return Type::index();
  if (s.size() > 1 && s[0] == 'i') {
    try {
      int w = std::stoi(s.substr(1));
      if (w >= 1 && w <= 64 && std::to_string(w) == s.substr(1))
        return Type::integer(w);
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

bool is_arith_label(const std::string& l) {
  static const std::set<std::string> ops = {"addi", "subi", "muli", "divsi", "andi",
                                            "ori",  "xori", "shli", "shrsi"};
  if (l.rfind("arith_", 0) != 0) return false;
  size_t us = l.rfind('_');
  return us > 6 && ops.count(l.substr(6, us - 6)) && type_from_suffix(l);
}

class TermGraphBuilder {
 public:
  DataflowGraph build(const Term& t) {
    if (t.is_atom() || t.op() != "block") throw MalformedTerm("root must be a block", 0);
    EdgeId root = value(t, Type::index());
    g_.root = g_.edges[root].source;
    return std::move(g_);
  }

 private:
  VertexId add_vertex(const std::string& kind, Type dtype) {
    Vertex v;
    v.kind = kind;
    v.index = counters_[kind]++;
    v.name = kind + "_" + std::to_string(v.index);
    v.dtype = dtype;
    g_.vertices.push_back(std::move(v));
    return g_.vertices.size() - 1;
  }

  EdgeId finish(VertexId v, const std::vector<EdgeId>& in,
                const std::vector<bool>& token, std::string edge_name = "") {
    for (size_t i = 0; i < in.size(); ++i) {
      g_.vertices[v].inputs.push_back(in[i]);
      g_.vertices[v].token_input.push_back(i < token.size() && token[i]);
      g_.edges[in[i]].targets.push_back(v);
    }
    Edge e;
    e.name = edge_name.empty() ? "%" + std::to_string(next_edge_++) : edge_name;
    e.source = v;
    e.type = g_.vertices[v].dtype;
    g_.edges.push_back(std::move(e));
    g_.vertices[v].outputs.push_back(g_.edges.size() - 1);
    return g_.edges.size() - 1;
  }

  [[noreturn]] void bad(const std::string& what) { throw MalformedTerm(what, position_); }

  std::vector<EdgeId> leaves_to_edges(const std::vector<Term>& leaves) {
    std::vector<EdgeId> out;
    for (const auto& l : leaves) out.push_back(value(l, Type::index()));
    return out;
  }

  int depth_of(const Term& a, char prefix) {
    const std::string& s = a.op();
    if (!a.is_atom() || s.size() < 3 || s[0] != '%' || s[1] != prefix) bad("bad scope name " + a.str());
    try {
      return std::stoi(s.substr(2));
    } catch (const std::exception&) {
      bad("bad scope name " + s);
    }
  }

  EdgeId value(const Term& t, Type hint) {
    ++position_;
    auto it = memo_.find(t);
    if (it != memo_.end()) return it->second;
    EdgeId e = create(t, hint);
    memo_.emplace(t, e);
    return e;
  }

  EdgeId create(const Term& t, Type hint) {
    const std::string& op = t.op();
    if (t.is_atom()) {
      if (op.rfind("%arg", 0) == 0) {
        VertexId v = add_vertex("Argument", hint);
        g_.vertices[v].label = op;
        return finish(v, {}, {});
      }
      if (op == "entry") {
        VertexId v = add_vertex("Entry", Type::index());
        g_.vertices[v].label = op;
        return finish(v, {}, {});
      }
      if (op == "true" || op == "false" || t.as_integer()) {
        VertexId v = add_vertex("Arith_Constant", op == "true" || op == "false" ? Type::integer(1) : hint);
        g_.vertices[v].label = op;
        return finish(v, {}, {});
      }
      bad("unexpected atom " + op);
    }
    if (is_affine_label(op)) {
      std::vector<Term> leaves;
      AffineExpr e = term_to_affine(t, &leaves);
      VertexId v = add_vertex("Affine_Apply", Type::index());
      g_.vertices[v].exprs = {e};
      return finish(v, leaves_to_edges(leaves), {});
    }
    if (is_arith_label(op)) {
      if (t.arity() != 2) bad(op + " takes two operands");
      Type ty = *type_from_suffix(op);
      std::string base = op.substr(6, op.rfind('_') - 6);
      base[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(base[0])));
      VertexId v = add_vertex("Arith_" + base, ty);
      g_.vertices[v].label = op;
      std::vector<EdgeId> in{value(t.arg(0), ty), value(t.arg(1), ty)};
      return finish(v, in, {});
    }
    if (op.rfind("load_", 0) == 0 || op.rfind("store_", 0) == 0) {
      bool load = op[0] == 'l';
      auto ty = type_from_suffix(op);
      if (!ty || t.arity() != (load ? 2u : 3u)) bad("malformed " + op);
      const Term& fan = t.arg(load ? 0 : 1);
      if (fan.is_atom() || fan.op() != "fanin") bad(op + " needs a fanin");
      std::vector<EdgeId> in;
      if (!load) in.push_back(value(t.arg(0), *ty));
      in.push_back(value(fan, Type::index()));
      in.push_back(value(t.arg(load ? 1 : 2), Type::index()));
      VertexId v = add_vertex(load ? "Affine_Load" : "Affine_Store", *ty);
      g_.vertices[v].label = op;
      g_.vertices[v].dimension = fan.arity() - 1;
      std::vector<bool> token(in.size(), false);
      token.back() = true;
      return finish(v, in, token, load ? "" : "pseudo_" + std::to_string(stores_++));
    }
    if (op == "fanin") {
      if (t.arity() < 2) bad("fanin needs a memref and indices");
      std::vector<Term> leaves;
      std::vector<AffineExpr> exprs;
      for (size_t i = 1; i < t.arity(); ++i) exprs.push_back(term_to_affine(t.arg(i), &leaves));
      std::vector<EdgeId> in{value(t.arg(0), Type::index())};
      for (EdgeId e : leaves_to_edges(leaves)) in.push_back(e);
      VertexId v = add_vertex("Fanin", Type::index());
      g_.vertices[v].exprs = std::move(exprs);
      g_.vertices[v].dimension = t.arity() - 1;
      return finish(v, in, {});
    }
    if (op == "forvalue") {
      if (t.arity() != 4 || !t.arg(2).as_integer() || *t.arg(2).as_integer() < 1)
        bad("forvalue takes start, end, step and a name");
      std::vector<Term> leaves;
      std::vector<AffineExpr> exprs{term_to_affine(t.arg(0), &leaves),
                                    term_to_affine(t.arg(1), &leaves)};
      int depth = depth_of(t.arg(3), 'i');
      std::vector<EdgeId> in = leaves_to_edges(leaves);
      VertexId v = add_vertex("ForValue", Type::index());
      g_.vertices[v].exprs = std::move(exprs);
      g_.vertices[v].step = *t.arg(2).as_integer();
      g_.vertices[v].depth = depth;
      g_.vertices[v].var = t.arg(3).op();
      return finish(v, in, {});
    }
    if (op == "ifcond") {
      if (t.arity() < 1) bad("ifcond needs a name");
      std::vector<Term> leaves;
      std::vector<AffineExpr> exprs;
      std::vector<bool> eq;
      for (size_t i = 0; i + 1 < t.arity(); ++i) {
        const Term& c = t.arg(i);
        if (c.is_atom() || (c.op() != "ge0" && c.op() != "eq0") || c.arity() != 1)
          bad("malformed constraint");
        exprs.push_back(term_to_affine(c.arg(0), &leaves));
        eq.push_back(c.op() == "eq0");
      }
      int depth = depth_of(t.args().back(), 'c');
      std::vector<EdgeId> in = leaves_to_edges(leaves);
      VertexId v = add_vertex("IfCond", Type::integer(1));
      g_.vertices[v].exprs = std::move(exprs);
      g_.vertices[v].equality = std::move(eq);
      g_.vertices[v].depth = depth;
      return finish(v, in, {});
    }
    auto expect_child = [&](size_t i, const char* label) {
      if (t.arg(i).is_atom() || t.arg(i).op() != label)
        bad(op + " child " + std::to_string(i) + " must be " + label);
    };
    if (op == "forcontrol") {
      if (t.arity() != 2) bad("forcontrol takes forvalue and block");
      expect_child(0, "forvalue");
      expect_child(1, "block");
      std::vector<EdgeId> in{value(t.arg(0), Type::index()), value(t.arg(1), Type::index())};
      return finish(add_vertex("ForControl", Type::index()), in, {});
    }
    if (op == "ifcontrol") {
      if (t.arity() != 3) bad("ifcontrol takes a condition and two blocks");
      expect_child(0, "ifcond");
      expect_child(1, "block");
      expect_child(2, "block");
      std::vector<EdgeId> in;
      for (const auto& a : t.args()) in.push_back(value(a, Type::index()));
      return finish(add_vertex("IfControl", Type::index()), in, {});
    }
    if (op == "block" || op == "return" || op == "combine") {
      if (op == "combine" && t.arity() != 2) bad("combine takes two operands");
      std::vector<EdgeId> in;
      for (const auto& a : t.args()) in.push_back(value(a, Type::index()));
      std::string kind = op == "block" ? "Block" : op == "return" ? "Return" : "Combine";
      return finish(add_vertex(kind, Type::index()), in, {});
    }
    bad("unknown operator " + op);
  }

  DataflowGraph g_;
  std::unordered_map<Term, EdgeId, TermHash> memo_;
  std::map<std::string, unsigned> counters_;
  size_t position_ = 0;
  size_t next_edge_ = 0;
  unsigned stores_ = 0;
};

}  // namespace

DataflowGraph term_to_graph(const Term& term) {
  return TermGraphBuilder().build(term);
}

// ---------------------------------------------------------------- output

std::string DataflowGraph::report() const {
  std::ostringstream out;
  auto names = [&](const std::vector<EdgeId>& es) {
    std::string s;
    for (EdgeId e : es) s += edges[e].name + " ";
    return s;
  };
  for (const auto& v : vertices) {
    out << "Vertex Name: " << v.name << "\n"
        << "Dtype: " << v.dtype.str() << "\n"
        << "Dimension: " << v.dimension << "\n"
        << "Input Edges: " << names(v.inputs) << "\n"
        << "Output Edges: " << names(v.outputs) << "\n\n";
  }
  for (const auto& e : edges) {
    out << "Edge Name: " << e.name << "\n"
        << "Source Vertex: " << vertices[e.source].name << "\n"
        << "Target Vertices: ";
    for (VertexId t : e.targets) out << vertices[t].name << " ";
    out << "\n\n";
  }
  return out.str();
}

std::string DataflowGraph::dot() const {
  std::ostringstream out;
  out << "digraph \"" << function << "\" {\n  node [shape=box];\n";
  for (size_t i = 0; i < vertices.size(); ++i) {
    const auto& v = vertices[i];
    std::string label = v.name;
    if (!v.label.empty()) label += "\\n" + v.label;
    out << "  v" << i << " [label=\"" << label << "\"];\n";
  }
  for (const auto& e : edges) {
    for (VertexId t : e.targets) {
      bool token = false;
      const auto& tv = vertices[t];
      for (size_t k = 0; k < tv.inputs.size(); ++k)
        if (&edges[tv.inputs[k]] == &e && tv.token_input[k]) token = true;
      out << "  v" << e.source << " -> v" << t << " [label=\"" << e.name << "\""
          << (token ? ", style=dashed" : "") << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace hec
