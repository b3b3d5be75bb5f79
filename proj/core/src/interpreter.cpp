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


#include "hec/interpreter.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>
#include <unordered_map>

#include "hec/quasi_affine.hpp"
#include "hec/static_rules.hpp"

namespace hec {

OutOfBounds::OutOfBounds(unsigned memref, std::vector<int64_t> index)
    : Error([&] {
        std::string s = "out-of-bounds access to %arg" + std::to_string(memref) + "[";
        for (size_t i = 0; i < index.size(); ++i) s += (i ? ", " : "") + std::to_string(index[i]);
        return s + "]";
      }()),
      memref_(memref),
      index_(std::move(index)) {}

namespace {

size_t flat_index(const Buffer& b, unsigned memref, const std::vector<int64_t>& idx) {
  if (idx.size() != b.extents.size()) throw OutOfBounds(memref, idx);
  size_t flat = 0;
  for (size_t d = 0; d < idx.size(); ++d) {
    if (idx[d] < 0 || idx[d] >= b.extents[d]) throw OutOfBounds(memref, idx);
    flat = flat * static_cast<size_t>(b.extents[d]) + static_cast<size_t>(idx[d]);
  }
  return flat;
}

unsigned width_of(const Type& t) { return t.is_index() ? 0 : t.width; }

class AstInterpreter {
 public:
  AstInterpreter(const Function& fn, const Symbols& symbols, const MemoryState& initial,
                 const InterpOptions& options)
      : options_(options) {
    result_.memory = initial;
    for (unsigned i = 0; i < fn.args.size(); ++i) {
      const auto& a = fn.args[i];
      if (a.type.is_memref()) {
        if (!result_.memory.buffers.count(i))
          throw Error("no buffer bound for argument " + a.name);
        memrefs_[a.name] = i;
      } else {
        auto it = symbols.find(i);
        if (it == symbols.end()) throw Error("no value bound for argument " + a.name);
        values_[a.name] = a.type.is_int() ? wrap_to_width(it->second, a.type.width) : it->second;
      }
    }
  }

  ExecResult run(const Function& fn) {
    block(fn.body);
    return std::move(result_);
  }

 private:
  void tick() {
    if (++steps_ > options_.max_steps) throw NonTermination("step limit exceeded");
  }

  int64_t value(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw Error("unbound value " + name);
    return it->second;
  }

  std::vector<int64_t> map_values(const MapUse& use) const {
    std::vector<int64_t> dims, syms;
    for (const auto& d : use.dims) dims.push_back(value(d));
    for (const auto& s : use.symbols) syms.push_back(value(s));
    std::vector<int64_t> out;
    for (const auto& e : use.map.results) out.push_back(eval_affine_expr(e, dims, syms));
    return out;
  }

  Buffer& buffer(const std::string& name, unsigned* pos) {
    auto it = memrefs_.find(name);
    if (it == memrefs_.end()) throw Error("unknown memref " + name);
    *pos = it->second;
    return result_.memory.buffers.at(it->second);
  }

  void block(const std::vector<Operation>& ops) {
    for (const auto& op : ops) {
      tick();
      switch (op.kind) {
        case OpKind::Constant:
          values_[op.result] = op.value;
          break;
        case OpKind::Binary: {
          std::string name = op.name.substr(op.name.find('.') + 1);
          auto r = eval_arith(name, value(op.operands[0]), value(op.operands[1]), width_of(op.type));
          if (!r) throw Trap(op.name + " trapped");
          values_[op.result] = *r;
          break;
        }
        case OpKind::Apply:
          values_[op.result] = map_values(op.map).at(0);
          break;
        case OpKind::Load: {
          unsigned pos;
          Buffer& b = buffer(op.memref, &pos);
          values_[op.result] = b.data[flat_index(b, pos, map_values(op.map))];
          break;
        }
        case OpKind::Store: {
          unsigned pos;
          Buffer& b = buffer(op.memref, &pos);
          int64_t v = value(op.operands.at(0));
          b.data[flat_index(b, pos, map_values(op.map))] =
              b.element.is_int() ? wrap_to_width(v, b.element.width) : v;
          break;
        }
        case OpKind::For: {
          auto lo = map_values(op.lower);
          auto hi = map_values(op.upper);
          int64_t start = *std::max_element(lo.begin(), lo.end());
          int64_t end = *std::min_element(hi.begin(), hi.end());
          for (int64_t i = start; i < end; i += op.step) {
            tick();
            ++result_.iterations;
            values_[op.iv] = i;
            block(op.body);
          }
          break;
        }
        case OpKind::If: {
          std::vector<int64_t> dims, syms;
          for (const auto& d : op.condition.dims) dims.push_back(value(d));
          for (const auto& s : op.condition.symbols) syms.push_back(value(s));
          bool holds = true;
          for (const auto& c : op.condition.constraints) {
            int64_t v = eval_affine_expr(c.expr, dims, syms);
            holds = holds && (c.equality ? v == 0 : v >= 0);
          }
          block(holds ? op.body : op.else_body);
          break;
        }
        case OpKind::Return:
          for (const auto& v : op.operands) result_.returns.push_back(value(v));
          return;
      }
    }
  }

  InterpOptions options_;
  ExecResult result_;
  std::unordered_map<std::string, int64_t> values_;
  std::unordered_map<std::string, unsigned> memrefs_;
  uint64_t steps_ = 0;
};

}  // namespace

ExecResult execute(const Function& fn, const Symbols& symbols, const MemoryState& initial,
                   const InterpOptions& options) {
  return AstInterpreter(fn, symbols, initial, options).run(fn);
}

MemoryState interpret(const ProgramModule& module, const Symbols& symbols,
                      const MemoryState& initial, const std::string& function) {
  const Function* fn = function.empty() ? (module.functions.empty() ? nullptr : &module.functions[0])
                                        : module.find_function(function);
  if (!fn) throw Error("no function '" + function + "' in module");
  return execute(*fn, symbols, initial).memory;
}

// ---------------------------------------------------------------- terms

namespace {

unsigned suffix_width(const std::string& label) {
  std::string t = label.substr(label.rfind('_') + 1);
  return t == "index" ? 0 : type_width(t);
}

bool is_effect(const Term& t) {
  if (t.is_atom()) return false;
  const std::string& op = t.op();
  return op == "forcontrol" || op == "ifcontrol" || op == "combine" || op == "return" ||
         op.rfind("store_", 0) == 0;
}

class TermEvaluator {
 public:
  TermEvaluator(const Symbols& symbols, const MemoryState& initial, const InterpOptions& options)
      : symbols_(symbols), options_(options) {
    result_.memory = initial;
  }

  ExecResult run(const Term& root) {
    if (root.is_atom() || root.op() != "block") throw MalformedTerm("root must be a block", 0);
    block(root, Term::atom("entry"));
    return std::move(result_);
  }

 private:
  using Memo = std::unordered_map<Term, int64_t, TermHash>;

  void tick() {
    if (++steps_ > options_.max_steps) throw NonTermination("step limit exceeded");
  }

  // Loads reachable from `t` without entering nested regions, grouped by token.
  void collect_loads(const Term& t, std::unordered_map<Term, std::vector<Term>, TermHash>& out,
                     std::unordered_map<Term, bool, TermHash>& seen) {
    if (t.is_atom() || !seen.emplace(t, true).second) return;
    const std::string& op = t.op();
    if (op == "forcontrol" || op == "ifcontrol") return;
    if (op.rfind("load_", 0) == 0) {
      out[t.arg(1)].push_back(t);
      return;
    }
    for (const auto& a : t.args()) collect_loads(a, out, seen);
  }

  void block(const Term& blk, const Term& marker) {
    std::unordered_map<Term, std::vector<Term>, TermHash> loads;
    std::unordered_map<Term, bool, TermHash> seen;
    for (const auto& item : blk.args()) collect_loads(item, loads, seen);
    memos_.emplace_back();
    auto fire = [&](const Term& token) {
      auto it = loads.find(token);
      if (it == loads.end()) return;
      for (const auto& l : it->second) memos_.back()[l] = load(l);
    };
    fire(marker);
    for (const auto& item : blk.args()) {
      if (!is_effect(item)) continue;
      effect(item);
      fire(item);
    }
    memos_.pop_back();
  }

  void effect(const Term& t) {
    tick();
    const std::string& op = t.op();
    if (op == "forcontrol") {
      const Term& fv = t.arg(0);
      int64_t lo = value(fv.arg(0));
      int64_t hi = value(fv.arg(1));
      auto step = fv.arg(2).as_integer();
      if (!step || *step < 1) throw MalformedTerm("loop step must be a positive integer", 0);
      for (int64_t i = lo; i < hi; i += *step) {
        tick();
        ++result_.iterations;
        ivs_[fv] = i;
        block(t.arg(1), fv);
      }
      ivs_.erase(fv);
    } else if (op == "ifcontrol") {
      const Term& cond = t.arg(0);
      bool holds = true;
      for (size_t i = 0; i + 1 < cond.arity(); ++i) {
        int64_t v = value(cond.arg(i).arg(0));
        holds = holds && (cond.arg(i).op() == "eq0" ? v == 0 : v >= 0);
      }
      block(holds ? t.arg(1) : t.arg(2), cond);
    } else if (op == "combine") {
      effect(t.arg(0));
      effect(t.arg(1));
    } else if (op == "return") {
      for (const auto& a : t.args()) result_.returns.push_back(value(a));
    } else {
      unsigned pos;
      std::vector<int64_t> idx = indices(t.arg(1), &pos);
      Buffer& b = buffer(pos);
      int64_t v = value(t.arg(0));
      b.data[flat_index(b, pos, idx)] = wrap_to_width(v, suffix_width(op));
    }
  }

  Buffer& buffer(unsigned pos) {
    auto it = result_.memory.buffers.find(pos);
    if (it == result_.memory.buffers.end())
      throw Error("no buffer bound for argument " + std::to_string(pos));
    return it->second;
  }

  std::vector<int64_t> indices(const Term& fanin, unsigned* pos) {
    const std::string& m = fanin.arg(0).op();
    if (m.rfind("%arg", 0) != 0) throw MalformedTerm("fanin needs an argument memref", 0);
    *pos = static_cast<unsigned>(std::stoul(m.substr(4)));
    std::vector<int64_t> idx;
    for (size_t i = 1; i < fanin.arity(); ++i) idx.push_back(value(fanin.arg(i)));
    return idx;
  }

  int64_t load(const Term& t) {
    unsigned pos;
    std::vector<int64_t> idx = indices(t.arg(0), &pos);
    Buffer& b = buffer(pos);
    return b.data[flat_index(b, pos, idx)];
  }

  int64_t value(const Term& t) {
    const std::string& op = t.op();
    if (t.is_atom()) {
      if (auto v = constant_value(t)) return *v;
      if (op.rfind("%arg", 0) == 0) {
        auto it = symbols_.find(static_cast<unsigned>(std::stoul(op.substr(4))));
        if (it == symbols_.end()) throw Error("no value bound for " + op);
        return it->second;
      }
      throw MalformedTerm("unexpected atom " + op, 0);
    }
    if (op == "forvalue") {
      auto it = ivs_.find(t);
      if (it == ivs_.end()) throw MalformedTerm("induction variable used outside its loop", 0);
      return it->second;
    }
    if (op.rfind("load_", 0) == 0) {
      for (auto m = memos_.rbegin(); m != memos_.rend(); ++m) {
        auto it = m->find(t);
        if (it != m->end()) return it->second;
      }
      return load(t);
    }
    if (is_affine_label(op)) {
      return eval_affine_term(t, [&](const Term& leaf) { return value(leaf); });
    }
    if (op.rfind("arith_", 0) == 0) {
      std::string name = op.substr(6, op.rfind('_') - 6);
      auto r = eval_arith(name, value(t.arg(0)), value(t.arg(1)), suffix_width(op));
      if (!r) throw Trap(op + " trapped");
      return *r;
    }
    if (op.rfind("not_", 0) == 0) return wrap_to_width(~value(t.arg(0)), suffix_width(op));
    throw MalformedTerm("cannot evaluate " + op, 0);
  }

  const Symbols& symbols_;
  InterpOptions options_;
  ExecResult result_;
  std::unordered_map<Term, int64_t, TermHash> ivs_;
  std::vector<Memo> memos_;
  uint64_t steps_ = 0;
};

}  // namespace

ExecResult evaluate_term(const Term& root, const Symbols& symbols, const MemoryState& initial,
                         const InterpOptions& options) {
  return TermEvaluator(symbols, initial, options).run(root);
}

// ---------------------------------------------------------------- testing

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int64_t draw(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  if (hi <= lo) return lo;
  uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
  return static_cast<int64_t>(static_cast<uint64_t>(lo) + (span == 0 ? rng() : rng() % span));
}

void check_signatures(const Function& a, const Function& b) {
  if (a.args.size() != b.args.size())
    throw SignatureMismatch("argument counts differ: " + std::to_string(a.args.size()) + " vs " +
                            std::to_string(b.args.size()));
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!(a.args[i].type == b.args[i].type))
      throw SignatureMismatch("argument " + std::to_string(i) + " has type " +
                              a.args[i].type.str() + " vs " + b.args[i].type.str());
  if (a.results != b.results) throw SignatureMismatch("result types differ");
}

enum class Outcome { Same, Diverged, Trapped };

struct Trial {
  Outcome outcome = Outcome::Same;
  Divergence divergence;
  uint64_t iterations_a = 0;
  uint64_t iterations_b = 0;
};

Trial run_pair(const Function& a, const Function& b, const Symbols& syms, const MemoryState& mem,
               const InterpOptions& opts) {
  Trial t;
  try {
    ExecResult ra = execute(a, syms, mem, opts);
    ExecResult rb = execute(b, syms, mem, opts);
    t.iterations_a = ra.iterations;
    t.iterations_b = rb.iterations;
    if (auto d = compare_runs(ra, rb)) {
      t.outcome = Outcome::Diverged;
      t.divergence = *d;
    }
  } catch (const OutOfBounds&) {
    t.outcome = Outcome::Trapped;
  } catch (const Trap&) {
    t.outcome = Outcome::Trapped;
  } catch (const NonTermination&) {
    t.outcome = Outcome::Trapped;
  }
  return t;
}

}  // namespace

std::pair<Symbols, MemoryState> sample_inputs(const Function& fn, const DiffOptions& options,
                                              uint64_t index) {
  std::mt19937_64 rng(mix_seed(options.seed, index));
  Symbols syms;
  MemoryState mem;
  const int64_t lo = options.symbol_lo;
  const int64_t hi = std::max(options.symbol_lo, options.symbol_hi);
  for (unsigned i = 0; i < fn.args.size(); ++i) {
    const Type& t = fn.args[i].type;
    if (t.is_memref()) {
      Buffer b;
      b.element = t.element();
      size_t n = 1;
      for (int64_t e : t.shape) {
        b.extents.push_back(e == Type::kDynamic ? options.dynamic_extent : e);
        n *= static_cast<size_t>(b.extents.back());
      }
      unsigned w = b.element.is_int() ? b.element.width : 0;
      b.data.resize(n);
      for (size_t k = 0; k < n; ++k) {
        // The first samples are all-zero, all-ones and an identity ramp.
        int64_t v = index == 0   ? 0
                    : index == 1 ? -1
                    : index == 2 ? static_cast<int64_t>(k)
                                 : static_cast<int64_t>(rng());
        b.data[k] = w ? wrap_to_width(v, w) : v % 1024;
      }
      mem.buffers.emplace(i, std::move(b));
    } else {
      int64_t v;
      switch (index % 3) {
        case 0: v = std::min(hi, lo + static_cast<int64_t>((index / 3) % 17)); break;
        case 1: v = draw(rng, lo, std::min(hi, lo + 64)); break;
        default: v = draw(rng, lo, hi); break;
      }
      syms[i] = t.is_int() ? wrap_to_width(v, t.width) : v;
    }
  }
  return {syms, mem};
}

std::optional<Divergence> compare_runs(const ExecResult& a, const ExecResult& b) {
  for (const auto& [pos, ba] : a.memory.buffers) {
    const Buffer& bb = b.memory.buffers.at(pos);
    for (size_t k = 0; k < ba.data.size(); ++k) {
      if (ba.data[k] == bb.data[k]) continue;
      Divergence d;
      d.memref = pos;
      size_t rest = k;
      d.index.assign(ba.extents.size(), 0);
      for (size_t i = ba.extents.size(); i-- > 0;) {
        d.index[i] = static_cast<int64_t>(rest % static_cast<size_t>(ba.extents[i]));
        rest /= static_cast<size_t>(ba.extents[i]);
      }
      d.value_a = ba.data[k];
      d.value_b = bb.data[k];
      return d;
    }
  }
  for (size_t i = 0; i < std::max(a.returns.size(), b.returns.size()); ++i) {
    int64_t va = i < a.returns.size() ? a.returns[i] : 0;
    int64_t vb = i < b.returns.size() ? b.returns[i] : 0;
    if (va != vb || a.returns.size() != b.returns.size()) {
      Divergence d;
      d.kind = Divergence::Kind::Return;
      d.index = {static_cast<int64_t>(i)};
      d.value_a = va;
      d.value_b = vb;
      return d;
    }
  }
  return std::nullopt;
}

DiffResult differential_test(const Function& a, const Function& b, const DiffOptions& options) {
  check_signatures(a, b);
  DiffResult result;
  const size_t hinted = options.priority_symbols.size() * 4;
  for (uint64_t s = 0; s < hinted + options.samples; ++s) {
    auto [syms, mem] = sample_inputs(a, options, s < hinted ? s % 4 : s - hinted);
    if (s < hinted) {
      for (const auto& [pos, v] : options.priority_symbols[s / 4])
        if (syms.count(pos)) syms[pos] = v;
    }
    Trial t = run_pair(a, b, syms, mem, options.interp);
    ++result.executed;
    if (t.outcome == Outcome::Trapped) {
      ++result.trapped;
      continue;
    }
    if (t.outcome == Outcome::Same) continue;
    if (options.shrink) {
      // Greedy shrinking: smaller symbols first, then zeroed elements.
      auto still = [&](const Symbols& sy, const MemoryState& m, Trial* out) {
        Trial r = run_pair(a, b, sy, m, options.interp);
        if (r.outcome != Outcome::Diverged) return false;
        *out = r;
        return true;
      };
      for (auto& [pos, v] : syms) {
        for (bool progress = true; progress;) {
          progress = false;
          for (int64_t cand : {options.symbol_lo, v / 2, v - 1}) {
            if (cand >= v || cand < options.symbol_lo) continue;
            Symbols trial = syms;
            trial[pos] = cand;
            if (still(trial, mem, &t)) {
              v = cand;
              progress = true;
              break;
            }
          }
        }
      }
      for (auto& [pos, buf] : mem.buffers) {
        for (size_t k = 0; k < buf.data.size(); ++k) {
          if (buf.data[k] == 0) continue;
          MemoryState trial = mem;
          trial.buffers[pos].data[k] = 0;
          if (still(syms, trial, &t)) buf.data[k] = 0;
        }
      }
    }
    Counterexample cx;
    cx.symbols = syms;
    cx.initial = mem;
    cx.divergence = t.divergence;
    cx.iterations_a = t.iterations_a;
    cx.iterations_b = t.iterations_b;
    result.counterexample = std::move(cx);
    return result;
  }
  return result;
}

std::string Counterexample::describe(const Function& fn) const {
  std::ostringstream out;
  auto arg_name = [&](unsigned pos) {
    return pos < fn.args.size() ? fn.args[pos].name : "%arg" + std::to_string(pos);
  };
  bool first = true;
  for (const auto& [pos, v] : symbols) {
    out << (first ? "" : ", ") << arg_name(pos) << " = " << v;
    first = false;
  }
  if (!symbols.empty()) out << "; ";
  if (divergence.kind == Divergence::Kind::Memory) {
    out << arg_name(divergence.memref) << "[";
    for (size_t i = 0; i < divergence.index.size(); ++i) out << (i ? ", " : "") << divergence.index[i];
    out << "]";
  } else {
    out << "return value " << divergence.index.at(0);
  }
  out << " is " << divergence.value_a << " vs " << divergence.value_b;
  if (iterations_a != iterations_b)
    out << " (loop iterations " << iterations_a << " vs " << iterations_b << ")";
  return out.str();
}

}  // namespace hec
