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


#include "hec/static_rules.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "hec/ast.hpp"
#include "hec/quasi_affine.hpp"

namespace hec {

namespace {

struct Label {
  enum Kind { Arith, Not, Sum, Other } kind = Other;
  std::string op;  // arith op name for Arith
  std::string type;
};

bool valid_type(std::string_view t) {
  if (t == "index") return true;
  if (t.size() < 2 || t[0] != 'i') return false;
  int w = 0;
  for (char c : t.substr(1)) {
    if (c < '0' || c > '9') return false;
    w = w * 10 + (c - '0');
    if (w > 64) return false;
  }
  return w >= 1 && t[1] != '0';
}

Label classify(const std::string& l) {
  static const std::set<std::string> ops = {"addi", "subi", "muli", "divsi", "andi",
                                            "ori",  "xori", "shli", "shrsi"};
  Label out;
  if (l == "%sum") {
    out.kind = Label::Sum;
    return out;
  }
  size_t us = l.rfind('_');
  if (us == std::string::npos || !valid_type(l.substr(us + 1))) return out;
  out.type = l.substr(us + 1);
  if (l.rfind("not_", 0) == 0 && us == 3) {
    out.kind = Label::Not;
  } else if (l.rfind("arith_", 0) == 0 && us > 6 && ops.count(l.substr(6, us - 6))) {
    out.kind = Label::Arith;
    out.op = l.substr(6, us - 6);
  }
  return out;
}

bool is_var(const Term& t) { return t.is_atom() && t.op().size() > 1 && t.op()[0] == '?'; }

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (is_var(t)) {
    out.insert(t.op().substr(1));
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out);
}

bool has_meta(const Term& t) {
  if (!t.is_atom() && t.op() == "%sum") return true;
  return std::any_of(t.args().begin(), t.args().end(), has_meta);
}

struct Outcome {
  bool trap = false;
  bool skip = false;
  int64_t value = 0;
};

/// A rule side flattened to postfix over numbered variables.
class Program {
 public:
  Program(const Term& t, const std::vector<std::string>& vars, unsigned width) : width_(width) {
    compile(t, vars);
  }

  Outcome run(const std::vector<int64_t>& env) const {
    int64_t stack[64];
    size_t sp = 0;
    for (const auto& in : code_) {
      switch (in.kind) {
        case Instr::Var: stack[sp++] = env[in.k]; break;
        case Instr::Const: stack[sp++] = in.k; break;
        case Instr::Not: stack[sp - 1] = wrap_to_width(~stack[sp - 1], in.width); break;
        case Instr::Arith: {
          auto r = eval_arith(in.op, stack[sp - 2], stack[sp - 1], in.width);
          if (!r) return {true, false, 0};
          stack[sp - 2] = *r;
          --sp;
          break;
        }
        case Instr::Sum: {
          int64_t total = stack[sp - 2] + stack[sp - 1];
          if (total >= static_cast<int64_t>(width_)) return {false, true, 0};
          stack[sp - 2] = total;
          --sp;
          break;
        }
      }
    }
    return {false, false, stack[0]};
  }

 private:
  struct Instr {
    enum Kind { Var, Const, Arith, Not, Sum } kind;
    int64_t k = 0;
    unsigned width = 0;
    std::string op;
  };

  void compile(const Term& t, const std::vector<std::string>& vars) {
    if (is_var(t)) {
      auto it = std::find(vars.begin(), vars.end(), t.op().substr(1));
      code_.push_back({Instr::Var, it - vars.begin(), 0, {}});
      return;
    }
    if (t.is_atom()) {
      auto v = constant_value(t);
      if (!v) throw Error("not a constant: " + t.op());
      code_.push_back({Instr::Const, wrap_to_width(*v, width_), 0, {}});
      return;
    }
    if (code_.size() > 48) throw Error("rule side too deep");
    for (const auto& a : t.args()) compile(a, vars);
    Label l = classify(t.op());
    unsigned w = l.type.empty() ? width_ : type_width(l.type);
    switch (l.kind) {
      case Label::Arith: code_.push_back({Instr::Arith, 0, w, l.op}); return;
      case Label::Not: code_.push_back({Instr::Not, 0, w, {}}); return;
      case Label::Sum: code_.push_back({Instr::Sum, 0, w, {}}); return;
      case Label::Other: break;
    }
    throw Error("unknown operator in rule: " + t.op());
  }

  unsigned width_;
  std::vector<Instr> code_;
};

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (size_t p = 0; (p = s.find(from, p)) != std::string::npos; p += to.size())
    s.replace(p, from.size(), to);
  return s;
}

}  // namespace

unsigned type_width(std::string_view type) {
  if (type == "index") return 64;
  return static_cast<unsigned>(std::stoul(std::string(type.substr(1))));
}

Term constant_atom(int64_t value, std::string_view type) {
  if (type == "i1") return Term::atom((value & 1) ? "true" : "false");
  return Term::integer(type == "index" ? value : wrap_to_width(value, type_width(type)));
}

std::optional<int64_t> constant_value(const Term& atom) {
  if (!atom.is_atom()) return std::nullopt;
  if (atom.op() == "true") return -1;
  if (atom.op() == "false") return 0;
  return atom.as_integer();
}

std::vector<std::string> default_types() { return {"i1", "i8", "i16", "i32", "i64", "index"}; }

std::vector<StaticRule> default_ruleset(const std::vector<std::string>& types) {
  struct Template {
    const char* name;
    const char* lhs;
    const char* rhs;
    bool both;
    std::vector<std::string> shifts;
  };
  static const std::vector<Template> templates = {
      {"shl-shl", "(arith_shli_@ (arith_shli_@ ?a ?b) ?c)", "(arith_shli_@ ?a (%sum ?b ?c))",
       false, {"b", "c"}},
      {"mul-shl", "(arith_shli_@ (arith_muli_@ ?a ?b) ?c)",
       "(arith_muli_@ (arith_shli_@ ?a ?c) ?b)", true, {"c"}},
      {"mul-assoc", "(arith_muli_@ (arith_muli_@ ?a ?b) ?c)",
       "(arith_muli_@ ?a (arith_muli_@ ?b ?c))", true, {}},
      {"demorgan-and", "(not_@ (arith_andi_@ ?a ?b))",
       "(arith_ori_@ (not_@ ?a) (not_@ ?b))", true, {}},
      {"demorgan-or", "(not_@ (arith_ori_@ ?a ?b))",
       "(arith_andi_@ (not_@ ?a) (not_@ ?b))", true, {}},
      {"xor-expand", "(arith_xori_@ ?a ?b)",
       "(arith_ori_@ (arith_andi_@ ?a (not_@ ?b)) (arith_andi_@ (not_@ ?a) ?b))", true, {}},
      {"xor-zero", "(arith_xori_@ ?a $0)", "?a", false, {}},
      {"not-xor", "(not_@ ?a)", "(arith_xori_@ ?a $T)", true, {}},
      {"not-not", "(not_@ (not_@ ?a))", "?a", false, {}},
      {"add-comm", "(arith_addi_@ ?a ?b)", "(arith_addi_@ ?b ?a)", false, {}},
      {"mul-comm", "(arith_muli_@ ?a ?b)", "(arith_muli_@ ?b ?a)", false, {}},
      {"and-comm", "(arith_andi_@ ?a ?b)", "(arith_andi_@ ?b ?a)", false, {}},
      {"or-comm", "(arith_ori_@ ?a ?b)", "(arith_ori_@ ?b ?a)", false, {}},
      {"xor-comm", "(arith_xori_@ ?a ?b)", "(arith_xori_@ ?b ?a)", false, {}},
      {"add-zero", "(arith_addi_@ ?a $0)", "?a", false, {}},
      {"mul-one", "(arith_muli_@ ?a $1)", "?a", false, {}},
      {"and-ones", "(arith_andi_@ ?a $T)", "?a", false, {}},
      {"or-zero", "(arith_ori_@ ?a $0)", "?a", false, {}},
  };
  std::vector<StaticRule> out;
  for (const auto& type : types) {
    if (!valid_type(type)) throw Error("unsupported rule type " + type);
    auto expand = [&](std::string s) {
      s = replace_all(s, "_@", "_" + type);
      s = replace_all(s, "$0", constant_atom(0, type).op());
      s = replace_all(s, "$1", constant_atom(1, type).op());
      s = replace_all(s, "$T", constant_atom(-1, type).op());
      return parse_term(s);
    };
    unsigned w = type_width(type);
    for (unsigned c = 0; c < w; ++c) {
      StaticRule r;
      r.name = "shl-mul-" + std::to_string(c) + "-" + type;
      r.lhs = Term::make("arith_shli_" + type, {Term::atom("?a"), constant_atom(c, type)});
      int64_t p = static_cast<int64_t>(uint64_t{1} << c);
      r.rhs = Term::make("arith_muli_" + type, {Term::atom("?a"), constant_atom(p, type)});
      r.type = type;
      out.push_back(std::move(r));
    }
    for (const auto& t : templates) {
      StaticRule r;
      r.name = std::string(t.name) + "-" + type;
      r.lhs = expand(t.lhs);
      r.rhs = expand(t.rhs);
      r.type = type;
      r.bidirectional = t.both;
      r.shift_vars = t.shifts;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::optional<std::string> check_rule_sound(const StaticRule& rule) {
  std::set<std::string> vars;
  collect_vars(rule.lhs, vars);
  collect_vars(rule.rhs, vars);
  std::vector<std::string> names(vars.begin(), vars.end());
  unsigned w = type_width(rule.type);
  auto is_shift = [&](const std::string& v) {
    return std::find(rule.shift_vars.begin(), rule.shift_vars.end(), v) != rule.shift_vars.end();
  };
  Program lhs(rule.lhs, names, w);
  Program rhs(rule.rhs, names, w);
  std::vector<int64_t> env(names.size());
  auto check = [&]() -> std::optional<std::string> {
    Outcome a = lhs.run(env);
    Outcome b = rhs.run(env);
    if (a.skip || b.skip) return std::nullopt;
    if (a.trap == b.trap && (a.trap || wrap_to_width(a.value, w) == wrap_to_width(b.value, w)))
      return std::nullopt;
    std::ostringstream msg;
    for (size_t i = 0; i < names.size(); ++i) msg << "?" << names[i] << "=" << env[i] << " ";
    msg << "gives " << (a.trap ? std::string("trap") : std::to_string(a.value)) << " vs "
        << (b.trap ? std::string("trap") : std::to_string(b.value));
    return msg.str();
  };
  // Domain size per variable, saturating well above the exhaustive cap.
  constexpr double kExhaustiveCap = double(1 << 24);
  double total = 1;
  for (const auto& n : names) total *= is_shift(n) ? double(w) : std::ldexp(1.0, int(w));
  if (w <= 8 && total <= kExhaustiveCap) {
    std::function<std::optional<std::string>(size_t)> rec =
        [&](size_t i) -> std::optional<std::string> {
      if (i == names.size()) return check();
      int64_t lo = is_shift(names[i]) ? 0 : -(int64_t{1} << (w - 1));
      int64_t hi = is_shift(names[i]) ? int64_t(w) - 1 : (int64_t{1} << (w - 1)) - 1;
      for (int64_t v = lo; v <= hi; ++v) {
        env[i] = v;
        if (auto r = rec(i + 1)) return r;
      }
      return std::nullopt;
    };
    return rec(0);
  }
  std::mt19937_64 rng(0x5eed);
  const int64_t lo = w >= 64 ? INT64_MIN : -(int64_t{1} << (w - 1));
  const int64_t hi = w >= 64 ? INT64_MAX : (int64_t{1} << (w - 1)) - 1;
  std::vector<int64_t> corners = {0, 1, -1, lo, hi, 2};
  for (int s = 0; s < 100000; ++s) {
    for (size_t i = 0; i < names.size(); ++i) {
      if (is_shift(names[i])) {
        env[i] = static_cast<int64_t>(rng() % w);
      } else if (s < 64) {
        env[i] = corners[rng() % corners.size()];
      } else {
        env[i] = wrap_to_width(static_cast<int64_t>(rng()), w);
      }
    }
    if (auto r = check()) return r;
  }
  return std::nullopt;
}

namespace {

void validate_labels(const Term& t, const std::string& type, size_t line) {
  if (is_var(t)) return;
  if (t.is_atom()) {
    auto v = constant_value(t);
    if (!v) throw RuleSyntaxError("unknown atom '" + t.op() + "'", line);
    if (type == "i1" ? t.as_integer().has_value() : !t.as_integer())
      throw RuleSyntaxError("constant '" + t.op() + "' does not fit " + type, line);
    return;
  }
  Label l = classify(t.op());
  if (l.kind != Label::Arith && l.kind != Label::Not)
    throw RuleSyntaxError("unknown operator '" + t.op() + "'", line);
  if (l.type != type)
    throw RuleSyntaxError("operator '" + t.op() + "' is not of type " + type, line);
  if (t.arity() != (l.kind == Label::Not ? 1u : 2u))
    throw RuleSyntaxError("wrong operand count for '" + t.op() + "'", line);
  for (const auto& a : t.args()) validate_labels(a, type, line);
}

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

StaticRule parse_rule(std::string_view text, size_t line) {
  std::string s = trim(text);
  size_t colon = s.rfind(':');
  if (colon == std::string::npos) throw RuleSyntaxError("missing ': TYPE'", line);
  std::string type = trim(s.substr(colon + 1));
  if (!valid_type(type)) throw RuleSyntaxError("bad type '" + type + "'", line);
  std::string body = s.substr(0, colon);
  bool both = true;
  size_t arrow = body.find("<=>");
  size_t arrow_len = 3;
  if (arrow == std::string::npos) {
    arrow = body.find("=>");
    arrow_len = 2;
    both = false;
  }
  if (arrow == std::string::npos) throw RuleSyntaxError("missing '<=>' or '=>'", line);
  StaticRule r;
  try {
    r.lhs = parse_term(body.substr(0, arrow));
    r.rhs = parse_term(body.substr(arrow + arrow_len));
  } catch (const MalformedTerm& e) {
    throw RuleSyntaxError(e.what(), line);
  }
  r.type = type;
  r.bidirectional = both;
  r.name = r.lhs.str() + (both ? " <=> " : " => ") + r.rhs.str();
  if (is_var(r.lhs)) throw RuleSyntaxError("left-hand side is a bare variable", line);
  if (both && is_var(r.rhs)) throw RuleSyntaxError("bidirectional rule with a bare variable side", line);
  validate_labels(r.lhs, type, line);
  validate_labels(r.rhs, type, line);
  std::set<std::string> lv, rv;
  collect_vars(r.lhs, lv);
  collect_vars(r.rhs, rv);
  for (const auto& v : rv)
    if (!lv.count(v)) throw RuleSyntaxError("unbound variable ?" + v + " on the right", line);
  if (both && lv != rv) throw RuleSyntaxError("sides bind different variables", line);
  if (auto witness = check_rule_sound(r)) throw RuleUnsound(r.name, *witness);
  return r;
}

std::vector<StaticRule> parse_rules_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rules file " + path.string());
  std::vector<StaticRule> out;
  std::string line;
  for (size_t n = 1; std::getline(in, line); ++n) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    out.push_back(parse_rule(line, n));
  }
  return out;
}

std::vector<RewriteRule> to_rewrites(const std::vector<StaticRule>& rules) {
  std::vector<RewriteRule> out;
  for (const auto& rule : rules) {
    unsigned w = type_width(rule.type);
    auto guard = [shifts = rule.shift_vars, w](const EGraph& g, const Subst& s) {
      for (const auto& v : shifts) {
        auto c = g.constant_of(s.at(v));
        auto k = c ? constant_value(*c) : std::nullopt;
        if (!k || *k < 0 || *k >= static_cast<int64_t>(w)) return false;
      }
      return true;
    };
    auto make = [&](const std::string& name, const Term& lhs, const Term& rhs) {
      RewriteRule r;
      r.name = name;
      r.lhs = lhs;
      r.rhs = rhs;
      if (!rule.shift_vars.empty()) r.guard = guard;
      if (has_meta(rhs)) {
        std::string type = rule.type;
        r.apply = [rhs, type, w](EGraph& g, const Subst& s) -> std::optional<EClassId> {
          std::function<std::optional<EClassId>(const Term&)> go =
              [&](const Term& t) -> std::optional<EClassId> {
            if (is_var(t)) return s.at(t.op().substr(1));
            if (!t.is_atom() && t.op() == "%sum") {
              int64_t total = 0;
              for (const auto& a : t.args()) {
                auto c = g.constant_of(s.at(a.op().substr(1)));
                if (!c) return std::nullopt;
                total += *constant_value(*c);
              }
              if (total >= static_cast<int64_t>(w)) return std::nullopt;
              return g.add(constant_atom(total, type));
            }
            std::vector<EClassId> kids;
            for (const auto& a : t.args()) {
              auto k = go(a);
              if (!k) return std::nullopt;
              kids.push_back(*k);
            }
            return g.insert(t.op(), kids, t.is_atom());
          };
          return go(rhs);
        };
      }
      out.push_back(std::move(r));
    };
    make(rule.name, rule.lhs, rule.rhs);
    if (rule.bidirectional && !has_meta(rule.rhs)) make(rule.name + "-rev", rule.rhs, rule.lhs);
  }
  return out;
}

std::optional<Term> fold_constant(const std::string& op, const std::vector<Term>& args) {
  std::vector<int64_t> v;
  for (const auto& a : args) {
    auto k = constant_value(a);
    if (!k) return std::nullopt;
    v.push_back(*k);
  }
  Label l = classify(op);
  if (l.kind == Label::Arith && v.size() == 2) {
    auto r = eval_arith(l.op, v[0], v[1], type_width(l.type));
    if (!r) return std::nullopt;
    return constant_atom(*r, l.type);
  }
  if (l.kind == Label::Not && v.size() == 1) return constant_atom(~v[0], l.type);
  if (!is_affine_label(op) || v.empty()) return std::nullopt;
  // Booleans never reach affine labels; guard against mixed encodings anyway.
  for (const auto& a : args)
    if (!a.as_integer()) return std::nullopt;
  try {
    std::vector<Term> ints;
    for (int64_t x : v) ints.push_back(Term::integer(x));
    Term folded = normalize_affine(Term::make(op, ints));
    if (folded.as_integer()) return folded;
  } catch (const Error&) {
  }
  return std::nullopt;
}

}  // namespace hec
