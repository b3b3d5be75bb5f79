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

#include "hec/frontend.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hec {

Type Type::memref(std::vector<int64_t> shape, Type element) {
  Type t;
  t.kind = Kind::MemRef;
  t.width = element.is_index() ? 0 : element.width;
  t.shape = std::move(shape);
  return t;
}

Type Type::element() const {
  return width == 0 ? index() : integer(width);
}

std::string Type::str() const {
  switch (kind) {
    case Kind::Int:
      return "i" + std::to_string(width);
    case Kind::Index:
      return "index";
    case Kind::MemRef: {
      std::string s = "memref<";
      for (int64_t d : shape)
        s += (d == kDynamic ? std::string("?") : std::to_string(d)) + "x";
      return s + element().str() + ">";
    }
  }
  return "?";
}

bool operator==(const Operation& a, const Operation& b) {
  return a.kind == b.kind && a.name == b.name && a.result == b.result &&
         a.operands == b.operands && a.type == b.type && a.value == b.value &&
         a.memref == b.memref && a.memref_type == b.memref_type &&
         a.map == b.map && a.iv == b.iv && a.lower == b.lower &&
         a.upper == b.upper && a.step == b.step && a.body == b.body &&
         a.condition == b.condition && a.else_body == b.else_body &&
         a.has_else == b.has_else;
}

const Function* ProgramModule::find_function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

int64_t wrap_to_width(int64_t value, unsigned width) {
  if (width == 0 || width >= 64) return value;
  uint64_t mask = (uint64_t{1} << width) - 1;
  uint64_t u = static_cast<uint64_t>(value) & mask;
  if (u >> (width - 1)) u |= ~mask;
  return static_cast<int64_t>(u);
}

std::optional<int64_t> eval_arith(std::string_view op, int64_t a, int64_t b, unsigned width) {
  unsigned w = width == 0 ? 64 : width;
  a = wrap_to_width(a, w);
  b = wrap_to_width(b, w);
  uint64_t ua = static_cast<uint64_t>(a);
  uint64_t ub = static_cast<uint64_t>(b);
  uint64_t r;
  if (op == "addi") {
    r = ua + ub;
  } else if (op == "subi") {
    r = ua - ub;
  } else if (op == "muli") {
    r = ua * ub;
  } else if (op == "andi") {
    r = ua & ub;
  } else if (op == "ori") {
    r = ua | ub;
  } else if (op == "xori") {
    r = ua ^ ub;
  } else if (op == "divsi") {
    if (b == 0) return std::nullopt;
    if (w == 1) {
      // The only nonzero i1 divisor is -1.
      r = static_cast<uint64_t>(-a);
    } else if (a == INT64_MIN && b == -1) {
      r = ua;
    } else {
      r = static_cast<uint64_t>(a / b);
    }
  } else if (op == "shli" || op == "shrsi") {
    uint64_t amount = w == 64 ? ub : ub & ((uint64_t{1} << w) - 1);
    if (amount >= w) return std::nullopt;
    r = op == "shli" ? ua << amount : static_cast<uint64_t>(a >> amount);
  } else {
    throw Error("unknown arith op " + std::string(op));
  }
  return wrap_to_width(static_cast<int64_t>(r), w);
}

// ---------------------------------------------------------------- lexer

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '$';
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    SourceLoc loc{line, col};
    size_t start = i;
    TokenKind kind;
    if (c == '%' || c == '@' || c == '#') {
      size_t j = i + 1;
      while (j < text.size() && ident_char(text[j])) ++j;
      if (j == i + 1) throw IllegalCharacter(std::string("stray '") + c + "'", loc);
      kind = c == '%' ? TokenKind::SsaId
                      : c == '@' ? TokenKind::SymbolRef : TokenKind::HashRef;
      advance(j - i);
    } else if (ident_start(c)) {
      size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      kind = TokenKind::Identifier;
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      if (c == '0' && i + 1 < text.size() && (text[i + 1] == 'x')) {
        j += 2;
        while (j < text.size() && std::isxdigit(static_cast<unsigned char>(text[j]))) ++j;
      } else {
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      kind = TokenKind::Integer;
      advance(j - i);
    } else {
      static const char* two[] = {"->", ">=", "=="};
      size_t len = 0;
      for (const char* p : two)
        if (text.substr(i, 2) == p) len = 2;
      if (!len) {
        if (std::string_view("(){}[]<>,:=+-*?").find(c) == std::string_view::npos)
          throw IllegalCharacter(std::string("illegal character '") + c + "'", loc);
        len = 1;
      }
      kind = TokenKind::Punct;
      advance(len);
    }
    out.push_back({kind, std::string(text.substr(start, i - start)), loc});
  }
  return out;
}

// ---------------------------------------------------------------- parser

namespace {

const std::set<std::string> kBinaryOps = {
    "arith.addi", "arith.subi", "arith.muli",  "arith.divsi", "arith.andi",
    "arith.ori",  "arith.xori", "arith.shli", "arith.shrsi"};

struct Resolver {
  std::function<AffineExpr(const Token&)> name;
  std::function<AffineExpr(const Token&)> symbol;
};

class Parser {
 public:
  explicit Parser(const std::vector<Token>& toks) : toks_(toks) {
    end_.kind = TokenKind::End;
    end_.text = "<end of input>";
    if (!toks.empty()) end_.loc = toks.back().loc;
  }

  ProgramModule run() {
    while (peek().kind != TokenKind::End) {
      if (is_ident("module")) {
        take();
        expect_punct("{");
        while (!is_punct("}")) {
          if (peek().kind == TokenKind::End) fail("'}'");
          top_level();
        }
        take();
      } else {
        top_level();
      }
    }
    return std::move(mod_);
  }

 private:
  const Token& peek(size_t k = 0) const {
    return pos_ + k < toks_.size() ? toks_[pos_ + k] : end_;
  }
  bool is_punct(const char* p, size_t k = 0) const {
    return peek(k).kind == TokenKind::Punct && peek(k).text == p;
  }
  bool is_ident(const char* s, size_t k = 0) const {
    return peek(k).kind == TokenKind::Identifier && peek(k).text == s;
  }
  const Token& take() {
    const Token& t = peek();
    if (pos_ < toks_.size()) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError("expected " + expected + ", found '" + peek().text + "'",
                      peek().loc);
  }
  void expect_punct(const char* p) {
    if (!is_punct(p)) fail(std::string("'") + p + "'");
    take();
  }
  void expect_ident(const char* s) {
    if (!is_ident(s)) fail(std::string("'") + s + "'");
    take();
  }
  const Token& expect_kind(TokenKind k, const char* what) {
    if (peek().kind != k) fail(what);
    return take();
  }

  int64_t parse_integer() {
    bool neg = false;
    if (is_punct("-")) {
      take();
      neg = true;
    }
    const Token& t = expect_kind(TokenKind::Integer, "integer");
    uint64_t v = 0;
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    int base = 10;
    if (t.text.size() > 2 && t.text[1] == 'x') {
      b += 2;
      base = 16;
    }
    auto [p, ec] = std::from_chars(b, e, v, base);
    if (ec != std::errc() || p != e)
      throw SyntaxError("integer out of range '" + t.text + "'", t.loc);
    if (!neg && v > uint64_t(INT64_MAX))
      throw SyntaxError("integer out of range '" + t.text + "'", t.loc);
    if (neg && v > uint64_t(INT64_MAX) + 1)
      throw SyntaxError("integer out of range '-" + t.text + "'", t.loc);
    return neg ? static_cast<int64_t>(0 - v) : static_cast<int64_t>(v);
  }

  Type parse_scalar_type(const std::string& text, SourceLoc loc) {
    if (text == "index") return Type::index();
    if (text.size() > 1 && text[0] == 'i') {
      unsigned w = 0;
      auto [p, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), w);
      if (ec == std::errc() && p == text.data() + text.size() && w >= 1 && w <= 64)
        return Type::integer(w);
    }
    throw SyntaxError("expected type, found '" + text + "'", loc);
  }

  Type parse_type() {
    const Token& t = expect_kind(TokenKind::Identifier, "type");
    if (t.text != "memref") return parse_scalar_type(t.text, t.loc);
    expect_punct("<");
    std::string raw;
    SourceLoc loc = peek().loc;
    while (!is_punct(">")) {
      if (peek().kind == TokenKind::End) fail("'>'");
      raw += take().text;
    }
    take();
    std::vector<int64_t> shape;
    size_t start = 0;
    for (;;) {
      size_t x = raw.find('x', start);
      if (x == std::string::npos) break;
      std::string dim = raw.substr(start, x - start);
      if (dim == "?") {
        shape.push_back(Type::kDynamic);
      } else {
        int64_t d = 0;
        auto [p, ec] = std::from_chars(dim.data(), dim.data() + dim.size(), d);
        if (ec != std::errc() || p != dim.data() + dim.size() || d <= 0)
          throw SyntaxError("bad memref extent '" + dim + "'", loc);
        shape.push_back(d);
      }
      start = x + 1;
    }
    if (shape.empty()) throw SyntaxError("memref needs a shape", loc);
    Type elem = parse_scalar_type(raw.substr(start), loc);
    return Type::memref(std::move(shape), elem);
  }

  // ------------------------------------------------------------ affine

  AffineExpr affine_primary(const Resolver& r) {
    if (is_punct("-")) {
      take();
      return AffineExpr::mul(affine_primary(r), AffineExpr::constant(-1));
    }
    if (is_punct("(")) {
      take();
      AffineExpr e = affine_expr(r);
      expect_punct(")");
      return e;
    }
    if (peek().kind == TokenKind::Integer) return AffineExpr::constant(parse_integer());
    if (is_ident("symbol") && is_punct("(", 1) && r.symbol) {
      take();
      take();
      AffineExpr e = r.symbol(expect_kind(TokenKind::SsaId, "SSA value"));
      expect_punct(")");
      return e;
    }
    if (peek().kind == TokenKind::Identifier || peek().kind == TokenKind::SsaId)
      return r.name(take());
    fail("affine expression");
  }

  AffineExpr affine_term(const Resolver& r) {
    AffineExpr lhs = affine_primary(r);
    for (;;) {
      SourceLoc loc = peek().loc;
      if (is_punct("*")) {
        take();
        AffineExpr rhs = affine_primary(r);
        if (!lhs.is_constant() && !rhs.is_constant())
          throw SyntaxError("non-affine product", loc);
        lhs = AffineExpr::mul(lhs, rhs);
      } else if (is_ident("floordiv") || is_ident("ceildiv") || is_ident("mod")) {
        std::string op = take().text;
        AffineExpr rhs = affine_primary(r);
        if (!rhs.is_constant() || rhs.value() <= 0)
          throw SyntaxError(op + " needs a positive constant divisor", loc);
        lhs = op == "floordiv" ? AffineExpr::floor_div(lhs, rhs.value())
              : op == "ceildiv" ? AffineExpr::ceil_div(lhs, rhs.value())
                                : AffineExpr::mod(lhs, rhs.value());
      } else {
        return lhs;
      }
    }
  }

  AffineExpr affine_expr(const Resolver& r) {
    AffineExpr lhs = affine_term(r);
    for (;;) {
      if (is_punct("+")) {
        take();
        lhs = lhs + affine_term(r);
      } else if (is_punct("-")) {
        take();
        lhs = lhs - affine_term(r);
      } else {
        return lhs;
      }
    }
  }

  // Parses `(d0, d1)[s0]` and returns a resolver for those names.
  Resolver map_header(unsigned* num_dims, unsigned* num_symbols) {
    auto names = std::make_shared<std::map<std::string, AffineExpr>>();
    auto read = [&](const char* close, bool symbols) {
      unsigned n = 0;
      while (!is_punct(close)) {
        if (n) expect_punct(",");
        const Token& t = expect_kind(TokenKind::Identifier, "identifier");
        if (names->count(t.text))
          throw SyntaxError("duplicate map operand '" + t.text + "'", t.loc);
        names->emplace(t.text, symbols ? AffineExpr::symbol(n) : AffineExpr::dim(n));
        ++n;
      }
      take();
      return n;
    };
    expect_punct("(");
    *num_dims = read(")", false);
    *num_symbols = 0;
    if (is_punct("[")) {
      take();
      *num_symbols = read("]", true);
    }
    Resolver r;
    r.name = [names](const Token& t) {
      auto it = names->find(t.text);
      if (it == names->end())
        throw SyntaxError("unknown map operand '" + t.text + "'", t.loc);
      return it->second;
    };
    return r;
  }

  AffineMap map_body() {
    AffineMap m;
    Resolver r = map_header(&m.num_dims, &m.num_symbols);
    expect_punct("->");
    expect_punct("(");
    do {
      if (!m.results.empty()) take();
      m.results.push_back(affine_expr(r));
    } while (is_punct(","));
    expect_punct(")");
    return m;
  }

  IntegerSetUse set_body() {
    IntegerSetUse s;
    Resolver r = map_header(&s.num_dims, &s.num_symbols);
    expect_punct(":");
    expect_punct("(");
    do {
      if (!s.constraints.empty()) take();
      AffineExpr lhs = affine_expr(r);
      bool eq = is_punct("==");
      if (!eq && !is_punct(">=")) fail("'>=' or '=='");
      take();
      AffineExpr rhs = affine_expr(r);
      s.constraints.push_back({rhs.is_constant() && rhs.value() == 0 ? lhs : lhs - rhs, eq});
    } while (is_punct(","));
    expect_punct(")");
    return s;
  }

  void top_level() {
    if (peek().kind == TokenKind::HashRef) {
      Token name = take();
      expect_punct("=");
      if (maps_.count(name.text) || sets_.count(name.text))
        throw SyntaxError("redefinition of " + name.text, name.loc);
      if (is_ident("affine_map")) {
        take();
        expect_punct("<");
        AffineMap m = map_body();
        expect_punct(">");
        maps_[name.text] = m;
        mod_.maps.emplace_back(name.text, m);
      } else if (is_ident("affine_set")) {
        take();
        expect_punct("<");
        IntegerSetUse s = set_body();
        expect_punct(">");
        sets_[name.text] = s;
        mod_.sets.emplace_back(name.text, s);
      } else {
        fail("'affine_map' or 'affine_set'");
      }
      return;
    }
    if (is_ident("func.func") || is_ident("func")) {
      mod_.functions.push_back(function());
      return;
    }
    if (peek().kind == TokenKind::Identifier && peek().text.find('.') != std::string::npos)
      throw UnsupportedOperation(peek().text, peek().loc);
    fail("'func.func' or map definition");
  }

  // ------------------------------------------------------------ values

  Type lookup(const Token& t) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(t.text);
      if (f != it->end()) return f->second;
    }
    throw SyntaxError("use of undefined value " + t.text, t.loc);
  }

  void define(const std::string& name, Type type, SourceLoc loc) {
    for (const auto& scope : scopes_)
      if (scope.count(name)) throw SyntaxError("redefinition of " + name, loc);
    scopes_.back()[name] = type;
  }

  std::string use(TokenKind k = TokenKind::SsaId) {
    const Token& t = expect_kind(k, "SSA value");
    lookup(t);
    return t.text;
  }

  std::string index_use() {
    const Token& t = expect_kind(TokenKind::SsaId, "SSA value");
    if (!lookup(t).is_index())
      throw SyntaxError(t.text + " is not of index type", t.loc);
    return t.text;
  }

  std::vector<std::string> operand_list(const char* open, const char* close) {
    std::vector<std::string> out;
    if (!is_punct(open)) return out;
    take();
    while (!is_punct(close)) {
      if (!out.empty()) expect_punct(",");
      out.push_back(index_use());
    }
    take();
    return out;
  }

  MapUse map_use() {
    MapUse u;
    SourceLoc loc = peek().loc;
    if (peek().kind == TokenKind::HashRef) {
      const Token& t = take();
      auto it = maps_.find(t.text);
      if (it == maps_.end()) throw SyntaxError("undefined map " + t.text, t.loc);
      u.map = it->second;
      u.map_name = t.text;
    } else if (is_ident("affine_map")) {
      take();
      expect_punct("<");
      u.map = map_body();
      expect_punct(">");
    } else {
      fail("affine map");
    }
    u.dims = operand_list("(", ")");
    u.symbols = operand_list("[", "]");
    if (u.dims.size() != u.map.num_dims || u.symbols.size() != u.map.num_symbols)
      throw SyntaxError("map operand count mismatch", loc);
    return u;
  }

  MapUse bound(bool lower) {
    SourceLoc loc = peek().loc;
    MapUse u;
    if (peek().kind == TokenKind::Integer || is_punct("-")) {
      u.map.results.push_back(AffineExpr::constant(parse_integer()));
      return u;
    }
    if (peek().kind == TokenKind::SsaId) {
      u.symbols.push_back(index_use());
      u.map.num_symbols = 1;
      u.map.results.push_back(AffineExpr::symbol(0));
      return u;
    }
    bool keyword = false;
    if (is_ident(lower ? "max" : "min")) {
      take();
      keyword = true;
    }
    u = map_use();
    if (u.map.results.empty() || (u.map.results.size() > 1 && !keyword))
      throw SyntaxError(std::string("multi-result bound needs '") +
                            (lower ? "max" : "min") + "'",
                        loc);
    return u;
  }

  // Index list `[%i + 1, %j]` as a map over the SSA values it mentions.
  MapUse index_list(size_t rank, SourceLoc loc) {
    MapUse u;
    Resolver r;
    r.name = [&](const Token& t) {
      if (t.kind != TokenKind::SsaId) throw SyntaxError("expected SSA value, found '" + t.text + "'", t.loc);
      if (!lookup(t).is_index())
        throw SyntaxError(t.text + " is not of index type", t.loc);
      for (size_t i = 0; i < u.dims.size(); ++i)
        if (u.dims[i] == t.text) return AffineExpr::dim(i);
      u.dims.push_back(t.text);
      return AffineExpr::dim(u.dims.size() - 1);
    };
    r.symbol = [&](const Token& t) {
      if (!lookup(t).is_index())
        throw SyntaxError(t.text + " is not of index type", t.loc);
      for (size_t i = 0; i < u.symbols.size(); ++i)
        if (u.symbols[i] == t.text) return AffineExpr::symbol(i);
      u.symbols.push_back(t.text);
      return AffineExpr::symbol(u.symbols.size() - 1);
    };
    expect_punct("[");
    while (!is_punct("]")) {
      if (!u.map.results.empty()) expect_punct(",");
      AffineExpr e = affine_expr(r);
      if (e.contains_min_max()) throw SyntaxError("min/max in memory index", loc);
      u.map.results.push_back(e);
    }
    take();
    u.map.num_dims = u.dims.size();
    u.map.num_symbols = u.symbols.size();
    if (u.map.results.size() != rank)
      throw SyntaxError("index count does not match memref rank", loc);
    return u;
  }

  Type memref_operand(std::string* name) {
    const Token& t = expect_kind(TokenKind::SsaId, "memref");
    Type ty = lookup(t);
    if (!ty.is_memref()) throw SyntaxError(t.text + " is not a memref", t.loc);
    *name = t.text;
    return ty;
  }

  void check_memref_annotation(const Type& actual) {
    SourceLoc loc = peek().loc;
    expect_punct(":");
    if (!(parse_type() == actual))
      throw SyntaxError("memref type mismatch, value has " + actual.str(), loc);
  }

  // ------------------------------------------------------------ ops

  std::vector<Operation> region() {
    expect_punct("{");
    scopes_.emplace_back();
    std::vector<Operation> ops;
    while (!is_punct("}")) {
      if (peek().kind == TokenKind::End) fail("'}'");
      if (auto op = operation()) ops.push_back(std::move(*op));
    }
    take();
    scopes_.pop_back();
    return ops;
  }

  std::optional<Operation> operation() {
    Operation op;
    op.loc = peek().loc;
    Token result;
    if (peek().kind == TokenKind::SsaId && is_punct("=", 1)) {
      result = take();
      take();
    }
    const Token& name_tok = expect_kind(TokenKind::Identifier, "operation name");
    op.name = name_tok.text;
    auto no_result = [&] {
      if (!result.text.empty())
        throw SyntaxError(op.name + " has no result", result.loc);
    };
    auto need_result = [&] {
      if (result.text.empty()) throw SyntaxError(op.name + " needs a result", op.loc);
      op.result = result.text;
    };

    if (op.name == "arith.constant") {
      need_result();
      op.kind = OpKind::Constant;
      if (is_ident("true") || is_ident("false")) {
        op.value = take().text == "true" ? -1 : 0;
        op.type = Type::integer(1);
        if (is_punct(":")) {
          take();
          SourceLoc loc = peek().loc;
          if (!(parse_type() == Type::integer(1)))
            throw SyntaxError("boolean constant must be i1", loc);
        }
      } else {
        int64_t v = parse_integer();
        expect_punct(":");
        SourceLoc loc = peek().loc;
        op.type = parse_type();
        if (op.type.is_memref()) throw SyntaxError("constant of memref type", loc);
        op.value = op.type.is_int() ? wrap_to_width(v, op.type.width) : v;
      }
      define(op.result, op.type, op.loc);
    } else if (kBinaryOps.count(op.name)) {
      need_result();
      op.kind = OpKind::Binary;
      std::vector<Token> args;
      args.push_back(expect_kind(TokenKind::SsaId, "SSA value"));
      expect_punct(",");
      args.push_back(expect_kind(TokenKind::SsaId, "SSA value"));
      expect_punct(":");
      SourceLoc loc = peek().loc;
      op.type = parse_type();
      if (op.type.is_memref()) throw SyntaxError("arith on memref", loc);
      for (const auto& a : args) {
        if (!(lookup(a) == op.type))
          throw SyntaxError("operand " + a.text + " is not " + op.type.str(), a.loc);
        op.operands.push_back(a.text);
      }
      define(op.result, op.type, op.loc);
    } else if (op.name == "affine.load") {
      need_result();
      op.kind = OpKind::Load;
      op.memref_type = memref_operand(&op.memref);
      op.map = index_list(op.memref_type.shape.size(), op.loc);
      check_memref_annotation(op.memref_type);
      op.type = op.memref_type.element();
      define(op.result, op.type, op.loc);
    } else if (op.name == "affine.store") {
      no_result();
      op.kind = OpKind::Store;
      Token v = expect_kind(TokenKind::SsaId, "SSA value");
      Type vt = lookup(v);
      op.operands.push_back(v.text);
      expect_punct(",");
      op.memref_type = memref_operand(&op.memref);
      op.map = index_list(op.memref_type.shape.size(), op.loc);
      check_memref_annotation(op.memref_type);
      op.type = op.memref_type.element();
      if (!(vt == op.type))
        throw SyntaxError("stored value " + v.text + " is not " + op.type.str(), v.loc);
    } else if (op.name == "affine.apply") {
      need_result();
      op.kind = OpKind::Apply;
      op.map = map_use();
      if (op.map.map.results.size() != 1)
        throw SyntaxError("affine.apply needs a single-result map", op.loc);
      op.type = Type::index();
      define(op.result, op.type, op.loc);
    } else if (op.name == "affine.for") {
      no_result();
      op.kind = OpKind::For;
      const Token& iv = expect_kind(TokenKind::SsaId, "induction variable");
      op.iv = iv.text;
      expect_punct("=");
      op.lower = bound(true);
      expect_ident("to");
      op.upper = bound(false);
      if (is_ident("step")) {
        take();
        SourceLoc loc = peek().loc;
        op.step = parse_integer();
        if (op.step < 1) throw SyntaxError("step must be positive", loc);
      }
      scopes_.emplace_back();
      define(op.iv, Type::index(), iv.loc);
      op.body = region();
      scopes_.pop_back();
    } else if (op.name == "affine.if") {
      no_result();
      op.kind = OpKind::If;
      SourceLoc loc = peek().loc;
      if (peek().kind == TokenKind::HashRef) {
        const Token& t = take();
        auto it = sets_.find(t.text);
        if (it == sets_.end()) throw SyntaxError("undefined set " + t.text, t.loc);
        op.condition = it->second;
        op.condition.set_name = t.text;
      } else if (is_ident("affine_set")) {
        take();
        expect_punct("<");
        op.condition = set_body();
        expect_punct(">");
      } else {
        fail("integer set");
      }
      op.condition.dims = operand_list("(", ")");
      op.condition.symbols = operand_list("[", "]");
      if (op.condition.dims.size() != op.condition.num_dims ||
          op.condition.symbols.size() != op.condition.num_symbols)
        throw SyntaxError("set operand count mismatch", loc);
      op.body = region();
      if (is_ident("else")) {
        take();
        op.has_else = true;
        op.else_body = region();
      }
    } else if (op.name == "return" || op.name == "func.return") {
      no_result();
      op.kind = OpKind::Return;
      op.name = "return";
      std::vector<Token> vals;
      if (peek().kind == TokenKind::SsaId) {
        vals.push_back(take());
        while (is_punct(",")) {
          take();
          vals.push_back(expect_kind(TokenKind::SsaId, "SSA value"));
        }
        expect_punct(":");
        for (size_t i = 0; i < vals.size(); ++i) {
          if (i) expect_punct(",");
          SourceLoc loc = peek().loc;
          if (!(lookup(vals[i]) == parse_type()))
            throw SyntaxError("return type mismatch for " + vals[i].text, loc);
          op.operands.push_back(vals[i].text);
        }
      }
      if (scopes_.size() != 2)
        throw SyntaxError("return inside a nested region", op.loc);
      if (op.operands.size() != current_results_->size())
        throw SyntaxError("return arity does not match function results", op.loc);
      for (size_t i = 0; i < vals.size(); ++i)
        if (!(lookup(vals[i]) == (*current_results_)[i]))
          throw SyntaxError("returned value " + vals[i].text + " has the wrong type",
                            vals[i].loc);
    } else if (op.name == "affine.yield") {
      no_result();
      return std::nullopt;
    } else {
      throw UnsupportedOperation(op.name, name_tok.loc);
    }
    return op;
  }

  Function function() {
    Function f;
    f.loc = peek().loc;
    take();
    f.name = expect_kind(TokenKind::SymbolRef, "function name").text.substr(1);
    for (const auto& g : mod_.functions)
      if (g.name == f.name) throw SyntaxError("redefinition of @" + f.name, f.loc);
    scopes_.clear();
    scopes_.emplace_back();
    expect_punct("(");
    while (!is_punct(")")) {
      if (!f.args.empty()) expect_punct(",");
      Argument a;
      const Token& t = expect_kind(TokenKind::SsaId, "argument");
      a.name = t.text;
      expect_punct(":");
      a.type = parse_type();
      define(a.name, a.type, t.loc);
      f.args.push_back(std::move(a));
    }
    take();
    if (is_punct("->")) {
      take();
      if (is_punct("(")) {
        take();
        while (!is_punct(")")) {
          if (!f.results.empty()) expect_punct(",");
          f.results.push_back(parse_type());
        }
        take();
      } else {
        f.results.push_back(parse_type());
      }
    }
    current_results_ = &f.results;
    f.body = region();
    current_results_ = nullptr;
    bool returns = !f.body.empty() && f.body.back().kind == OpKind::Return;
    if (!returns && !f.results.empty())
      throw SyntaxError("function @" + f.name + " must end with return", f.loc);
    for (size_t i = 0; i + 1 < f.body.size(); ++i)
      if (f.body[i].kind == OpKind::Return)
        throw SyntaxError("return must be the last operation", f.body[i].loc);
    if (!returns) {
      Operation r;
      r.kind = OpKind::Return;
      r.name = "return";
      r.loc = f.loc;
      f.body.push_back(std::move(r));
    }
    return f;
  }

  const std::vector<Token>& toks_;
  size_t pos_ = 0;
  Token end_;
  std::map<std::string, AffineMap> maps_;
  std::map<std::string, IntegerSetUse> sets_;
  std::vector<std::map<std::string, Type>> scopes_;
  const std::vector<Type>* current_results_ = nullptr;
  ProgramModule mod_;
};

}  // namespace

ProgramModule parse_module(const std::vector<Token>& tokens) {
  return Parser(tokens).run();
}

ProgramModule parse_module_text(std::string_view text) {
  return parse_module(tokenize(text));
}

ProgramModule parse_module_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_module_text(ss.str());
}

// ---------------------------------------------------------------- printer

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

std::string map_text(const AffineMap& m) { return m.str(); }

std::string set_text(const IntegerSetUse& s) {
  std::string out = "(";
  for (unsigned i = 0; i < s.num_dims; ++i)
    out += (i ? ", d" : "d") + std::to_string(i);
  out += ")";
  if (s.num_symbols) {
    out += "[";
    for (unsigned i = 0; i < s.num_symbols; ++i)
      out += (i ? ", s" : "s") + std::to_string(i);
    out += "]";
  }
  out += " : (";
  for (size_t i = 0; i < s.constraints.size(); ++i) {
    out += (i ? ", " : "") + s.constraints[i].expr.str() +
           (s.constraints[i].equality ? " == 0" : " >= 0");
  }
  return out + ")";
}

class Printer {
 public:
  explicit Printer(const ProgramModule& m) : mod_(m) {}

  std::string run() {
    for (const auto& [name, map] : mod_.maps)
      out_ << name << " = affine_map<" << map_text(map) << ">\n";
    for (const auto& [name, set] : mod_.sets)
      out_ << name << " = affine_set<" << set_text(set) << ">\n";
    for (const auto& f : mod_.functions) function(f);
    return out_.str();
  }

 private:
  bool named_map(const MapUse& u) const {
    for (const auto& [name, map] : mod_.maps)
      if (name == u.map_name && map == u.map) return true;
    return false;
  }

  std::string map_use(const MapUse& u) const {
    std::string s = named_map(u) ? u.map_name
                                 : "affine_map<" + map_text(u.map) + ">";
    s += "(" + join(u.dims) + ")";
    if (!u.symbols.empty()) s += "[" + join(u.symbols) + "]";
    return s;
  }

  std::string bound(const MapUse& u, bool lower) const {
    if (u.dims.empty() && u.symbols.empty() && u.map.results.size() == 1 &&
        u.map.results[0].is_constant())
      return std::to_string(u.map.results[0].value());
    if (u.map.results.size() == 1 && u.dims.size() + u.symbols.size() == 1) {
      const AffineExpr& r = u.map.results[0];
      if (r.kind() == AffineKind::Symbol && !u.symbols.empty()) return u.symbols[0];
    }
    std::string prefix = u.map.results.size() > 1 ? (lower ? "max " : "min ") : "";
    return prefix + map_use(u);
  }

  std::string indices(const MapUse& u) const {
    std::string s = "[";
    for (size_t i = 0; i < u.map.results.size(); ++i) {
      if (i) s += ", ";
      s += u.map.results[i].str([&](AffineKind k, unsigned pos) {
        return k == AffineKind::Dim ? u.dims.at(pos)
                                    : "symbol(" + u.symbols.at(pos) + ")";
      });
    }
    return s + "]";
  }

  void line(int depth, const std::string& text) {
    out_ << std::string(2 * depth, ' ') << text << "\n";
  }

  void ops(const std::vector<Operation>& body, int depth) {
    for (const auto& op : body) operation(op, depth);
  }

  void operation(const Operation& op, int depth) {
    switch (op.kind) {
      case OpKind::Constant:
        if (op.type == Type::integer(1))
          line(depth, op.result + " = arith.constant " + (op.value ? "true" : "false"));
        else
          line(depth, op.result + " = arith.constant " + std::to_string(op.value) +
                          " : " + op.type.str());
        break;
      case OpKind::Binary:
        line(depth, op.result + " = " + op.name + " " + join(op.operands) + " : " +
                        op.type.str());
        break;
      case OpKind::Load:
        line(depth, op.result + " = affine.load " + op.memref + indices(op.map) +
                        " : " + op.memref_type.str());
        break;
      case OpKind::Store:
        line(depth, "affine.store " + op.operands[0] + ", " + op.memref +
                        indices(op.map) + " : " + op.memref_type.str());
        break;
      case OpKind::Apply:
        line(depth, op.result + " = affine.apply " + map_use(op.map));
        break;
      case OpKind::For: {
        std::string s = "affine.for " + op.iv + " = " + bound(op.lower, true) +
                        " to " + bound(op.upper, false);
        if (op.step != 1) s += " step " + std::to_string(op.step);
        line(depth, s + " {");
        ops(op.body, depth + 1);
        line(depth, "}");
        break;
      }
      case OpKind::If: {
        const auto& c = op.condition;
        bool named = false;
        for (const auto& [name, set] : mod_.sets)
          named |= name == c.set_name && set == c;
        std::string s = "affine.if " +
                        (named ? c.set_name : "affine_set<" + set_text(c) + ">") +
                        "(" + join(c.dims) + ")";
        if (!c.symbols.empty()) s += "[" + join(c.symbols) + "]";
        line(depth, s + " {");
        ops(op.body, depth + 1);
        if (op.has_else) {
          line(depth, "} else {");
          ops(op.else_body, depth + 1);
        }
        line(depth, "}");
        break;
      }
      case OpKind::Return: {
        std::string s = "return";
        if (!op.operands.empty()) {
          s += " " + join(op.operands) + " :";
          for (size_t i = 0; i < op.operands.size(); ++i)
            s += (i ? ", " : " ") + result_types_->at(i).str();
        }
        line(depth, s);
        break;
      }
    }
  }

  void function(const Function& f) {
    std::string s = "func.func @" + f.name + "(";
    for (size_t i = 0; i < f.args.size(); ++i)
      s += (i ? ", " : "") + f.args[i].name + ": " + f.args[i].type.str();
    s += ")";
    if (!f.results.empty()) {
      s += " -> (";
      for (size_t i = 0; i < f.results.size(); ++i)
        s += (i ? ", " : "") + f.results[i].str();
      s += ")";
    }
    line(0, s + " {");
    result_types_ = &f.results;
    ops(f.body, 1);
    line(0, "}");
  }

  const ProgramModule& mod_;
  const std::vector<Type>* result_types_ = nullptr;
  std::ostringstream out_;
};

}  // namespace

std::string print_module(const ProgramModule& module) {
  return Printer(module).run();
}

}  // namespace hec
