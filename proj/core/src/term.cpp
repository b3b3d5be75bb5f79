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

#include "hec/term.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace hec {

namespace {

constexpr size_t kSizeCap = std::numeric_limits<size_t>::max() / 2;

size_t mix(size_t seed, size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

// Every node is interned, so structurally equal terms share one node and
// equality is a pointer comparison.
std::shared_ptr<const Term::Node> Term::intern(std::shared_ptr<Node> n) {
  static std::mutex mu;
  static std::unordered_multimap<size_t, std::weak_ptr<const Node>> table;
  static size_t purge_at = 1024;
  std::lock_guard<std::mutex> lock(mu);
  auto [lo, hi] = table.equal_range(n->hash);
  for (auto it = lo; it != hi; ++it) {
    auto existing = it->second.lock();
    if (!existing || existing->atom != n->atom || existing->op != n->op ||
        existing->args.size() != n->args.size())
      continue;
    bool same = true;
    for (size_t i = 0; same && i < n->args.size(); ++i)
      same = existing->args[i].node_ == n->args[i].node_;
    if (same) return existing;
  }
  if (table.size() >= purge_at) {
    std::erase_if(table, [](const auto& e) { return e.second.expired(); });
    purge_at = std::max<size_t>(1024, table.size() * 2);
  }
  std::shared_ptr<const Node> out = std::move(n);
  table.emplace(out->hash, out);
  return out;
}

Term::Term() : Term(atom("0")) {}

Term Term::atom(std::string symbol) {
  auto n = std::make_shared<Node>();
  n->hash = mix(std::hash<std::string>{}(symbol), 1);
  n->op = std::move(symbol);
  n->atom = true;
  return Term(intern(std::move(n)));
}

Term Term::integer(int64_t value) { return atom(std::to_string(value)); }

Term Term::make(std::string op, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  size_t h = mix(std::hash<std::string>{}(op), 2 + args.size());
  size_t size = 1;
  for (const auto& a : args) {
    h = mix(h, a.hash());
    size = std::min(kSizeCap, size + a.node_->size);
  }
  n->op = std::move(op);
  n->args = std::move(args);
  n->hash = h;
  n->size = size;
  return Term(intern(std::move(n)));
}

std::optional<int64_t> Term::as_integer() const {
  if (!is_atom()) return std::nullopt;
  const std::string& s = op();
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

size_t Term::tree_size() const { return node_->size; }

bool Term::contains(const Term& sub) const {
  bool found = false;
  walk([&](const Term& t) {
    if (found) return false;
    if (t == sub) found = true;
    return !found && t.node_->size > sub.node_->size;
  });
  return found;
}

Term Term::replace(const Term& from, const Term& to) const {
  return rewrite([&](const Term& t) -> std::optional<Term> {
    if (t == from) return to;
    if (t.is_atom() || t.node_->size <= from.node_->size) return t;
    return std::nullopt;
  });
}

Term Term::rewrite(const std::function<std::optional<Term>(const Term&)>& pre,
                   const std::function<Term(const Term&)>& post) const {
  std::unordered_map<const Node*, Term> memo;
  std::function<Term(const Term&)> go = [&](const Term& t) -> Term {
    auto it = memo.find(t.node_.get());
    if (it != memo.end()) return it->second;
    Term result;
    if (auto r = pre(t)) {
      result = *r;
    } else {
      std::vector<Term> out;
      out.reserve(t.arity());
      bool changed = false;
      for (const auto& a : t.args()) {
        out.push_back(go(a));
        changed |= out.back().node_ != a.node_;
      }
      result = changed ? make(t.op(), std::move(out)) : t;
      if (t.is_atom()) result = t;
      if (post) result = post(result);
    }
    memo.emplace(t.node_.get(), result);
    return result;
  };
  return go(*this);
}

void Term::walk(const std::function<bool(const Term&)>& visit) const {
  std::unordered_set<const Node*> seen;
  std::vector<Term> stack{*this};
  while (!stack.empty()) {
    Term t = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(t.node_.get()).second) continue;
    if (!visit(t)) continue;
    for (size_t i = t.arity(); i-- > 0;) stack.push_back(t.arg(i));
  }
}

std::string Term::str() const {
  if (is_atom()) return op();
  std::string s = "(" + op();
  for (const auto& a : args()) {
    s += ' ';
    s += a.str();
  }
  return s + ")";
}

void Term::pretty_into(std::string& out, size_t indent, size_t width) const {
  std::string flat = node_->size < 64 ? str() : std::string();
  if (is_atom() || (!flat.empty() && indent + flat.size() <= width)) {
    out += flat.empty() ? str() : flat;
    return;
  }
  out += "(" + op();
  for (const auto& a : args()) {
    out += '\n';
    out.append(indent + 2, ' ');
    a.pretty_into(out, indent + 2, width);
  }
  out += ")";
}

std::string Term::pretty(size_t width) const {
  std::string out;
  pretty_into(out, 0, width);
  return out;
}

bool operator==(const Term& a, const Term& b) { return a.node_ == b.node_; }

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (a.node_->atom != b.node_->atom)
    return a.node_->atom ? std::strong_ordering::less
                         : std::strong_ordering::greater;
  if (auto c = a.node_->op <=> b.node_->op; c != 0) return c;
  if (auto c = a.node_->args.size() <=> b.node_->args.size(); c != 0) return c;
  for (size_t i = 0; i < a.node_->args.size(); ++i)
    if (auto c = a.node_->args[i] <=> b.node_->args[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

namespace {

class TermParser {
 public:
  explicit TermParser(std::string_view text) : text_(text) {}

  Term parse_all() {
    Term t = parse();
    skip_space();
    if (pos_ != text_.size()) throw MalformedTerm("trailing input", pos_);
    return t;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string symbol() {
    size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')')
        break;
      ++pos_;
    }
    if (start == pos_) throw MalformedTerm("expected symbol", pos_);
    return std::string(text_.substr(start, pos_ - start));
  }

  Term parse() {
    skip_space();
    if (pos_ >= text_.size()) throw MalformedTerm("unexpected end", pos_);
    if (text_[pos_] == ')') throw MalformedTerm("unexpected ')'", pos_);
    if (text_[pos_] != '(') return Term::atom(symbol());
    ++pos_;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(')
      throw MalformedTerm("operator must be a symbol", pos_);
    std::string op = symbol();
    std::vector<Term> args;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) throw MalformedTerm("unclosed '('", pos_);
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      args.push_back(parse());
    }
    return Term::make(std::move(op), std::move(args));
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace

Term parse_term(std::string_view text) { return TermParser(text).parse_all(); }

}  // namespace hec
