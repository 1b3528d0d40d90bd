// Copyright 2026 The mrtp Authors
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

#include <algorithm>
#include <bit>
#include <unordered_map>

#include "mrtp/error.hpp"
#include "mrtp/ltlf.hpp"

namespace mrtp::ltlf {

Universe::Universe(std::vector<std::string> names) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  if (names_.size() > kMaxUniverse) {
    throw ResourceError("proposition universe has " +
                        std::to_string(names_.size()) + " atoms, limit is " +
                        std::to_string(kMaxUniverse));
  }
}

int Universe::index(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return -1;
  return static_cast<int>(it - names_.begin());
}

AtomSet Universe::mask(const std::set<std::string>& names) const {
  AtomSet m = 0;
  for (const auto& n : names) {
    int i = index(n);
    if (i >= 0) m |= AtomSet{1} << i;
  }
  return m;
}

AtomSet Universe::mask(std::initializer_list<std::string_view> names) const {
  AtomSet m = 0;
  for (auto n : names) {
    int i = index(n);
    if (i >= 0) m |= AtomSet{1} << i;
  }
  return m;
}

std::set<std::string> Universe::names_of(AtomSet set) const {
  std::set<std::string> out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (set >> i & 1) out.insert(names_[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

Formula Formula::make(Op op, std::string atom, const Formula* lhs,
                      const Formula* rhs) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->atom = std::move(atom);
  if (lhs) node->lhs = std::make_shared<const Formula>(*lhs);
  if (rhs) node->rhs = std::make_shared<const Formula>(*rhs);
  return Formula(std::move(node));
}

Formula Formula::True() { return make(Op::kTrue, {}, nullptr, nullptr); }
Formula Formula::False() { return make(Op::kFalse, {}, nullptr, nullptr); }
Formula Formula::Atom(std::string name) {
  return make(Op::kAtom, std::move(name), nullptr, nullptr);
}
Formula Formula::Not(Formula f) { return make(Op::kNot, {}, &f, nullptr); }
Formula Formula::And(Formula f, Formula g) { return make(Op::kAnd, {}, &f, &g); }
Formula Formula::Or(Formula f, Formula g) { return make(Op::kOr, {}, &f, &g); }
Formula Formula::Implies(Formula f, Formula g) {
  return make(Op::kImplies, {}, &f, &g);
}
Formula Formula::Until(Formula f, Formula g) {
  return make(Op::kUntil, {}, &f, &g);
}
Formula Formula::Eventually(Formula f) {
  return make(Op::kEventually, {}, &f, nullptr);
}
Formula Formula::Always(Formula f) { return make(Op::kAlways, {}, &f, nullptr); }

namespace {

bool is_unary(Op op) {
  return op == Op::kNot || op == Op::kEventually || op == Op::kAlways;
}
bool is_binary(Op op) {
  return op == Op::kAnd || op == Op::kOr || op == Op::kImplies ||
         op == Op::kUntil;
}

void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.op() == Op::kAtom) {
    out.insert(f.atom());
  } else if (is_unary(f.op())) {
    collect_atoms(f.operand(), out);
  } else if (is_binary(f.op())) {
    collect_atoms(f.lhs(), out);
    collect_atoms(f.rhs(), out);
  }
}

}  // namespace

std::set<std::string> Formula::atoms() const {
  std::set<std::string> out;
  collect_atoms(*this, out);
  return out;
}

std::size_t Formula::depth() const {
  if (is_unary(op())) return 1 + operand().depth();
  if (is_binary(op())) return 1 + std::max(lhs().depth(), rhs().depth());
  return 0;
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (op() != other.op()) return false;
  if (op() == Op::kAtom) return atom() == other.atom();
  if (is_unary(op())) return operand() == other.operand();
  if (is_binary(op())) return lhs() == other.lhs() && rhs() == other.rhs();
  return true;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
  kEnd,
  kIdent,
  kTrue,
  kFalse,
  kNot,
  kAnd,
  kOr,
  kImplies,
  kUntil,
  kEventually,
  kAlways,
  kNext,
  kLParen,
  kRParen,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (ident_char(c)) {
      while (i < s.size() && ident_char(s[i])) ++i;
      std::string word(s.substr(start, i - start));
      Tok kind = Tok::kIdent;
      if (word == "true") kind = Tok::kTrue;
      else if (word == "false") kind = Tok::kFalse;
      else if (word == "F") kind = Tok::kEventually;
      else if (word == "G") kind = Tok::kAlways;
      else if (word == "U") kind = Tok::kUntil;
      else if (word == "X") kind = Tok::kNext;
      out.push_back({kind, std::move(word), start});
      continue;
    }
    auto two = s.substr(i, 2);
    if (two == "->") {
      out.push_back({Tok::kImplies, "->", start});
      i += 2;
    } else if (two == "<>") {
      out.push_back({Tok::kEventually, "<>", start});
      i += 2;
    } else if (two == "[]") {
      out.push_back({Tok::kAlways, "[]", start});
      i += 2;
    } else if (c == '!') {
      out.push_back({Tok::kNot, "!", start});
      ++i;
    } else if (c == '&') {
      out.push_back({Tok::kAnd, "&", start});
      ++i;
    } else if (c == '|') {
      out.push_back({Tok::kOr, "|", start});
      ++i;
    } else if (c == '(') {
      out.push_back({Tok::kLParen, "(", start});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::kRParen, ")", start});
      ++i;
    } else {
      throw SyntaxError(std::string("unexpected character '") + c + "'", start);
    }
  }
  out.push_back({Tok::kEnd, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula parse() {
    Formula f = implies();
    if (peek().kind != Tok::kEnd) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    if (peek().kind == Tok::kEnd) {
      throw SyntaxError(what.empty() ? "unexpected end of input"
                                     : what + " (end of input)",
                        peek().pos);
    }
    throw SyntaxError(what, peek().pos);
  }

  Formula implies() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::kImplies) {
      take();
      return Formula::Implies(lhs, implies());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (peek().kind == Tok::kOr) {
      take();
      f = Formula::Or(f, conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = until();
    while (peek().kind == Tok::kAnd) {
      take();
      f = Formula::And(f, until());
    }
    return f;
  }

  Formula until() {
    Formula lhs = unary();
    if (peek().kind == Tok::kUntil) {
      take();
      return Formula::Until(lhs, until());
    }
    return lhs;
  }

  Formula unary() {
    switch (peek().kind) {
      case Tok::kNot:
        take();
        return Formula::Not(unary());
      case Tok::kEventually:
        take();
        return Formula::Eventually(unary());
      case Tok::kAlways:
        take();
        return Formula::Always(unary());
      case Tok::kNext:
        fail("unsupported operator 'X'");
      default:
        return primary();
    }
  }

  Formula primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kTrue:
        take();
        return Formula::True();
      case Tok::kFalse:
        take();
        return Formula::False();
      case Tok::kIdent:
        take();
        return Formula::Atom(t.text);
      case Tok::kLParen: {
        take();
        Formula f = implies();
        if (peek().kind != Tok::kRParen) fail("expected ')'");
        take();
        return f;
      }
      case Tok::kEnd:
        fail("");
      default:
        fail("unexpected '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Binding strength used by the printer; larger binds tighter.
int precedence(Op op) {
  switch (op) {
    case Op::kImplies:
      return 1;
    case Op::kOr:
      return 2;
    case Op::kAnd:
      return 3;
    case Op::kUntil:
      return 4;
    case Op::kNot:
    case Op::kEventually:
    case Op::kAlways:
      return 5;
    default:
      return 6;
  }
}

void print(const Formula& f, std::string& out) {
  auto child = [&out](const Formula& c, bool paren) {
    if (paren) out += '(';
    print(c, out);
    if (paren) out += ')';
  };
  int p = precedence(f.op());
  switch (f.op()) {
    case Op::kTrue:
      out += "true";
      return;
    case Op::kFalse:
      out += "false";
      return;
    case Op::kAtom:
      out += f.atom();
      return;
    case Op::kNot:
    case Op::kEventually:
    case Op::kAlways:
      out += f.op() == Op::kNot ? "!" : f.op() == Op::kEventually ? "F " : "G ";
      child(f.operand(), precedence(f.operand().op()) < p);
      return;
    case Op::kAnd:
    case Op::kOr: {
      // Left associative: a right operand of equal precedence needs parens.
      child(f.lhs(), precedence(f.lhs().op()) < p);
      out += f.op() == Op::kAnd ? " & " : " | ";
      child(f.rhs(), precedence(f.rhs().op()) <= p);
      return;
    }
    case Op::kImplies:
    case Op::kUntil: {
      // Right associative.
      child(f.lhs(), precedence(f.lhs().op()) <= p);
      out += f.op() == Op::kImplies ? " -> " : " U ";
      child(f.rhs(), precedence(f.rhs().op()) < p);
      return;
    }
  }
}

}  // namespace

Formula parse_ltlf(std::string_view text) {
  return Parser(tokenize(text)).parse();
}

std::string to_string(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Trace semantics
// ---------------------------------------------------------------------------

namespace {

// Truth of a subformula at every position of the trace, filled backwards.
std::vector<char> eval_positions(const Formula& f, const Universe& u,
                                 std::span<const AtomSet> t) {
  const std::size_t n = t.size();
  std::vector<char> v(n, 0);
  switch (f.op()) {
    case Op::kTrue:
      std::fill(v.begin(), v.end(), 1);
      break;
    case Op::kFalse:
      break;
    case Op::kAtom: {
      int i = u.index(f.atom());
      if (i >= 0) {
        for (std::size_t k = 0; k < n; ++k) v[k] = (t[k] >> i) & 1;
      }
      break;
    }
    case Op::kNot: {
      auto a = eval_positions(f.operand(), u, t);
      for (std::size_t k = 0; k < n; ++k) v[k] = !a[k];
      break;
    }
    case Op::kAnd:
    case Op::kOr:
    case Op::kImplies: {
      auto a = eval_positions(f.lhs(), u, t);
      auto b = eval_positions(f.rhs(), u, t);
      for (std::size_t k = 0; k < n; ++k) {
        if (f.op() == Op::kAnd) v[k] = a[k] && b[k];
        else if (f.op() == Op::kOr) v[k] = a[k] || b[k];
        else v[k] = !a[k] || b[k];
      }
      break;
    }
    case Op::kUntil: {
      auto a = eval_positions(f.lhs(), u, t);
      auto b = eval_positions(f.rhs(), u, t);
      char next = 0;
      for (std::size_t k = n; k-- > 0;) {
        v[k] = b[k] || (a[k] && next);
        next = v[k];
      }
      break;
    }
    case Op::kEventually: {
      auto a = eval_positions(f.operand(), u, t);
      char next = 0;
      for (std::size_t k = n; k-- > 0;) {
        v[k] = a[k] || next;
        next = v[k];
      }
      break;
    }
    case Op::kAlways: {
      auto a = eval_positions(f.operand(), u, t);
      char next = 1;
      for (std::size_t k = n; k-- > 0;) {
        v[k] = a[k] && next;
        next = v[k];
      }
      break;
    }
  }
  return v;
}

bool eval_empty(const Formula& f) {
  switch (f.op()) {
    case Op::kTrue:
      return true;
    case Op::kFalse:
    case Op::kAtom:
    case Op::kUntil:
    case Op::kEventually:
      return false;
    case Op::kAlways:
      return true;
    case Op::kNot:
      return !eval_empty(f.operand());
    case Op::kAnd:
      return eval_empty(f.lhs()) && eval_empty(f.rhs());
    case Op::kOr:
      return eval_empty(f.lhs()) || eval_empty(f.rhs());
    case Op::kImplies:
      return !eval_empty(f.lhs()) || eval_empty(f.rhs());
  }
  return false;
}

}  // namespace

bool eval_trace(const Formula& f, const Universe& universe,
                std::span<const AtomSet> trace) {
  if (trace.empty()) return eval_empty(f);
  return eval_positions(f, universe, trace)[0];
}

bool eval_trace(const Formula& f,
                const std::vector<std::set<std::string>>& trace) {
  std::set<std::string> names = f.atoms();
  for (const auto& s : trace) names.insert(s.begin(), s.end());
  Universe u(std::vector<std::string>(names.begin(), names.end()));
  Trace t;
  t.reserve(trace.size());
  for (const auto& s : trace) t.push_back(u.mask(s));
  return eval_trace(f, u, t);
}

}  // namespace mrtp::ltlf
