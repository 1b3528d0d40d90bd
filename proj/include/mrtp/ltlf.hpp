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

#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrtp::ltlf {

// ---------------------------------------------------------------------------
// Propositions
// ---------------------------------------------------------------------------

// Set of atoms held true at one trace position, as a bit mask over a
// Universe. Bit i corresponds to universe.name(i).
using AtomSet = std::uint64_t;
using Trace = std::vector<AtomSet>;

inline constexpr std::size_t kMaxUniverse = 64;

// Ordered list of proposition names. Names are kept sorted so two universes
// built from the same names index them identically.
class Universe {
 public:
  Universe() = default;
  explicit Universe(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }

  // -1 when absent.
  int index(std::string_view name) const;
  bool contains(std::string_view name) const { return index(name) >= 0; }

  // Unknown names are ignored.
  AtomSet mask(const std::set<std::string>& names) const;
  AtomSet mask(std::initializer_list<std::string_view> names) const;
  std::set<std::string> names_of(AtomSet set) const;

  bool operator==(const Universe& other) const = default;

 private:
  std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

enum class Op {
  kTrue,
  kFalse,
  kAtom,
  kNot,
  kAnd,
  kOr,
  kImplies,
  kUntil,
  kEventually,
  kAlways,
};

// Immutable LTLf syntax tree. Copies share structure.
class Formula {
 public:
  static Formula True();
  static Formula False();
  static Formula Atom(std::string name);
  static Formula Not(Formula f);
  static Formula And(Formula f, Formula g);
  static Formula Or(Formula f, Formula g);
  static Formula Implies(Formula f, Formula g);
  static Formula Until(Formula f, Formula g);
  static Formula Eventually(Formula f);
  static Formula Always(Formula f);

  Op op() const { return node_->op; }
  const std::string& atom() const { return node_->atom; }
  const Formula& lhs() const { return *node_->lhs; }
  const Formula& rhs() const { return *node_->rhs; }
  // Operand of unary nodes.
  const Formula& operand() const { return *node_->lhs; }

  std::set<std::string> atoms() const;
  std::size_t depth() const;

  bool operator==(const Formula& other) const;

 private:
  struct Node {
    Op op;
    std::string atom;
    std::shared_ptr<const Formula> lhs;
    std::shared_ptr<const Formula> rhs;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Op op, std::string atom, const Formula* lhs,
                      const Formula* rhs);

  std::shared_ptr<const Node> node_;
};

// Concrete syntax, loosest to tightest: `->` (right assoc), `|`, `&`,
// `U` (right assoc), unary `!` `F` `<>` `G` `[]`. Atoms are [A-Za-z0-9_]+.
// Throws SyntaxError; the next operator `X` is rejected as unsupported.
Formula parse_ltlf(std::string_view text);

// Minimal-parenthesis rendering that parse_ltlf reads back to the same tree.
std::string to_string(const Formula& f);

// Finite-trace satisfaction at the first position. Atoms of `f` missing
// from `universe` are false everywhere. The empty trace satisfies `f` iff
// `f` holds when every atom is false and no future position exists
// (F and U fail, G holds).
bool eval_trace(const Formula& f, const Universe& universe,
                std::span<const AtomSet> trace);

// Convenience overload over named symbols.
bool eval_trace(const Formula& f, const std::vector<std::set<std::string>>& trace);

// ---------------------------------------------------------------------------
// Guards
// ---------------------------------------------------------------------------

// A conjunction of literals: every atom in `pos` true, every atom in `neg`
// false.
struct Cube {
  AtomSet pos = 0;
  AtomSet neg = 0;
  bool consistent() const { return (pos & neg) == 0; }
  bool satisfied_by(AtomSet s) const {
    return (pos & s) == pos && (neg & s) == 0;
  }
  auto operator<=>(const Cube&) const = default;
};

// Propositional transition label in disjunctive normal form over a
// universe. An empty cube list is `false`; a single empty cube is `true`.
class Guard {
 public:
  Guard() = default;
  explicit Guard(std::vector<Cube> cubes);

  static Guard True() { return Guard({Cube{}}); }
  static Guard False() { return Guard(); }
  // Converts a temporal-free formula. Throws InvariantError on temporal
  // operators or atoms outside `universe`.
  static Guard from_formula(const Formula& f, const Universe& universe);

  const std::vector<Cube>& cubes() const { return cubes_; }
  bool is_false() const { return cubes_.empty(); }
  AtomSet atoms() const;

  Guard operator||(const Guard& other) const;
  Guard operator&&(const Guard& other) const;

  bool operator==(const Guard& other) const = default;

 private:
  void normalize();
  std::vector<Cube> cubes_;
};

bool guard_sat(const Guard& g, AtomSet symbol);

// Strict order on symbols: fewer atoms first, then lexicographic on the
// sorted atom names.
bool symbol_less(AtomSet a, AtomSet b);

// All subset-minimal positive assignments satisfying `g`, ordered by
// symbol_less. Throws ResourceError when `g` mentions more than `max_atoms`
// atoms.
std::vector<AtomSet> minimal_symbols(const Guard& g, std::size_t max_atoms = 30);

std::string to_string(const Guard& g, const Universe& universe);

}  // namespace mrtp::ltlf
