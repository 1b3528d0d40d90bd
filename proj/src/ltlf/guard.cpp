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

#include "mrtp/error.hpp"
#include "mrtp/ltlf.hpp"

namespace mrtp::ltlf {

namespace {

// `a` implies `b` when every literal of `b` is also in `a`.
bool implies(const Cube& a, const Cube& b) {
  return (a.pos & b.pos) == b.pos && (a.neg & b.neg) == b.neg;
}

}  // namespace

Guard::Guard(std::vector<Cube> cubes) : cubes_(std::move(cubes)) { normalize(); }

void Guard::normalize() {
  std::erase_if(cubes_, [](const Cube& c) { return !c.consistent(); });
  std::sort(cubes_.begin(), cubes_.end(), [](const Cube& a, const Cube& b) {
    int la = std::popcount(a.pos) + std::popcount(a.neg);
    int lb = std::popcount(b.pos) + std::popcount(b.neg);
    if (la != lb) return la < lb;
    return a < b;
  });
  cubes_.erase(std::unique(cubes_.begin(), cubes_.end()), cubes_.end());
  // Drop cubes absorbed by a weaker one (fewer literals sort first).
  std::vector<Cube> kept;
  for (const auto& c : cubes_) {
    bool absorbed = std::any_of(kept.begin(), kept.end(),
                                [&](const Cube& k) { return implies(c, k); });
    if (!absorbed) kept.push_back(c);
  }
  cubes_ = std::move(kept);
}

AtomSet Guard::atoms() const {
  AtomSet m = 0;
  for (const auto& c : cubes_) m |= c.pos | c.neg;
  return m;
}

Guard Guard::operator||(const Guard& other) const {
  std::vector<Cube> cubes = cubes_;
  cubes.insert(cubes.end(), other.cubes_.begin(), other.cubes_.end());
  return Guard(std::move(cubes));
}

Guard Guard::operator&&(const Guard& other) const {
  std::vector<Cube> cubes;
  for (const auto& a : cubes_) {
    for (const auto& b : other.cubes_) {
      cubes.push_back({a.pos | b.pos, a.neg | b.neg});
    }
  }
  return Guard(std::move(cubes));
}

Guard Guard::from_formula(const Formula& f, const Universe& universe) {
  // Negation normal form on the fly: `positive` tracks parity of enclosing
  // negations.
  auto convert = [&universe](auto&& self, const Formula& g,
                             bool positive) -> Guard {
    switch (g.op()) {
      case Op::kTrue:
        return positive ? Guard::True() : Guard::False();
      case Op::kFalse:
        return positive ? Guard::False() : Guard::True();
      case Op::kAtom: {
        int i = universe.index(g.atom());
        if (i < 0) throw InvariantError("atom '" + g.atom() + "' not in universe");
        AtomSet bit = AtomSet{1} << i;
        return Guard({positive ? Cube{bit, 0} : Cube{0, bit}});
      }
      case Op::kNot:
        return self(self, g.operand(), !positive);
      case Op::kAnd:
        return positive ? self(self, g.lhs(), true) && self(self, g.rhs(), true)
                        : self(self, g.lhs(), false) || self(self, g.rhs(), false);
      case Op::kOr:
        return positive ? self(self, g.lhs(), true) || self(self, g.rhs(), true)
                        : self(self, g.lhs(), false) && self(self, g.rhs(), false);
      case Op::kImplies:
        return positive ? self(self, g.lhs(), false) || self(self, g.rhs(), true)
                        : self(self, g.lhs(), true) && self(self, g.rhs(), false);
      default:
        throw InvariantError("guard contains a temporal operator: " + to_string(g));
    }
  };
  return convert(convert, f, true);
}

bool guard_sat(const Guard& g, AtomSet symbol) {
  return std::any_of(g.cubes().begin(), g.cubes().end(),
                     [symbol](const Cube& c) { return c.satisfied_by(symbol); });
}

bool symbol_less(AtomSet a, AtomSet b) {
  int ca = std::popcount(a), cb = std::popcount(b);
  if (ca != cb) return ca < cb;
  // Same size: compare ascending index lists; the first differing index
  // decides, and the set holding the smaller index comes first.
  AtomSet diff = a ^ b;
  if (diff == 0) return false;
  AtomSet lowest = diff & (~diff + 1);
  return (a & lowest) != 0;
}

std::vector<AtomSet> minimal_symbols(const Guard& g, std::size_t max_atoms) {
  if (static_cast<std::size_t>(std::popcount(g.atoms())) > max_atoms) {
    throw ResourceError("guard mentions more than " + std::to_string(max_atoms) +
                        " atoms");
  }
  // Every satisfying assignment contains the positive part of a cube it
  // satisfies, and that positive part satisfies the cube on its own; so
  // the minimal models are the minimal positive parts.
  std::vector<AtomSet> candidates;
  for (const auto& c : g.cubes()) candidates.push_back(c.pos);
  std::sort(candidates.begin(), candidates.end(), symbol_less);
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  std::vector<AtomSet> out;
  for (AtomSet s : candidates) {
    bool has_subset = std::any_of(out.begin(), out.end(),
                                  [s](AtomSet m) { return (m & s) == m; });
    if (!has_subset) out.push_back(s);
  }
  return out;
}

std::string to_string(const Guard& g, const Universe& universe) {
  if (g.cubes().empty()) return "false";
  std::string out;
  for (std::size_t k = 0; k < g.cubes().size(); ++k) {
    const Cube& c = g.cubes()[k];
    if (k) out += " | ";
    if (c.pos == 0 && c.neg == 0) {
      out += "true";
      continue;
    }
    bool paren = g.cubes().size() > 1 && std::popcount(c.pos | c.neg) > 1;
    if (paren) out += '(';
    bool first = true;
    for (std::size_t i = 0; i < universe.size(); ++i) {
      AtomSet bit = AtomSet{1} << i;
      if (!((c.pos | c.neg) & bit)) continue;
      if (!first) out += " & ";
      first = false;
      if (c.neg & bit) out += '!';
      out += universe.name(i);
    }
    if (paren) out += ')';
  }
  return out;
}

}  // namespace mrtp::ltlf
