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

#include "mrtp/nfa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <tuple>

#include "mrtp/error.hpp"

namespace mrtp::ltlf {

Nfa::Nfa(Universe universe, std::size_t num_states)
    : universe_(std::move(universe)),
      accepting_(num_states, 0),
      out_(num_states),
      labels_(num_states) {}

bool Nfa::is_initial(int q) const {
  return std::find(initial_.begin(), initial_.end(), q) != initial_.end();
}

std::vector<int> Nfa::accepting_states() const {
  std::vector<int> out;
  for (std::size_t q = 0; q < accepting_.size(); ++q) {
    if (accepting_[q]) out.push_back(static_cast<int>(q));
  }
  return out;
}

const Guard* Nfa::guard(int from, int to) const {
  for (const auto& e : out_[from]) {
    if (e.to == to) return &e.guard;
  }
  return nullptr;
}

void Nfa::add_initial(int q) {
  if (!is_initial(q)) {
    initial_.push_back(q);
    std::sort(initial_.begin(), initial_.end());
  }
}

void Nfa::set_accepting(int q, bool accepting) { accepting_[q] = accepting; }

void Nfa::add_transition(int from, int to, const Guard& g) {
  if (g.is_false()) return;
  for (auto& e : out_[from]) {
    if (e.to == to) {
      e.guard = e.guard || g;
      return;
    }
  }
  auto& edges = out_[from];
  auto pos = std::lower_bound(edges.begin(), edges.end(), to,
                              [](const Edge& e, int t) { return e.to < t; });
  edges.insert(pos, Edge{to, g});
}

void Nfa::remove_transition(int from, int to) {
  std::erase_if(out_[from], [to](const Edge& e) { return e.to == to; });
}

void Nfa::replace_guard(int from, int to, const Guard& g) {
  remove_transition(from, to);
  add_transition(from, to, g);
}

std::vector<char> Nfa::reachable() const {
  std::vector<char> seen(num_states(), 0);
  std::vector<int> stack(initial_.begin(), initial_.end());
  for (int q : stack) seen[q] = 1;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (const auto& e : out_[q]) {
      if (!seen[e.to]) {
        seen[e.to] = 1;
        stack.push_back(e.to);
      }
    }
  }
  return seen;
}

std::vector<char> Nfa::coreachable() const {
  std::vector<std::vector<int>> in(num_states());
  for (std::size_t q = 0; q < num_states(); ++q) {
    for (const auto& e : out_[q]) in[e.to].push_back(static_cast<int>(q));
  }
  std::vector<char> seen(num_states(), 0);
  std::vector<int> stack;
  for (std::size_t q = 0; q < num_states(); ++q) {
    if (accepting_[q]) {
      seen[q] = 1;
      stack.push_back(static_cast<int>(q));
    }
  }
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int p : in[q]) {
      if (!seen[p]) {
        seen[p] = 1;
        stack.push_back(p);
      }
    }
  }
  return seen;
}

nlohmann::json Nfa::to_json() const {
  nlohmann::json j;
  j["atoms"] = universe_.names();
  auto states = nlohmann::json::array();
  for (std::size_t q = 0; q < num_states(); ++q) {
    states.push_back({{"id", q}, {"label", labels_[q]}});
  }
  j["states"] = std::move(states);
  j["initial"] = initial_;
  j["accepting"] = accepting_states();
  auto transitions = nlohmann::json::array();
  for (std::size_t q = 0; q < num_states(); ++q) {
    for (const auto& e : out_[q]) {
      transitions.push_back(
          {{"from", q}, {"to", e.to}, {"guard", to_string(e.guard, universe_)}});
    }
  }
  j["transitions"] = std::move(transitions);
  return j;
}

std::string Nfa::to_dot() const {
  std::ostringstream os;
  os << "digraph nfa {\n  rankdir=LR;\n";
  for (std::size_t q = 0; q < num_states(); ++q) {
    os << "  q" << q << " [shape=" << (accepting_[q] ? "doublecircle" : "circle")
       << ", tooltip=\"" << labels_[q] << "\"];\n";
  }
  for (int q : initial_) os << "  init" << q << " [shape=point];\n  init" << q << " -> q" << q << ";\n";
  for (std::size_t q = 0; q < num_states(); ++q) {
    for (const auto& e : out_[q]) {
      os << "  q" << q << " -> q" << e.to << " [label=\""
         << to_string(e.guard, universe_) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Tableau construction
// ---------------------------------------------------------------------------

namespace {

enum class K { kTrue, kFalse, kLit, kAnd, kOr, kEventually, kAlways, kUntil, kRelease };

struct PNode {
  K kind;
  int atom = -1;  // kLit
  bool positive = true;
  int a = -1;
  int b = -1;
  auto key() const { return std::make_tuple(kind, atom, positive, a, b); }
};

// One way of satisfying an obligation set for the current position:
// literals that must hold now, obligations carried to the next position.
struct Disjunct {
  Cube now;
  std::vector<int> next;  // sorted, unique
  auto operator<=>(const Disjunct&) const = default;
};

class Tableau {
 public:
  explicit Tableau(const Universe& u) : u_(u) {}

  // Hash-consed negation normal form.
  int nnf(const Formula& f, bool positive) {
    switch (f.op()) {
      case Op::kTrue:
        return intern({positive ? K::kTrue : K::kFalse});
      case Op::kFalse:
        return intern({positive ? K::kFalse : K::kTrue});
      case Op::kAtom: {
        int i = u_.index(f.atom());
        if (i < 0) throw InvariantError("atom '" + f.atom() + "' not in universe");
        return intern({K::kLit, i, positive});
      }
      case Op::kNot:
        return nnf(f.operand(), !positive);
      case Op::kAnd:
        return intern({positive ? K::kAnd : K::kOr, -1, true,
                       nnf(f.lhs(), positive), nnf(f.rhs(), positive)});
      case Op::kOr:
        return intern({positive ? K::kOr : K::kAnd, -1, true,
                       nnf(f.lhs(), positive), nnf(f.rhs(), positive)});
      case Op::kImplies:
        return intern({positive ? K::kOr : K::kAnd, -1, true,
                       nnf(f.lhs(), !positive), nnf(f.rhs(), positive)});
      case Op::kEventually:
        return intern({positive ? K::kEventually : K::kAlways, -1, true,
                       nnf(f.operand(), positive)});
      case Op::kAlways:
        return intern({positive ? K::kAlways : K::kEventually, -1, true,
                       nnf(f.operand(), positive)});
      case Op::kUntil:
        // !(a U b) == !a R !b
        return intern({positive ? K::kUntil : K::kRelease, -1, true,
                       nnf(f.lhs(), positive), nnf(f.rhs(), positive)});
    }
    return intern({K::kFalse});
  }

  // Splits top-level conjunctions into an obligation set. Returns false
  // when the set contains `false`.
  bool flatten(int id, std::vector<int>& out) const {
    const PNode& n = nodes_[id];
    if (n.kind == K::kTrue) return true;
    if (n.kind == K::kFalse) return false;
    if (n.kind == K::kAnd) return flatten(n.a, out) && flatten(n.b, out);
    out.push_back(id);
    return true;
  }

  const std::vector<Disjunct>& expand(int id) {
    if (auto it = memo_.find(id); it != memo_.end()) return it->second;
    std::vector<Disjunct> out;
    const PNode n = nodes_[id];
    switch (n.kind) {
      case K::kTrue:
        out.push_back({});
        break;
      case K::kFalse:
        break;
      case K::kLit: {
        AtomSet bit = AtomSet{1} << n.atom;
        out.push_back({n.positive ? Cube{bit, 0} : Cube{0, bit}, {}});
        break;
      }
      case K::kAnd:
        out = product(expand(n.a), expand(n.b));
        break;
      case K::kOr:
        out = expand(n.a);
        append(out, expand(n.b));
        break;
      case K::kEventually:
        out = expand(n.a);
        out.push_back({Cube{}, {id}});
        break;
      case K::kAlways:
        out = product(expand(n.a), {Disjunct{Cube{}, {id}}});
        break;
      case K::kUntil:
        out = expand(n.b);
        append(out, product(expand(n.a), {Disjunct{Cube{}, {id}}}));
        break;
      case K::kRelease: {
        auto stay = expand(n.a);
        stay.push_back({Cube{}, {id}});
        out = product(expand(n.b), stay);
        break;
      }
    }
    canonical(out);
    return memo_.emplace(id, std::move(out)).first->second;
  }

  std::vector<Disjunct> expand_set(const std::vector<int>& obligations) {
    std::vector<Disjunct> acc{Disjunct{}};
    for (int id : obligations) acc = product(acc, expand(id));
    return acc;
  }

  bool holds_on_empty(int id) const {
    const PNode& n = nodes_[id];
    switch (n.kind) {
      case K::kTrue:
      case K::kAlways:
      case K::kRelease:
        return true;
      case K::kFalse:
      case K::kEventually:
      case K::kUntil:
        return false;
      case K::kLit:
        return !n.positive;
      case K::kAnd:
        return holds_on_empty(n.a) && holds_on_empty(n.b);
      case K::kOr:
        return holds_on_empty(n.a) || holds_on_empty(n.b);
    }
    return false;
  }

  std::string describe(int id) const {
    const PNode& n = nodes_[id];
    switch (n.kind) {
      case K::kTrue:
        return "true";
      case K::kFalse:
        return "false";
      case K::kLit:
        return (n.positive ? "" : "!") + u_.name(n.atom);
      case K::kAnd:
        return "(" + describe(n.a) + " & " + describe(n.b) + ")";
      case K::kOr:
        return "(" + describe(n.a) + " | " + describe(n.b) + ")";
      case K::kEventually:
        return "F " + describe(n.a);
      case K::kAlways:
        return "G " + describe(n.a);
      case K::kUntil:
        return "(" + describe(n.a) + " U " + describe(n.b) + ")";
      case K::kRelease:
        return "(" + describe(n.a) + " R " + describe(n.b) + ")";
    }
    return "?";
  }

 private:
  int intern(PNode n) {
    auto k = n.key();
    if (auto it = index_.find(k); it != index_.end()) return it->second;
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(n);
    index_.emplace(k, id);
    return id;
  }

  static void append(std::vector<Disjunct>& out, const std::vector<Disjunct>& more) {
    out.insert(out.end(), more.begin(), more.end());
  }

  static std::vector<Disjunct> product(const std::vector<Disjunct>& xs,
                                       const std::vector<Disjunct>& ys) {
    std::vector<Disjunct> out;
    for (const auto& x : xs) {
      for (const auto& y : ys) {
        Cube c{x.now.pos | y.now.pos, x.now.neg | y.now.neg};
        if (!c.consistent()) continue;
        Disjunct d{c, x.next};
        d.next.insert(d.next.end(), y.next.begin(), y.next.end());
        std::sort(d.next.begin(), d.next.end());
        d.next.erase(std::unique(d.next.begin(), d.next.end()), d.next.end());
        out.push_back(std::move(d));
      }
    }
    canonical(out);
    return out;
  }

  static void canonical(std::vector<Disjunct>& ds) {
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  }

  const Universe& u_;
  std::vector<PNode> nodes_;
  std::map<decltype(PNode{}.key()), int> index_;
  std::map<int, std::vector<Disjunct>> memo_;
};

}  // namespace

Nfa to_nfa(const Formula& f, std::size_t state_cap) {
  auto atoms = f.atoms();
  return to_nfa(f, Universe(std::vector<std::string>(atoms.begin(), atoms.end())),
                state_cap);
}

Nfa to_nfa(const Formula& f, const Universe& universe, std::size_t state_cap) {
  Tableau tab(universe);
  int root = tab.nnf(f, true);

  std::vector<std::vector<int>> states;  // obligation sets; empty = true
  std::vector<char> dead;                // set contains false
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<std::pair<int, Cube>>> moves;

  auto state_of = [&](std::vector<int> obligations, bool is_dead) {
    std::sort(obligations.begin(), obligations.end());
    obligations.erase(std::unique(obligations.begin(), obligations.end()),
                      obligations.end());
    if (is_dead) obligations = {-1};
    if (auto it = ids.find(obligations); it != ids.end()) return it->second;
    if (states.size() >= state_cap) {
      throw ResourceError("automaton exceeds the state cap of " +
                          std::to_string(state_cap));
    }
    int id = static_cast<int>(states.size());
    ids.emplace(obligations, id);
    states.push_back(std::move(obligations));
    dead.push_back(is_dead);
    moves.emplace_back();
    return id;
  };

  std::vector<int> init;
  bool init_alive = tab.flatten(root, init);
  state_of(init, !init_alive);

  for (std::size_t q = 0; q < states.size(); ++q) {
    if (dead[q]) continue;
    std::vector<int> obligations = states[q];
    for (const auto& d : tab.expand_set(obligations)) {
      int to = state_of(d.next, false);
      moves[q].emplace_back(to, d.now);
    }
  }

  // Keep the initial state plus every state that can reach acceptance.
  const std::size_t n = states.size();
  std::vector<char> accepting(n, 0);
  for (std::size_t q = 0; q < n; ++q) {
    accepting[q] = !dead[q] && std::all_of(states[q].begin(), states[q].end(),
                                           [&](int id) { return tab.holds_on_empty(id); });
  }
  std::vector<std::vector<int>> preds(n);
  for (std::size_t q = 0; q < n; ++q) {
    for (const auto& [to, cube] : moves[q]) preds[to].push_back(static_cast<int>(q));
  }
  std::vector<char> live(accepting);
  std::deque<int> work;
  for (std::size_t q = 0; q < n; ++q) {
    if (live[q]) work.push_back(static_cast<int>(q));
  }
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (int p : preds[q]) {
      if (!live[p]) {
        live[p] = 1;
        work.push_back(p);
      }
    }
  }
  live[0] = 1;

  std::vector<int> remap(n, -1);
  std::size_t kept = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (live[q]) remap[q] = static_cast<int>(kept++);
  }
  Nfa nfa(universe, kept);
  nfa.add_initial(0);
  for (std::size_t q = 0; q < n; ++q) {
    if (!live[q]) continue;
    int from = remap[q];
    nfa.set_accepting(from, accepting[q]);
    std::string label;
    if (dead[q]) {
      label = "false";
    } else if (states[q].empty()) {
      label = "true";
    } else {
      for (std::size_t k = 0; k < states[q].size(); ++k) {
        if (k) label += " & ";
        label += tab.describe(states[q][k]);
      }
    }
    nfa.set_label(from, std::move(label));
    std::map<int, std::vector<Cube>> by_target;
    for (const auto& [to, cube] : moves[q]) {
      if (live[to]) by_target[remap[to]].push_back(cube);
    }
    for (auto& [to, cubes] : by_target) nfa.add_transition(from, to, Guard(std::move(cubes)));
  }
  return nfa;
}

bool nfa_accepts(const Nfa& nfa, std::span<const AtomSet> trace) {
  std::vector<char> current(nfa.num_states(), 0);
  for (int q : nfa.initial()) current[q] = 1;
  for (AtomSet symbol : trace) {
    std::vector<char> next(nfa.num_states(), 0);
    bool any = false;
    for (std::size_t q = 0; q < nfa.num_states(); ++q) {
      if (!current[q]) continue;
      for (const auto& e : nfa.out(static_cast<int>(q))) {
        if (!next[e.to] && guard_sat(e.guard, symbol)) {
          next[e.to] = 1;
          any = true;
        }
      }
    }
    if (!any) return false;
    current = std::move(next);
  }
  for (std::size_t q = 0; q < nfa.num_states(); ++q) {
    if (current[q] && nfa.is_accepting(static_cast<int>(q))) return true;
  }
  return false;
}

}  // namespace mrtp::ltlf
