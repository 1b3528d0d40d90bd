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
#include <random>

#include "doctest.h"
#include "mrtp/error.hpp"
#include "mrtp/ltlf.hpp"
#include "mrtp/nfa.hpp"
#include "support/formulas.hpp"

using namespace mrtp;
using namespace mrtp::ltlf;

namespace {

Formula A(const char* n) { return Formula::Atom(n); }

}  // namespace

TEST_CASE("parse: precedence and associativity") {
  Formula f = parse_ltlf("F a & (!b U c)");
  CHECK(f == Formula::And(Formula::Eventually(A("a")),
                          Formula::Until(Formula::Not(A("b")), A("c"))));

  CHECK(parse_ltlf("a -> b -> c") ==
        Formula::Implies(A("a"), Formula::Implies(A("b"), A("c"))));
  CHECK(parse_ltlf("a U b U c") ==
        Formula::Until(A("a"), Formula::Until(A("b"), A("c"))));
  CHECK(parse_ltlf("a | b & c") == Formula::Or(A("a"), Formula::And(A("b"), A("c"))));
  CHECK(parse_ltlf("a & b U c") == Formula::And(A("a"), Formula::Until(A("b"), A("c"))));
  CHECK(parse_ltlf("<> a & [] b") ==
        Formula::And(Formula::Eventually(A("a")), Formula::Always(A("b"))));
  CHECK(parse_ltlf("!F a") == Formula::Not(Formula::Eventually(A("a"))));
}

TEST_CASE("parse: global template from the experiments") {
  Formula f = parse_ltlf("(F ct1) & (F ct2) & (F ct4) & (!ct3 U ct2) & (F (ct4 & F ct3))");
  Formula expected = Formula::And(
      Formula::And(
          Formula::And(Formula::And(Formula::Eventually(A("ct1")),
                                    Formula::Eventually(A("ct2"))),
                       Formula::Eventually(A("ct4"))),
          Formula::Until(Formula::Not(A("ct3")), A("ct2"))),
      Formula::Eventually(Formula::And(A("ct4"), Formula::Eventually(A("ct3")))));
  CHECK(f == expected);
  CHECK(f.atoms() == std::set<std::string>{"ct1", "ct2", "ct3", "ct4"});
}

TEST_CASE("parse: errors") {
  try {
    parse_ltlf("a U");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.position() == 3);
    CHECK(std::string(e.what()).find("end of input") != std::string::npos);
  }
  try {
    parse_ltlf("X a");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(std::string(e.what()).find("unsupported operator") != std::string::npos);
    CHECK(e.position() == 0);
  }
  CHECK_THROWS_AS(parse_ltlf("a & & b"), SyntaxError);
  CHECK_THROWS_AS(parse_ltlf("(a"), SyntaxError);
  CHECK_THROWS_AS(parse_ltlf("a $ b"), SyntaxError);
  CHECK_THROWS_AS(parse_ltlf(""), SyntaxError);
}

TEST_CASE("printer round trip is a fixed point") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    Formula f = testing::random_formula(rng, 4, {"a", "b", "c"});
    std::string once = to_string(f);
    Formula back = parse_ltlf(once);
    CHECK(back == f);
    CHECK(to_string(back) == once);
  }
}

TEST_CASE("eval_trace examples") {
  CHECK(eval_trace(Formula::Eventually(A("a")), {{}, {"a"}}));
  CHECK(eval_trace(Formula::Until(Formula::Not(A("b")), A("c")), {{"c"}}));
  // G(ct4 -> F ct3) on [{ct4},{}]: position 1 has ct4 but ct3 never follows.
  CHECK_FALSE(eval_trace(parse_ltlf("G (ct4 -> F ct3)"), {{"ct4"}, {}}));
  CHECK(eval_trace(parse_ltlf("G (ct4 -> F ct3)"), {{"ct4"}, {"ct3"}}));
  CHECK(eval_trace(parse_ltlf("G (ct4 -> F ct3)"), {{"ct4", "ct3"}}));
}

TEST_CASE("eval_trace on the empty trace") {
  CHECK(eval_trace(Formula::True(), {}));
  CHECK_FALSE(eval_trace(A("a"), {}));
  CHECK(eval_trace(Formula::Not(A("a")), {}));
  CHECK_FALSE(eval_trace(Formula::Eventually(A("a")), {}));
  CHECK(eval_trace(Formula::Always(A("a")), {}));
  CHECK_FALSE(eval_trace(Formula::Until(A("a"), A("b")), {}));
}

TEST_CASE("guard_sat and minimal_symbols") {
  Universe u({"a", "b", "c"});
  Guard a_not_b = Guard::from_formula(parse_ltlf("a & !b"), u);
  CHECK(guard_sat(a_not_b, u.mask({"a"})));
  CHECK_FALSE(guard_sat(a_not_b, u.mask({"a", "b"})));
  Guard a_or_b = Guard::from_formula(parse_ltlf("a | b"), u);
  CHECK_FALSE(guard_sat(a_or_b, 0));

  CHECK(minimal_symbols(Guard::from_formula(parse_ltlf("a & b"), u)) ==
        std::vector<AtomSet>{u.mask({"a", "b"})});
  CHECK(minimal_symbols(a_or_b) == std::vector<AtomSet>{u.mask({"a"}), u.mask({"b"})});
  CHECK(minimal_symbols(Guard::from_formula(parse_ltlf("(a | b) & !c"), u)) ==
        std::vector<AtomSet>{u.mask({"a"}), u.mask({"b"})});
  CHECK(minimal_symbols(Guard::False()).empty());
  CHECK(minimal_symbols(Guard::True()) == std::vector<AtomSet>{0});
  CHECK_THROWS_AS(Guard::from_formula(parse_ltlf("F a"), u), InvariantError);
}

TEST_CASE("minimal_symbols agrees with exhaustive assignment scan") {
  std::vector<std::string> names{"a", "b", "c", "d"};
  Universe u(names);
  std::mt19937_64 rng(11);
  for (int round = 0; round < 300; ++round) {
    // Temporal-free random formula.
    auto gen = [&](auto&& self, int depth) -> Formula {
      int k = static_cast<int>(rng() % 6);
      if (depth == 0 || k < 2) {
        Formula atom = Formula::Atom(names[rng() % names.size()]);
        return k == 0 ? Formula::Not(atom) : atom;
      }
      if (k == 2) return Formula::Not(self(self, depth - 1));
      if (k == 3) return Formula::And(self(self, depth - 1), self(self, depth - 1));
      if (k == 4) return Formula::Or(self(self, depth - 1), self(self, depth - 1));
      return Formula::Implies(self(self, depth - 1), self(self, depth - 1));
    };
    Formula f = gen(gen, 3);
    Guard g = Guard::from_formula(f, u);

    std::vector<AtomSet> models;
    for (AtomSet s = 0; s < 16; ++s) {
      bool sat = eval_trace(f, u, std::vector<AtomSet>{s});
      CHECK(sat == guard_sat(g, s));
      if (sat) models.push_back(s);
    }
    std::vector<AtomSet> minimal;
    for (AtomSet s : models) {
      bool has_smaller = std::any_of(models.begin(), models.end(), [s](AtomSet m) {
        return m != s && (m & s) == m;
      });
      if (!has_smaller) minimal.push_back(s);
    }
    std::sort(minimal.begin(), minimal.end(), symbol_less);
    auto got = minimal_symbols(g);
    CHECK(got == minimal);
    // Antichain, satisfying, and every atom needed.
    for (AtomSet s : got) {
      CHECK(guard_sat(g, s));
      for (int i = 0; i < 4; ++i) {
        if (s >> i & 1) CHECK_FALSE(guard_sat(g, s & ~(AtomSet{1} << i)));
      }
    }
  }
}

TEST_CASE("minimal_symbols enumeration bound") {
  std::vector<std::string> names;
  Formula f = Formula::True();
  for (int i = 0; i < 31; ++i) {
    names.push_back("p" + std::to_string(i));
    f = Formula::And(f, Formula::Atom(names.back()));
  }
  Universe u(names);
  CHECK_THROWS_AS(minimal_symbols(Guard::from_formula(f, u)), ResourceError);
}

TEST_CASE("symbol_less orders by size then names") {
  Universe u({"a", "b", "c", "d"});
  CHECK(symbol_less(u.mask({"d"}), u.mask({"a", "b"})));
  CHECK(symbol_less(u.mask({"a", "d"}), u.mask({"b", "c"})));
  CHECK_FALSE(symbol_less(u.mask({"b", "c"}), u.mask({"a", "d"})));
  CHECK_FALSE(symbol_less(u.mask({"a"}), u.mask({"a"})));
}

TEST_CASE("to_nfa: true accepts everything") {
  Nfa nfa = to_nfa(Formula::True());
  REQUIRE(nfa.initial().size() == 1);
  int q0 = nfa.initial()[0];
  CHECK(nfa.is_accepting(q0));
  const Guard* loop = nfa.guard(q0, q0);
  REQUIRE(loop != nullptr);
  CHECK(*loop == Guard::True());
  for (const auto& t : testing::all_traces(0, 3)) CHECK(nfa_accepts(nfa, t));
}

TEST_CASE("to_nfa: eventually and until examples") {
  Universe u({"a", "b"});
  Nfa fa = to_nfa(Formula::Eventually(A("a")), u);
  CHECK(fa.num_states() == 2);
  CHECK(nfa_accepts(fa, Trace{0, 0, u.mask({"a"})}));
  CHECK_FALSE(nfa_accepts(fa, Trace{0, u.mask({"b"})}));

  Nfa mixed = to_nfa(parse_ltlf("F a & (!a U b)"), u);
  CHECK_FALSE(nfa_accepts(mixed, Trace{u.mask({"a"})}));
  CHECK(nfa_accepts(mixed, Trace{u.mask({"b"}), u.mask({"a"})}));

  Nfa until = to_nfa(Formula::Until(A("a"), A("b")), u);
  CHECK_FALSE(nfa_accepts(until, Trace{u.mask({"a"}), u.mask({"a"})}));
  CHECK(nfa_accepts(until, Trace{u.mask({"a"}), u.mask({"b"})}));
}

TEST_CASE("to_nfa: empty trace convention") {
  for (const char* text : {"true", "a", "!a", "F a", "G a", "a U b", "!(a U b)"}) {
    Formula f = parse_ltlf(text);
    Nfa nfa = to_nfa(f, Universe({"a", "b"}));
    bool init_accepting = false;
    for (int q : nfa.initial()) init_accepting |= nfa.is_accepting(q);
    CHECK(nfa_accepts(nfa, Trace{}) == init_accepting);
    CHECK(nfa_accepts(nfa, Trace{}) == eval_trace(f, nfa.universe(), Trace{}));
  }
}

TEST_CASE("to_nfa language equivalence on small random formulas") {
  std::vector<std::string> atoms{"a", "b", "c"};
  Universe u(atoms);
  auto traces = testing::all_traces(3, 3);
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 60; ++i) {
    Formula f = testing::random_formula(rng, 3, atoms);
    Nfa nfa = to_nfa(f, u);
    for (const auto& t : traces) {
      if (eval_trace(f, u, t) != nfa_accepts(nfa, t)) {
        FAIL_CHECK("mismatch on " << to_string(f));
        break;
      }
    }
  }
}

TEST_CASE("to_nfa: structural invariants") {
  Nfa nfa = to_nfa(parse_ltlf("(F a) & (G (b -> F c)) & (!c U a)"));
  for (int q : nfa.initial()) CHECK(q < static_cast<int>(nfa.num_states()));
  for (std::size_t q = 0; q < nfa.num_states(); ++q) {
    for (const auto& e : nfa.out(static_cast<int>(q))) {
      CHECK(e.to >= 0);
      CHECK(e.to < static_cast<int>(nfa.num_states()));
      CHECK((e.guard.atoms() & ~((AtomSet{1} << nfa.universe().size()) - 1)) == 0);
    }
  }
  auto j = nfa.to_json();
  CHECK(j["states"].size() == nfa.num_states());
  CHECK(j.contains("transitions"));
  CHECK(nfa.to_dot().find("digraph") != std::string::npos);
}

TEST_CASE("to_nfa: state cap") {
  Formula f = parse_ltlf("F a & F b & F c & F d");
  CHECK_THROWS_AS(to_nfa(f, 4), ResourceError);
  CHECK_NOTHROW(to_nfa(f, 16));
}
