#include <catch_amalgamated.hpp>

#include <lpx/infinite.hpp>

#include "support/nat_corpus.hpp"

using namespace lpx;

namespace {

Natural pow_nat(unsigned base, unsigned exp) { return boost::multiprecision::pow(Natural(base), exp); }

// Flags of the worked example: P1, P2, P3 end with 1, 2, 3 and clauses with 4.
CodeRegistry example_registry() { return CodeRegistry({{"P1", Code(1)}, {"P2", Code(2)}, {"P3", Code(3)}}, Code(4)); }

NatAtom nat(const char* p, std::initializer_list<int> args) {
  NatAtom a{p, {}};
  for (int v : args) a.args.push_back(Code(v));
  return a;
}

}  // namespace

TEST_CASE("pairing values", "[infinite][pair]") {
  CodeRegistry reg = example_registry();
  CHECK(reg.pair(Code(2), Code(1)) == Code(7));
  CHECK(reg.pair(Code(7), Code(3)) == Code(155));
  Code e = reg.pair(reg.pair(reg.pair(Code(2), Code(1)), Code(3)), Code(5));
  REQUIRE(e.is_exact());
  CHECK(e.exact() == pow_nat(2, 155) + pow_nat(3, 5));
  CHECK(reg.chain({Code(1), Code(3), Code(5)}, Code(2)) == e);
  CHECK_THROWS_WITH(reg.pair(Code(0), Code(3)), Catch::Matchers::ContainsSubstring("positive"));
  CHECK_THROWS_WITH(reg.pair(Code(3), Code(0)), Catch::Matchers::ContainsSubstring("positive"));
}

TEST_CASE("code_atom reproduces the worked example", "[infinite][code]") {
  CodeRegistry reg = example_registry();
  Code c = code_atom(reg, nat("P2", {1, 3, 5}));
  REQUIRE(c.is_exact());
  CHECK(c.exact() == pow_nat(2, 155) + pow_nat(3, 5));
  CHECK_THROWS_WITH(code_atom(reg, nat("P9", {1})), Catch::Matchers::ContainsSubstring("no reserved flag"));
}

TEST_CASE("code_clause", "[infinite][code]") {
  CodeRegistry reg = example_registry();
  CHECK(code_clause(reg, {}) == Code(4));

  // Canonical order P1(2,4), P2(1,3,5), P3(2); atom codes by hand.
  Code p1 = Code(pow_nat(2, 11) + pow_nat(3, 4));  // e(e(1,2),4) = e(11,4)
  Code p2 = Code(pow_nat(2, 155) + pow_nat(3, 5));
  Code p3 = Code(pow_nat(2, 3) + pow_nat(3, 2));  // e(3,2) = 17
  Code expected = Code::symbolic(Code::symbolic(Code::symbolic(Code(4), p1), p2), p3);
  Code got = code_clause(reg, {nat("P2", {1, 3, 5}), nat("P3", {2}), nat("P1", {2, 4})});
  CHECK(got == expected);
  // Order and duplicates do not matter.
  CHECK(code_clause(reg, {nat("P1", {2, 4}), nat("P3", {2}), nat("P2", {1, 3, 5}), nat("P3", {2})}) == got);
  // A single unary atom stays exact: e(4, 17).
  Code one = code_clause(reg, {nat("P3", {2})});
  REQUIRE(one.is_exact());
  CHECK(one.exact() == pow_nat(2, 4) + pow_nat(3, 17));
}

TEST_CASE("pairing collisions", "[infinite][pair]") {
  // Every equal value among 2^m + 3^n for m, n < 80.
  std::map<Natural, std::vector<std::pair<int, int>>> seen;
  for (int m = 1; m < 80; ++m) {
    for (int n = 1; n < 80; ++n) seen[pow_nat(2, m) + pow_nat(3, n)].push_back({m, n});
  }
  std::set<Natural> clashes;
  for (const auto& [v, ps] : seen) {
    if (ps.size() > 1) clashes.insert(v);
  }
  CHECK(clashes == std::set<Natural>{11, 35, 259});
  for (const auto& v : clashes) {
    for (const auto& [m, n] : seen[v]) CHECK(collision_prone(Natural(m)));
  }

  CodeRegistry reg = example_registry();
  reg.pair(Code(1), Code(2));
  CHECK_THROWS_WITH(reg.pair(Code(3), Code(1)), Catch::Matchers::ContainsSubstring("collides"));
}

TEST_CASE("flags", "[infinite][flags]") {
  auto f = safe_flags(8);
  CHECK(f == std::vector<Natural>{2, 6, 9, 10, 12, 14, 15, 16});
  for (const auto& v : f) {
    CHECK_FALSE(in_pairing_range(v));
    CHECK_FALSE(collision_prone(v));
  }
  CHECK(in_pairing_range(5));
  CHECK(in_pairing_range(pow_nat(2, 155) + pow_nat(3, 5)));
  CHECK_FALSE(in_pairing_range(4));

  CHECK_THROWS_WITH(CodeRegistry({{"p", Code(5)}}, Code(2)), Catch::Matchers::ContainsSubstring("range"));
  CHECK_THROWS_WITH(CodeRegistry({{"p", Code(2)}}, Code(2)), Catch::Matchers::ContainsSubstring("twice"));

  CodeRegistry reg = CodeRegistry::for_program(parse_program("q(1) :- p(1), not r(2)."));
  CHECK(reg.flag("q") == Code(2));
  CHECK(reg.flag("p") == Code(6));
  CHECK(reg.flag("r") == Code(9));
  CHECK(reg.clause_flag() == Code(10));
}

TEST_CASE("pairing stays injective on generated chains", "[infinite][pair][property]") {
  // Distinct tuples over small values chained from distinct safe flags
  // never share a code.
  auto flags = safe_flags(3);
  std::vector<std::pair<std::string, Code>> af = {{"a", Code(flags[0])}, {"b", Code(flags[1])}};
  CodeRegistry reg(af, Code(flags[2]));
  std::mt19937_64 rng(7);
  std::map<Code, std::pair<std::size_t, std::vector<int>>> seen;
  for (int i = 0; i < 400; ++i) {
    std::size_t f = rng() % 3;
    std::vector<int> t(rng() % 4);
    for (auto& v : t) v = static_cast<int>(rng() % 6) + 1;
    std::vector<Code> items(t.begin(), t.end());
    Code c = reg.chain(items, Code(flags[f]));
    auto [it, fresh] = seen.try_emplace(c, f, t);
    if (!fresh) CHECK(it->second == std::make_pair(f, t));
  }
  for (const auto& [code, entry] : reg.entries()) CHECK(reg.find(code) == &entry);
}

TEST_CASE("merge, extract and membership", "[infinite][encodings]") {
  CodeRegistry reg({{"p", Code(2)}, {"q", Code(6)}, {"r", Code(9)}}, Code(10));
  Encodings enc(reg);
  Code p1 = code_atom(reg, nat("p", {1})), q2 = code_atom(reg, nat("q", {2})), r3 = code_atom(reg, nat("r", {3}));
  Code cp = code_clause(reg, {nat("p", {1})}), cq = code_clause(reg, {nat("q", {2})});
  Code both = code_clause(reg, {nat("p", {1}), nat("q", {2})});

  CHECK(enc.mrg(cp, cq) == reg.chain({p1, q2}, Code(10)));
  CHECK(enc.mrg(cp, cq) == both);
  CHECK(enc.ext(both, q2) == cp);
  CHECK(enc.in(p1, both));
  CHECK_FALSE(enc.in(r3, both));
  CHECK(enc.subc(cp, both));
  CHECK_FALSE(enc.subc(both, cp));
  CHECK(enc.equ(both, enc.mrg(cq, cp)));
  CHECK(enc.items(Code(10)).empty());
  CHECK(enc.describe(both) == "clause[p(1) | q(2)]");
  CHECK_THROWS_WITH(enc.items(Code(12345)), Catch::Matchers::ContainsSubstring("unregistered"));
  CHECK_THROWS_WITH(enc.items(p1), Catch::Matchers::ContainsSubstring("clause flag"));
}

TEST_CASE("encoding relations satisfy their definitions", "[infinite][encodings][property]") {
  CodeRegistry reg({{"p", Code(2)}}, Code(6));
  Encodings enc(reg);
  std::mt19937_64 rng(11);
  std::vector<Code> pool;
  for (int v = 1; v <= 4; ++v) pool.push_back(code_atom(reg, nat("p", {v})));
  auto tuple = [&] {
    std::vector<Code> t(rng() % 5);
    for (auto& c : t) c = pool[rng() % pool.size()];
    return t;
  };
  auto occurs = [](const std::vector<Code>& t, const Code& c) { return std::find(t.begin(), t.end(), c) != t.end(); };
  std::vector<Code> codes;
  for (int i = 0; i < 60; ++i) {
    auto a = tuple(), b = tuple();
    Code ca = reg.chain(a, Code(6)), cb = reg.chain(b, Code(6));
    codes.push_back(ca);
    std::vector<Code> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    CHECK(enc.mrg(ca, cb) == reg.chain(ab, Code(6)));
    const Code& x = pool[rng() % pool.size()];
    std::vector<Code> a_without;
    for (const auto& c : a) {
      if (c != x) a_without.push_back(c);
    }
    CHECK(enc.ext(ca, x) == reg.chain(a_without, Code(6)));
    CHECK(enc.in(x, ca) == occurs(a, x));
    bool sub = std::all_of(a.begin(), a.end(), [&](const Code& c) { return occurs(b, c); });
    CHECK(enc.subc(ca, cb) == sub);
  }
  for (const auto& a : codes) {
    CHECK(enc.equ(a, a));
    for (const auto& b : codes) {
      CHECK(enc.equ(a, b) == enc.equ(b, a));
      if (!enc.equ(a, b)) continue;
      for (const auto& c : codes) {
        if (enc.equ(b, c)) CHECK(enc.equ(a, c));
      }
    }
  }
}

TEST_CASE("range restriction", "[infinite][safety]") {
  CHECK_NOTHROW(check_range_restricted(parse_program("p(1). q(X) :- p(X), not r(X). s(Y) :- q(X), Y = X.")));
  CHECK_THROWS_WITH(check_range_restricted(parse_program("p(X).")), Catch::Matchers::ContainsSubstring("variable X"));
  CHECK_THROWS_WITH(check_range_restricted(parse_program("p(X) :- not q(X).")),
                    Catch::Matchers::ContainsSubstring("not range-restricted"));
  CHECK_THROWS_WITH(check_range_restricted(parse_program("p(a).")), Catch::Matchers::ContainsSubstring("only numerals"));
  CodeRegistry reg({{"p", Code(2)}}, Code(6));
  CHECK_THROWS(delta_n(parse_program("p(X) :- X = Y."), {}, 1, reg));
}

TEST_CASE("delta stages", "[infinite][delta]") {
  SECTION("a ground fact") {
    Program p = parse_program("p(1).");
    CodeRegistry reg = CodeRegistry::for_program(p);
    auto d = delta_n(p, {}, 2, reg);
    REQUIRE(d.stages.size() == 3);
    CHECK(d.stages[0].empty());
    CHECK(d.stages[1] == std::vector<Code>{code_clause(reg, {nat("p", {1})})});
    CHECK(d.converged);
  }
  SECTION("a disjunctive fact") {
    Program p = parse_program("p(1) ; q(2).");
    CodeRegistry reg = CodeRegistry::for_program(p);
    auto d = delta_n(p, {}, 1, reg);
    Code c = code_clause(reg, {nat("p", {1}), nat("q", {2})});
    CHECK(std::find(d.stages[1].begin(), d.stages[1].end(), c) != d.stages[1].end());
  }
  SECTION("stage zero") {
    Program p = parse_program("p(1). q(X) :- p(X).");
    CodeRegistry reg = CodeRegistry::for_program(p);
    auto d = delta_n(p, {}, 0, reg);
    REQUIRE(d.stages.size() == 1);
    CHECK(d.stages[0].empty());
  }
}

TEST_CASE("claim1 examples", "[infinite][claim1]") {
  SECTION("two-stage chain") {
    Program p = parse_program("p(1). q(2) :- p(1).");
    CodeRegistry reg = CodeRegistry::for_program(p);
    auto rep = claim1_check(p, {}, 2, reg);
    CHECK(rep.pass);
    REQUIRE(rep.stages.size() == 3);
    CHECK(rep.stages[0].gamma_clauses == 0);
    CHECK(rep.stages[1].gamma_clauses == 1);
    CHECK(rep.stages[2].gamma_clauses == 2);
    CHECK(rep.stages[2].delta_classes == 2);
    auto d = delta_n(p, {}, 2, reg);
    Encodings enc(reg);
    std::set<std::set<Code>> keys;
    for (const auto& c : d.stages[2]) keys.insert(enc.key(c));
    CHECK(keys == std::set<std::set<Code>>{enc.key(code_clause(reg, {nat("p", {1})})), enc.key(code_clause(reg, {nat("q", {2})}))});
  }
  SECTION("disjunction carried through a rule") {
    Program p = parse_program("p(1) ; q(1). r(1) :- p(1).");
    CodeRegistry reg = CodeRegistry::for_program(p);
    auto rep = claim1_check(p, {}, 2, reg);
    CHECK(rep.pass);
    auto d = delta_n(p, {}, 2, reg);
    Encodings enc(reg);
    std::set<std::set<Code>> keys;
    for (const auto& c : d.stages[2]) keys.insert(enc.key(c));
    CHECK(keys.count(enc.key(code_clause(reg, {nat("r", {1}), nat("q", {1})}))));
    CHECK(keys.size() == 2);
    CHECK(rep.stages[1].gamma_clauses == 1);
    CHECK(rep.stages[2].gamma_clauses == 2);
  }
  SECTION("nothing at stage zero") {
    Program p = parse_program("p(1).");
    CodeRegistry reg = CodeRegistry::for_program(p);
    auto rep = claim1_check(p, {}, 0, reg);
    CHECK(rep.pass);
    REQUIRE(rep.stages.size() == 1);
    CHECK(rep.stages[0].gamma_clauses == 0);
    CHECK(rep.stages[0].delta_codes == 0);
  }
  SECTION("negation and extensional atoms read the base") {
    Program p = parse_program("q(X) :- e(X), not r(X). s(X) ; t(X) :- q(X).");
    NatBase base;
    base.facts["e"] = {{1}, {2}};
    base.facts["r"] = {{2}};
    CodeRegistry reg = CodeRegistry::for_program(p);
    auto rep = claim1_check(p, base, 3, reg);
    CHECK(rep.pass);
    CHECK(rep.stages[1].gamma_clauses == 1);
    CHECK(rep.stages[2].gamma_clauses == 2);
    CHECK(rep.stages[3].gamma_clauses == 2);
    CHECK(rep.gamma_converged);
    CHECK(rep.delta_converged);
  }
  SECTION("numeral zero shifts the domain") {
    Program p = parse_program("p(0). q(X) :- p(X).");
    CodeRegistry reg = CodeRegistry::for_program(p);
    auto rep = claim1_check(p, {}, 2, reg);
    CHECK(rep.offset == 1);
    CHECK(rep.pass);
  }
  SECTION("constraints derive the empty clause") {
    Program p = parse_program("p(1) ; q(1). :- p(1).");
    CodeRegistry reg = CodeRegistry::for_program(p);
    auto rep = claim1_check(p, {}, 2, reg);
    CHECK(rep.pass);
    auto d = delta_n(p, {}, 2, reg);
    Encodings enc(reg);
    bool has_q = false;
    for (const auto& c : d.stages[2]) has_q = has_q || enc.key(c) == enc.key(code_clause(reg, {nat("q", {1})}));
    CHECK(has_q);
  }
}

TEST_CASE("claim1 over generated range-restricted programs", "[infinite][claim1][property]") {
  testing::RangeRestrictedGenerator gen(2024);
  std::size_t disjunctive = 0, negated = 0, growing = 0;
  for (int i = 0; i < 40; ++i) {
    Program p = gen.next();
    NatBase base = gen.base(p);
    auto cls = classify(p);
    if (!cls.normal) ++disjunctive;
    bool neg = false;
    for (const auto& r : p.rules()) {
      for (const auto& l : r.body) neg = neg || l.negated;
    }
    if (neg) ++negated;
    CodeRegistry reg = CodeRegistry::for_program(p);
    auto rep = claim1_check(p, base, 4, reg);
    INFO(render_program(p));
    for (const auto& st : rep.stages) {
      for (const auto& m : st.missing_from_delta) UNSCOPED_INFO("stage " << st.stage << " missing " << m);
      for (const auto& m : st.extra_in_delta) UNSCOPED_INFO("stage " << st.stage << " extra " << m);
    }
    CHECK(rep.pass);
    if (rep.stages[3].gamma_clauses > rep.stages[1].gamma_clauses) ++growing;
  }
  CHECK(growing >= 10);
  CHECK(disjunctive >= 5);
  CHECK(negated >= 5);
}
