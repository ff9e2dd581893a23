#include <catch_amalgamated.hpp>

#include <lpx/grounder.hpp>

#include "support/corpus.hpp"

using namespace lpx;

namespace {

Structure two_with_p0() {
  Structure s = Structure::of_size(2);
  s.add_predicate("p", 1).set({0});
  return s;
}

}  // namespace

TEST_CASE("structure JSON round trip") {
  Structure s = two_with_p0();
  std::string text = save_structure(s);
  Structure back = load_structure(text);
  CHECK(back == s);
  CHECK(save_structure(back) == text);

  Structure t(std::vector<ElementName>{std::string("a"), std::int64_t{7}});
  t.add_predicate("e", 2);
  t.add_predicate("flag", 0).set({});
  t.add_function("f", 1).set({0}, 1);
  t.add_function("c", 0).set({}, 1);
  CHECK(load_structure(save_structure(t)) == t);
}

TEST_CASE("structure loading rejects bad input") {
  CHECK_THROWS_WITH(load_structure(R"({"domain":[0,1],"functions":{"f":[[0,1]]}})"),
                    Catch::Matchers::ContainsSubstring("partial function"));
  CHECK_THROWS_WITH(load_structure(R"({"domain":[0,1],"predicates":{"p":[[0],[1,1]]}})"),
                    Catch::Matchers::ContainsSubstring("arity mismatch"));
  CHECK_THROWS_WITH(load_structure(R"({"domain":[0,1],"predicates":{"p":[[2]]}})"),
                    Catch::Matchers::ContainsSubstring("outside the domain"));
  CHECK_THROWS_AS(load_structure(R"({"domain":[]})"), Error);
  CHECK_THROWS_AS(load_structure("{"), Error);
}

TEST_CASE("evaluation of literals and formulas") {
  Structure s = two_with_p0();
  CHECK(eval(s, {}, Formula::top()));
  CHECK(eval(s, {}, Formula::conjunction({})));
  CHECK(eval(s, {{"X", 0}, {"Y", 1}}, parse_formula("p(X) & ~p(Y)")));
  CHECK(eval(s, {{"X", 0}, {"Y", 0}}, parse_formula("X = Y")));
  CHECK_FALSE(eval(s, {{"X", 0}, {"Y", 1}}, parse_formula("X = Y")));
  CHECK(eval(s, {}, parse_formula("exists X . p(X)")));
  CHECK_FALSE(eval(s, {}, parse_formula("forall X . p(X)")));
  CHECK(eval(s, {}, parse_formula("p(0) & ~p(1)")));
  CHECK(eval(s, {{"X", 1}}, Literal::neg(parse_atom("p(X)"))));
  CHECK_THROWS_WITH(eval(s, {}, parse_formula("p(X)")), Catch::Matchers::ContainsSubstring("unassigned"));
  CHECK_THROWS_WITH(eval(s, {}, parse_formula("q")), Catch::Matchers::ContainsSubstring("uninterpreted"));
}

TEST_CASE("second-order quantifiers range over all relations") {
  Structure s = two_with_p0();
  Formula f = Formula::exists_so({{"r", SymbolKind::kPredicate, 1}}, parse_formula("forall X . r(X) <-> ~p(X)"));
  CHECK(satisfies(s, f));
  Formula g = Formula::forall_so({{"r", SymbolKind::kPredicate, 1}}, parse_formula("exists X . r(X)"));
  CHECK_FALSE(satisfies(s, g));
  Formula h = Formula::exists_so({{"g", SymbolKind::kFunction, 1}}, parse_formula("forall X . ~g(X) = X"));
  CHECK(satisfies(s, h));
}

// Random formulas over p/1, q/2 built from atoms, equalities and connectives.
Formula random_formula(std::mt19937_64& rng, int depth) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  auto var = [&] { return Term::variable(pick(2) ? "X" : "Y"); };
  if (depth == 0 || pick(3) == 0) {
    switch (pick(3)) {
      case 0: return Formula::atom("p", {var()});
      case 1: return Formula::atom("q", {var(), var()});
      default: return Formula::equal(var(), var());
    }
  }
  switch (pick(5)) {
    case 0: return Formula::negation(random_formula(rng, depth - 1));
    case 1: return Formula::conjunction({random_formula(rng, depth - 1), random_formula(rng, depth - 1)});
    case 2: return Formula::disjunction({random_formula(rng, depth - 1), random_formula(rng, depth - 1)});
    case 3: return Formula::implies(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    default: return Formula::iff(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
  }
}

TEST_CASE("evaluation is homomorphic over connectives and normal forms") {
  std::mt19937_64 rng(21);
  Program shape = parse_program("p(X) :- q(X,Y).");
  for (int round = 0; round < 300; ++round) {
    Structure s = testing::random_structure(shape, 1 + round % 3, rng);
    Formula a = random_formula(rng, 3), b = random_formula(rng, 3);
    for (const auto& alpha : assignments(s, {"X", "Y"})) {
      bool va = eval(s, alpha, a), vb = eval(s, alpha, b);
      CHECK(eval(s, alpha, Formula::conjunction({a, b})) == (va && vb));
      CHECK(eval(s, alpha, Formula::disjunction({a, b})) == (va || vb));
      CHECK(eval(s, alpha, Formula::negation(a)) == !va);
      CHECK(eval(s, alpha, to_nnf(a)) == va);
      bool dnf = false;
      for (const auto& row : to_dnf(a)) {
        bool all = true;
        for (const auto& l : row) all = all && eval(s, alpha, literal_formula(l));
        dnf = dnf || all;
      }
      CHECK(dnf == va);
      bool cnf = true;
      for (const auto& row : to_cnf(a)) {
        bool any = false;
        for (const auto& l : row) any = any || eval(s, alpha, literal_formula(l));
        cnf = cnf && any;
      }
      CHECK(cnf == va);
    }
  }
}

TEST_CASE("ins reads the true atoms of the chosen predicates") {
  Structure s = Structure::of_size(2);
  s.add_predicate("p", 1);
  CHECK(ins(s, {"p"}).empty());
  s.set("p", {0});
  s.set("p", {1});
  s.add_predicate("q", 1);
  CHECK(ins(s, {"p", "q"}) == Interpretation{{"p", {0}}, {"p", {1}}});
}

TEST_CASE("expansion counts") {
  Structure base = Structure::of_size(2);
  CHECK(enumerate_expansions(base, {{"p", SymbolKind::kPredicate, 1}}).size() == 4);
  CHECK(enumerate_expansions(base, {{"f", SymbolKind::kFunction, 1}}).size() == 4);
  CHECK(enumerate_expansions(base, {{"e", SymbolKind::kPredicate, 2}}).size() == 16);
  CHECK_THROWS_WITH(enumerate_expansions(base, {{"e", SymbolKind::kPredicate, 2}}, 15),
                    Catch::Matchers::ContainsSubstring("enumeration cap"));
  CHECK_THROWS_AS(enumerate_expansions(two_with_p0(), {{"p", SymbolKind::kPredicate, 1}}), Error);
}

TEST_CASE("expansions are distinct and match the predicted count") {
  std::vector<std::vector<Symbol>> shapes = {
      {{"p", SymbolKind::kPredicate, 0}, {"q", SymbolKind::kPredicate, 1}},
      {{"e", SymbolKind::kPredicate, 2}},
      {{"f", SymbolKind::kFunction, 1}, {"c", SymbolKind::kFunction, 0}},
      {{"p", SymbolKind::kPredicate, 1}, {"g", SymbolKind::kFunction, 2}},
  };
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const auto& extra : shapes) {
      if (expansion_count(n, extra) > 100000) continue;
      auto all = enumerate_expansions(Structure::of_size(n), extra);
      CHECK(all.size() == expansion_count(n, extra));
      std::set<std::string> distinct;
      for (const auto& s : all) distinct.insert(save_structure(s));
      CHECK(distinct.size() == all.size());
    }
  }
}

TEST_CASE("assignments") {
  Structure s3 = Structure::of_size(3);
  CHECK(assignments(s3, {}).size() == 1);
  CHECK(assignments(s3, {"X"}).size() == 3);
  auto xyz = assignments(Structure::of_size(2), {"X", "Y", "Z"});
  CHECK(xyz.size() == 8);
  CHECK(xyz.front() == Assignment{{"X", 0}, {"Y", 0}, {"Z", 0}});
  CHECK(xyz[1] == Assignment{{"X", 0}, {"Y", 0}, {"Z", 1}});
}

// ---------------------------------------------------------------------------
// Grounding
// ---------------------------------------------------------------------------

TEST_CASE("split rules into positive intensional atoms and residue") {
  Program p = parse_program("p :- q, not r. q. r. s(X) :- e(X), s(X). t :- X = Y.");
  auto a = split_rule(p.rules()[0], p);
  REQUIRE(a.positive.size() == 1);
  CHECK(a.positive[0].predicate == "q");
  REQUIRE(a.residue.size() == 1);
  CHECK(a.residue[0].negated);
  auto b = split_rule(p.rules()[3], p);
  REQUIRE(b.positive.size() == 1);
  CHECK(b.positive[0].predicate == "s");
  CHECK(b.residue[0].atom.predicate == "e");
  auto c = split_rule(p.rules()[4], p);
  CHECK(c.positive.empty());
  CHECK(c.residue.size() == 1);
}

TEST_CASE("GL reduct examples") {
  Program p = parse_program("p :- not q.");
  Structure s = Structure::of_size(1);
  s.add_predicate("p", 0);
  s.add_predicate("q", 0);
  auto g = gl_reduct(p, s);
  REQUIRE(g.size() == 1);
  CHECK(g.begin()->body.empty());
  CHECK(g.begin()->head == PositiveClause{{"p", {}}});
  s.set("q", {});
  CHECK(gl_reduct(p, s).empty());

  Program e = parse_program("p(X) :- e(X), not q(X).");
  Structure t = Structure::of_size(2);
  t.add_predicate("e", 1).set({0});
  t.relation("e").set({1});
  t.add_predicate("q", 1).set({1});
  t.add_predicate("p", 1);
  auto h = gl_reduct(e, t);
  REQUIRE(h.size() == 1);
  CHECK(h.begin()->head == PositiveClause{{"p", {0}}});
  CHECK(render(*h.begin(), t) == "p(0).");

  CHECK_THROWS_WITH(gl_reduct(e, Structure::of_size(2)), Catch::Matchers::ContainsSubstring("missing symbol"));
}

TEST_CASE("grounding evaluates nested function terms") {
  Program p = parse_program("p(f(X)) :- e(X), f(X) != X.");
  Structure s = Structure::of_size(3);
  s.add_predicate("e", 1).set({0});
  s.relation("e").set({2});
  FunctionTable& f = s.add_function("f", 1);
  f.set({0}, 1);
  f.set({1}, 1);
  f.set({2}, 2);
  s.add_predicate("p", 1);
  auto g = gl_reduct(p, s);
  REQUIRE(g.size() == 1);
  CHECK(g.begin()->head == PositiveClause{{"p", {1}}});
}

// Reference reduct built directly from the definition, via the evaluator.
std::set<GroundRule> reference_reduct(const Program& p, const Structure& s) {
  std::set<GroundRule> out;
  Evaluator ev(s);
  for (const auto& r : p.rules()) {
    auto split = split_rule(r, p);
    for (const auto& alpha : assignments(s, rule_variables(r))) {
      bool residue = std::all_of(split.residue.begin(), split.residue.end(), [&](const Literal& l) { return ev.literal(l, alpha); });
      if (!residue) continue;
      auto ground = [&](const Atom& a) {
        Tuple t;
        for (const auto& x : a.args) t.push_back(ev.term(x, alpha));
        return GroundAtom{a.predicate, t};
      };
      GroundRule g;
      for (const auto& a : split.positive) g.body.insert(ground(a));
      for (const auto& a : r.head) g.head.insert(ground(a));
      out.insert(g);
    }
  }
  return out;
}

TEST_CASE("GL reduct matches the definition on random programs") {
  std::mt19937_64 rng(5);
  for (const auto& p : testing::corpus(200, 31)) {
    for (std::size_t n = 1; n <= 3; ++n) {
      Structure s = testing::random_structure(p, n, rng);
      auto g = gl_reduct(p, s);
      CHECK(g == reference_reduct(p, s));
      std::size_t bound = 0;
      for (const auto& r : p.rules()) bound += checked_power(n, rule_variables(r).size());
      CHECK(g.size() <= bound);
      for (const auto& rule : g) {
        for (const auto& a : rule.body) CHECK(p.is_intensional(a.predicate));
        for (const auto& a : rule.head) CHECK(p.is_intensional(a.predicate));
      }
    }
  }
}

TEST_CASE("flipping extensional bits only changes which instances survive") {
  std::mt19937_64 rng(6);
  for (const auto& p : testing::corpus(100, 32)) {
    Structure s = testing::random_structure(p, 2, rng);
    // All instances with the residue ignored.
    Program positive_only;
    std::vector<Rule> rules;
    for (const auto& r : p.rules()) {
      Rule q = r;
      q.body.clear();
      for (const auto& l : r.body) {
        if (is_positive_intensional(l, p.intensional())) q.body.push_back(l);
      }
      rules.push_back(q);
    }
    for (const auto& [name, rel] : s.relations()) {
      if (p.is_intensional(name)) continue;
      Structure t = s;
      for (std::size_t c = 0; c < rel.cells(); ++c) t.relation(name).set_at(c, !rel.at(c));
      auto all = reference_reduct(Program(rules), s.restrict([&](const std::string&) { return true; }));
      for (const auto& g : gl_reduct(p, t)) CHECK(all.count(g) == 1);
    }
  }
}
