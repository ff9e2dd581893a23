#include <catch_amalgamated.hpp>

#include <lpx/model_finder.hpp>
#include <lpx/stable.hpp>
#include <lpx/transforms.hpp>

#include "support/corpus.hpp"

using namespace lpx;

namespace {

std::set<std::string> rendered(const Program& p) {
  std::set<std::string> out;
  for (const auto& r : p.rules()) out.insert(render(r));
  return out;
}

std::vector<Symbol> predicates(const Program& p) {
  std::vector<Symbol> out;
  for (const auto& s : p.vocabulary().symbols()) out.push_back(s);
  return out;
}

// Every structure over p's vocabulary of size n that is a stable model,
// restricted to `keep`.
std::set<std::string> stable_models(const Program& p, std::size_t n, const std::vector<Symbol>& aux, const Vocabulary& keep) {
  return testing::restricted_set(enumerate_stable_expansions(Structure::of_size(n), p, aux), keep);
}

Vocabulary vocabulary_of(const std::vector<Symbol>& ss) {
  Vocabulary v;
  for (const auto& s : ss) v.add(s);
  return v;
}

Structure with_relation(std::size_t n, const std::string& name, std::size_t arity, const std::vector<Tuple>& tuples) {
  Structure s = Structure::of_size(n);
  Relation& r = s.add_predicate(name, arity);
  for (const auto& t : tuples) r.set(t);
  return s;
}

// Output vocabulary = input vocabulary + manifest, and no manifest symbol
// shadows an input symbol.
void check_hygiene(const Vocabulary& input, const TransformReport& rep) {
  std::set<std::string> fresh;
  for (const auto& s : rep.manifest) {
    INFO(s.name);
    CHECK(input.find(s.name) == nullptr);
    CHECK(fresh.insert(s.name).second);
  }
  for (const auto& [name, info] : rep.program.vocabulary()) {
    INFO(name);
    CHECK((input.find(name) != nullptr || fresh.count(name) != 0));
  }
}

class FormulaGenerator {
 public:
  FormulaGenerator(std::uint64_t seed, std::vector<Formula> atoms) : rng_(seed), atoms_(std::move(atoms)) {}

  Formula next(int depth) {
    if (depth == 0 || coin(0.3)) {
      Formula a = atoms_[std::uniform_int_distribution<std::size_t>(0, atoms_.size() - 1)(rng_)];
      return coin(0.4) ? Formula::negation(a) : a;
    }
    std::vector<Formula> cs{next(depth - 1), next(depth - 1)};
    return coin(0.5) ? Formula::conjunction(cs) : Formula::disjunction(cs);
  }

 private:
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64 rng_;
  std::vector<Formula> atoms_;
};

}  // namespace

// ---------------------------------------------------------------------------
// shift
// ---------------------------------------------------------------------------

TEST_CASE("shift splits disjunctive heads", "[shift]") {
  auto rep = shift(parse_program("p ; q."));
  CHECK(rendered(rep.program) == std::set<std::string>{"p :- not q.", "q :- not p."});
  CHECK(classify(rep.program).normal);
  CHECK(rendered(shift(parse_program("#false :- p.")).program) == std::set<std::string>{"#false :- p."});
  CHECK(rendered(shift(parse_program("p ; p :- q.")).program) == std::set<std::string>{"p :- q."});
}

TEST_CASE("head-cycle-freeness examples", "[shift]") {
  CHECK(head_cycle_free(parse_program("p ; q.")));
  CHECK(head_cycle_free(parse_program("p ; q :- r. r :- p.")));
  CHECK_FALSE(head_cycle_free(parse_program("p ; q. p :- q. q :- p.")));
  CHECK_FALSE(head_cycle_free(parse_program("p(X) ; p(Y) :- q(X,Y). p(X) :- p(Y), r(X,Y).")));
  CHECK_THROWS_WITH(shift(parse_program("p ; q. p :- q. q :- p.")), Catch::Matchers::ContainsSubstring("head-cycle-free"));
}

TEST_CASE("shift preserves stable models of a small program", "[shift]") {
  auto p = parse_program("p ; q. r :- p. r :- q.");
  auto s = shift(p).program;
  auto aux = predicates(p);
  auto before = stable_models(p, 1, aux, p.vocabulary());
  CHECK(before.size() == 2);
  CHECK(stable_models(s, 1, aux, p.vocabulary()) == before);
}

TEST_CASE("shift preserves stable expansions over the corpus", "[shift]") {
  std::mt19937_64 rng(17);
  std::size_t checked = 0, disjunctive = 0;
  for (const auto& p : testing::corpus(300, 4242)) {
    if (!head_cycle_free(p)) continue;
    auto s = shift(p).program;
    REQUIRE(classify(s).normal);
    for (std::size_t n = 1; n <= 2; ++n) {
      Structure base = testing::random_structure(p, n, rng);
      Vocabulary ext;
      std::vector<Symbol> aux;
      for (const auto& sym : p.vocabulary().symbols()) {
        if (p.is_intensional(sym.name)) {
          aux.push_back(sym);
        } else {
          ext.add(sym);
        }
      }
      Structure b = base.restrict(ext);
      auto left = enumerate_stable_expansions(b, p, aux);
      auto right = enumerate_stable_expansions(b, s, aux);
      INFO(render_program(p));
      CHECK(testing::restricted_set(left, p.vocabulary()) == testing::restricted_set(right, p.vocabulary()));
      for (const auto& e : right) CHECK(is_stable_progression(e, s).stable);
      ++checked;
    }
    if (!classify(p).normal) ++disjunctive;
  }
  CHECK(checked > 300);
  CHECK(disjunctive > 30);
}

// ---------------------------------------------------------------------------
// Disjunctive to normal for infinite domains
// ---------------------------------------------------------------------------

TEST_CASE("dlp2nlp counts for a two-atom disjunction", "[dlp2nlp]") {
  auto rep = dlp_to_nlp_infinite(parse_program("p ; q."));
  CHECK(rep.count("pi1") == 10);
  CHECK(rep.count("pi2") == 10);
  CHECK(rep.count("pi3") == 2);
  CHECK(rep.count("pi4") == 3);
  CHECK(rep.count("pi5") == 3);
  CHECK(rep.program.size() == 28);
  CHECK(classify(rep.program).normal);
}

TEST_CASE("dlp2nlp simulation rule layout", "[dlp2nlp]") {
  auto rep = dlp_to_nlp_infinite(parse_program("r(X) :- p(X), q(X). p(X) :- s(X). q(X) :- s(X)."));
  const Rule& sim = rep.program.rules()[rep.count("pi1") + rep.count("pi2") + 1];
  CHECK(render(sim) ==
        "__true(V) :- __true(X1), __enc(__c_p,X,U1_1), Z1 = U1_1, __in(Z1,X1), __true(X2), __enc(__c_q,X,U2_1), "
        "Z2 = U2_1, __in(Z2,X2), __ext(X1,Z1,Y1), __ext(X2,Z2,Y2), __enc(__c_r,X,H1_1), __enc(__c_eps,H1_1,V1), "
        "__mrg(Y1,Y2,W2), __mrg(W2,V1,V).");
  // Two code chains for the intensional body atoms, one for the head.
  std::size_t chains = 0;
  for (const auto& l : sim.body) {
    if (!l.atom.is_equality() && l.atom.predicate == "__in") ++chains;
  }
  CHECK(chains == 2);
}

TEST_CASE("dlp2nlp structural contract over the corpus", "[dlp2nlp]") {
  const std::map<std::string, std::size_t> inventory = {{"__enc", 3}, {"__enc_bar", 3}, {"__mrg", 3}, {"__ext", 3},
                                                        {"__ok_e", 2}, {"__in", 2},      {"__subc", 2}, {"__equ", 2},
                                                        {"__true", 1}, {"__false", 1}};
  for (const auto& p : testing::corpus(200, 99)) {
    INFO(render_program(p));
    auto rep = dlp_to_nlp_infinite(p);
    CHECK(classify(rep.program).normal);
    CHECK(rep.rule_counts == dlp_to_nlp_expected_counts(p));
    std::map<std::string, std::size_t> preds;
    std::set<std::string> constants;
    for (const auto& s : rep.manifest) {
      if (s.kind == SymbolKind::kPredicate) {
        preds[s.name] = s.arity;
      } else {
        CHECK(s.arity == 0);
        constants.insert(s.name);
      }
    }
    CHECK(preds == inventory);
    std::set<std::string> expected{"__c_eps"};
    for (const auto& q : p.predicates_in_order()) expected.insert("__c_" + q);
    CHECK(constants == expected);
    Vocabulary v = p.vocabulary();
    for (const auto& s : rep.fresh_symbols()) v.add(s);
    CHECK(rep.program.vocabulary() == v);
    CHECK(render_program(parse_program(render_program(rep.program))) == render_program(rep.program));
  }
}

TEST_CASE("dlp2nlp flag names avoid input symbols", "[dlp2nlp]") {
  auto rep = dlp_to_nlp_infinite(parse_program("__c_p ; p. __enc(X) :- p."));
  REQUIRE(rep.fresh("__c_p") == nullptr);
  CHECK(rep.fresh("__enc_1") != nullptr);
  check_hygiene(parse_program("__c_p ; p. __enc(X) :- p.").vocabulary(), rep);
}

// ---------------------------------------------------------------------------
// Normal programs and universal theories
// ---------------------------------------------------------------------------

TEST_CASE("rank width is k times the intensional count plus one", "[universal]") {
  auto p = parse_program("p(X,Y) :- e(X,Y). q(X) :- p(X,Y), not q(Y).");
  auto t = nlp_to_universal_theory(p, 2);
  CHECK(t.order_width == 5);
  std::size_t p_ranks = 0, q_ranks = 0;
  for (const auto& s : t.manifest) {
    if (s.name.rfind("__o_p_", 0) == 0) {
      CHECK(s.arity == 2);
      ++p_ranks;
    }
    if (s.name.rfind("__o_q_", 0) == 0) {
      CHECK(s.arity == 1);
      ++q_ranks;
    }
  }
  CHECK(p_ranks == 5);
  CHECK(q_ranks == 5);
  CHECK(is_quantifier_free(t.matrix));
  for (const auto& s : t.manifest) CHECK(s.arity <= 2);
}

TEST_CASE("universal theory rejects bad input", "[universal]") {
  CHECK_THROWS_WITH(nlp_to_universal_theory(parse_program("p ; q."), 1), Catch::Matchers::ContainsSubstring("not normal"));
  CHECK_THROWS_WITH(nlp_to_universal_theory(parse_program("p(X,Y) :- e(X,Y)."), 1),
                    Catch::Matchers::ContainsSubstring("arity above 1"));
}

TEST_CASE("universal theory of a :- not b has the stable models", "[universal]") {
  auto p = parse_program("a :- not b.");
  auto t = nlp_to_universal_theory(p, 1);
  auto unknown = predicates(p);
  for (const auto& s : t.prefix_symbols()) unknown.push_back(s);
  std::vector<std::string> keep;
  for (const auto& s : predicates(p)) keep.push_back(s.name);
  auto models = find_models(Structure::of_size(2), unknown, t.matrix, keep);
  CHECK(testing::restricted_set(models, p.vocabulary()) == stable_models(p, 2, predicates(p), p.vocabulary()));
  CHECK(models.size() == 2);
}

TEST_CASE("self-supporting atoms are not derivable", "[universal]") {
  auto p = parse_program("p :- p.");
  auto t = nlp_to_universal_theory(p, 1);
  auto unknown = t.prefix_symbols();
  Structure base = with_relation(2, "p", 0, {{}});
  ModelFinder mf(base, unknown);
  mf.require(t.matrix);
  CHECK_FALSE(mf.satisfiable());
  Structure empty = Structure::of_size(2);
  empty.add_predicate("p", 0);
  ModelFinder mf2(empty, unknown);
  mf2.require(t.matrix);
  CHECK(mf2.satisfiable());
}

TEST_CASE("model finder agrees with brute-force expansion", "[universal]") {
  auto p = parse_program("a :- not b. b :- not a.");
  auto t = nlp_to_universal_theory(p, 1);
  std::vector<Symbol> unknown = predicates(p);
  for (const auto& s : t.prefix_symbols()) unknown.push_back(s);
  Formula closed = universal_closure(t.matrix);
  std::set<std::string> brute;
  for_each_expansion(Structure::of_size(2), unknown, [&](const Structure& e) {
    if (satisfies(e, closed)) brute.insert(save_structure(e));
    return true;
  });
  auto found = find_models(Structure::of_size(2), unknown, t.matrix);
  CHECK(testing::restricted_set(found, vocabulary_of(unknown)) == brute);
  CHECK(!brute.empty());
}

TEST_CASE("universal theories match stable models over the normal corpus", "[universal]") {
  testing::CorpusOptions opt;
  opt.disjunction = false;
  std::size_t checked = 0, nonempty = 0;
  for (const auto& p : testing::corpus(20, 512, opt)) {
    std::size_t k = 1;
    for (const auto& s : p.vocabulary().symbols()) k = std::max(k, s.arity);
    auto t = nlp_to_universal_theory(p, k);
    auto unknown = predicates(p);
    std::vector<std::string> keep;
    for (const auto& s : unknown) keep.push_back(s.name);
    for (const auto& s : t.prefix_symbols()) unknown.push_back(s);
    INFO(render_program(p));
    auto models = testing::restricted_set(find_models(Structure::of_size(2), unknown, t.matrix, keep), p.vocabulary());
    auto stable = stable_models(p, 2, predicates(p), p.vocabulary());
    CHECK(models == stable);
    ++checked;
    if (!stable.empty()) ++nonempty;
  }
  CHECK(checked == 20);
  CHECK(nonempty > 5);
}

TEST_CASE("constraints from universal theories", "[universal]") {
  UniversalTheory t;
  t.matrix = parse_formula("p(X)");
  CHECK(rendered(universal_theory_to_constraints(t).program) == std::set<std::string>{"#false :- not p(X)."});
  t.matrix = parse_formula("~p(X) | q(X)");
  CHECK(rendered(universal_theory_to_constraints(t).program) == std::set<std::string>{"#false :- p(X), not q(X)."});
  t.matrix = parse_formula("forall X . p(X)");
  CHECK_THROWS_WITH(universal_theory_to_constraints(t), Catch::Matchers::ContainsSubstring("quantifier-free"));
}

TEST_CASE("constraint programs keep the models of random theories", "[universal]") {
  Term x = Term::variable("X"), y = Term::variable("Y");
  Term fx = Term::function("f", {x});
  FormulaGenerator gen(7, {Formula::atom("p", {x}), Formula::atom("p", {y}), Formula::atom("p", {fx}), Formula::atom("q"),
                           Formula::equal(x, y), Formula::equal(fx, y)});
  std::vector<Symbol> all = {{"p", SymbolKind::kPredicate, 1}, {"q", SymbolKind::kPredicate, 0}, {"f", SymbolKind::kFunction, 1}};
  std::size_t satisfiable = 0;
  for (int i = 0; i < 40; ++i) {
    UniversalTheory t;
    t.matrix = gen.next(3);
    t.prefix = {{"f", SymbolKind::kFunction, 1}};
    auto rep = universal_theory_to_constraints(t);
    CHECK(rep.program.intensional().empty());
    for (std::size_t n = 1; n <= 2; ++n) {
      INFO(render(t.matrix) << " at size " << n);
      auto models = testing::restricted_set(find_models(Structure::of_size(n), all, t.matrix), vocabulary_of(all));
      auto stable = testing::restricted_set(enumerate_stable_expansions(Structure::of_size(n), rep.program, all), vocabulary_of(all));
      CHECK(models == stable);
      if (!models.empty()) ++satisfiable;
    }
  }
  CHECK(satisfiable > 10);
}

TEST_CASE("constraints of a program's theory keep its stable models", "[universal]") {
  for (const char* text : {"a :- not b.", "p :- p.", "a :- not b. b :- not a."}) {
    auto p = parse_program(text);
    auto t = nlp_to_universal_theory(p, 1);
    auto rep = universal_theory_to_constraints(t);
    INFO(text);
    auto aux = predicates(p);
    for (const auto& s : rep.fresh_symbols()) aux.push_back(s);
    for (std::size_t n = 1; n <= 2; ++n) {
      auto unknown = aux;
      auto models = testing::restricted_set(find_models(Structure::of_size(n), unknown, t.matrix), vocabulary_of(aux));
      auto stable = testing::restricted_set(enumerate_stable_expansions(Structure::of_size(n), rep.program, aux), vocabulary_of(aux));
      CHECK(models == stable);
    }
  }
}

// ---------------------------------------------------------------------------
// Saturation
// ---------------------------------------------------------------------------

TEST_CASE("saturation on a tautology and on a falsifiable matrix", "[so2dlp]") {
  std::vector<Symbol> sigma = {{"y", SymbolKind::kPredicate, 1}};
  auto taut = so2dlp(parse_formula("y(X) | ~y(X)"), {}, sigma, {"X"});
  auto only = so2dlp(parse_formula("y(X)"), {}, sigma, {"X"});
  CHECK(taut.count("saturate") == 2 * sigma.size());
  for (std::size_t n = 1; n <= 2; ++n) {
    Structure base = Structure::of_size(n);
    CHECK(has_stable_expansion(base, taut.program, missing_symbols(base, taut.program)));
    CHECK_FALSE(has_stable_expansion(base, only.program, missing_symbols(base, only.program)));
  }
}

TEST_CASE("saturation input checks", "[so2dlp]") {
  std::vector<Symbol> sigma = {{"y", SymbolKind::kPredicate, 2}};
  CHECK_THROWS_WITH(so2dlp(parse_formula("y(X,X)"), {}, sigma, {"X"}), Catch::Matchers::ContainsSubstring("width mismatch"));
  CHECK_THROWS_WITH(so2dlp(parse_formula("exists Z . y(X,Z)"), {}, sigma, {"X", "Z"}),
                    Catch::Matchers::ContainsSubstring("quantifiers"));
}

TEST_CASE("saturation matches second-order evaluation", "[so2dlp]") {
  Term x = Term::variable("X"), w = Term::variable("W");
  FormulaGenerator gen(23, {Formula::atom("t", {x}), Formula::atom("t", {w}), Formula::atom("s", {x}), Formula::atom("s", {w}),
                            Formula::atom("e", {x}), Formula::atom("e", {w}), Formula::equal(x, w)});
  std::vector<Symbol> tau = {{"t", SymbolKind::kPredicate, 1}}, sigma = {{"s", SymbolKind::kPredicate, 1}};
  std::size_t yes = 0, no = 0;
  for (int i = 0; i < 30; ++i) {
    Formula m = gen.next(3);
    auto rep = so2dlp(m, tau, sigma, {"X"});
    CHECK(rep.count("saturate") == 2);
    Formula sentence = saturation_sentence(m, tau, sigma, {"X"});
    for (std::size_t n = 1; n <= 2; ++n) {
      for_each_expansion(Structure::of_size(n), {{"e", SymbolKind::kPredicate, 1}}, [&](const Structure& base) {
        INFO(render(sentence) << "\n" << save_structure(base));
        bool expected = satisfies(base, sentence);
        Structure b = base;
        bool got = has_stable_expansion(b, rep.program, missing_symbols(b, rep.program));
        CHECK(got == expected);
        (expected ? yes : no)++;
        return true;
      });
    }
  }
  CHECK(yes > 20);
  CHECK(no > 20);
}

TEST_CASE("parity examples at size two", "[parity]") {
  auto rep = parity_program(1);
  auto has = [&](const std::vector<Tuple>& ps) {
    Structure base = with_relation(2, "p", 2, ps);
    return has_stable_expansion(base, rep.program, missing_symbols(base, rep.program));
  };
  CHECK(has({}));
  CHECK_FALSE(has({{0, 0}}));
  CHECK(has({{0, 0}, {1, 1}}));
  CHECK_FALSE(has({{0, 1}, {1, 0}, {1, 1}}));
  check_hygiene(vocabulary_of({{"p", SymbolKind::kPredicate, 2}}), rep);
}

TEST_CASE("parity at size one", "[parity]") {
  auto rep = parity_program(1);
  for (bool on : {false, true}) {
    Structure base = with_relation(1, "p", 2, on ? std::vector<Tuple>{{0, 0}} : std::vector<Tuple>{});
    CHECK(has_stable_expansion(base, rep.program, missing_symbols(base, rep.program)) == !on);
  }
}

// ---------------------------------------------------------------------------
// Finite/infinite combination
// ---------------------------------------------------------------------------

TEST_CASE("guards prepend the flag", "[combine]") {
  CHECK(render_program(guard(parse_program("p :- q."), "__fin")) == "p :- __fin, q.\n");
}

TEST_CASE("infinity test alone never fires on one element", "[combine]") {
  CombineNames n;
  n.arc = "__arc";
  n.arc_bar = "__arc_bar";
  n.ok_a = "__ok_a";
  n.inf_bar = "__inf_bar";
  Program inf(detail::infinity_test(n));
  Structure base = Structure::of_size(1);
  auto models = enumerate_stable_expansions(base, inf, missing_symbols(base, inf));
  CHECK(!models.empty());
  for (const auto& m : models) CHECK_FALSE(m.relation("__inf").contains({}));
}

TEST_CASE("combination picks the finite branch", "[combine]") {
  auto rep = combine_fin_inf(parse_program("p."), parse_program("q."));
  CHECK(rep.count("infinity_test") == 7);
  for (std::size_t n = 1; n <= 2; ++n) {
    Structure base = Structure::of_size(n);
    auto models = enumerate_stable_expansions(base, rep.program, missing_symbols(base, rep.program));
    CHECK(!models.empty());
    for (const auto& m : models) {
      CHECK(m.relation("p").contains({}));
      CHECK_FALSE(m.relation("q").contains({}));
      CHECK(m.relation("__fin").contains({}));
      CHECK_FALSE(m.relation("__inf").contains({}));
    }
  }
  CHECK_THROWS_WITH(combine_fin_inf(parse_program("__fin."), parse_program("q.")), Catch::Matchers::ContainsSubstring("collides"));
}

TEST_CASE("combination with the infinite-domain translation", "[combine]") {
  testing::CorpusOptions opt;
  opt.max_arity = 1;
  opt.max_predicates = 2;
  opt.max_rules = 3;
  std::size_t checked = 0;
  for (const auto& p : testing::corpus(8, 31, opt)) {
    auto rep = combine_fin_inf(p, dlp_to_nlp_infinite(p).program);
    INFO(render_program(p));
    for (std::size_t n = 1; n <= 2; ++n) {
      Structure base = Structure::of_size(n);
      auto aux = missing_symbols(base, rep.program);
      auto models = enumerate_stable_expansions(base, rep.program, aux);
      for (const auto& m : models) {
        CHECK(m.relation("__fin").contains({}));
        CHECK_FALSE(m.relation("__inf").contains({}));
      }
      CHECK(testing::restricted_set(models, p.vocabulary()) == stable_models(p, n, predicates(p), p.vocabulary()));
      ++checked;
    }
  }
  CHECK(checked == 16);
}

// ---------------------------------------------------------------------------
// Fresh-symbol hygiene
// ---------------------------------------------------------------------------

TEST_CASE("fresh symbols never shadow input symbols", "[hygiene]") {
  for (const auto& p : testing::corpus(150, 2718)) {
    INFO(render_program(p));
    if (head_cycle_free(p)) check_hygiene(p.vocabulary(), shift(p));
    auto d = dlp_to_nlp_infinite(p);
    check_hygiene(p.vocabulary(), d);
    Vocabulary both = p.vocabulary();
    for (const auto& s : d.fresh_symbols()) both.add(s);
    check_hygiene(both, combine_fin_inf(p, d.program));
    if (classify(p).normal) {
      std::size_t k = 1;
      for (const auto& s : p.vocabulary().symbols()) k = std::max(k, s.arity);
      auto t = nlp_to_universal_theory(p, k);
      for (const auto& s : t.manifest) CHECK(p.vocabulary().find(s.name) == nullptr);
    }
  }
}
