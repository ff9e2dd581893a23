// Normal programs and universal theories with existential symbols:
// a normal program becomes "there are an order and derivation ranks such
// that every true atom is derived from atoms of smaller rank", and a
// universal theory becomes a set of constraints.

#ifndef LPX_TRANSFORMS_UNIVERSAL_HPP_
#define LPX_TRANSFORMS_UNIVERSAL_HPP_

#include <lpx/grounder.hpp>
#include <lpx/sm_formula.hpp>
#include <lpx/transforms/common.hpp>

namespace lpx {

// exists prefix . forall free-variables . matrix, matrix quantifier-free.
struct UniversalTheory {
  std::vector<SoVariable> prefix;
  Formula matrix = Formula::top();
  std::vector<FreshSymbol> manifest;
  std::size_t order_width = 0;  // rank tuple length, k * |tau| + 1

  std::vector<Symbol> prefix_symbols() const {
    std::vector<Symbol> out;
    for (const auto& v : prefix) out.push_back({v.name, v.kind, v.arity});
    return out;
  }
  Formula sentence() const { return Formula::exists_so(prefix, universal_closure(matrix)); }
};

inline std::string render(const UniversalTheory& t) { return render(t.sentence()); }

namespace detail {

// s < t in the lexicographic order induced by `lt`.
inline Formula lex_less(const std::vector<Term>& s, const std::vector<Term>& t, const std::string& lt) {
  std::vector<Formula> cases;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<Formula> c;
    for (std::size_t j = 0; j < i; ++j) c.push_back(Formula::equal(s[j], t[j]));
    c.push_back(Formula::atom(lt, {s[i], t[i]}));
    cases.push_back(Formula::conjunction(std::move(c)));
  }
  return Formula::disjunction(std::move(cases));
}

// A rule rewritten so that its head is P(T1..Tn) over the template
// variables; other variables are renamed away from them.
inline Rule normalize_head(const Rule& r, const std::vector<Term>& tmpl) {
  std::vector<std::string> used = rule_variables(r);
  for (const auto& t : tmpl) used.push_back(t.name);
  FreshVariables fresh(used);
  std::map<std::string, Term> sub;
  std::vector<std::pair<Term, Term>> equalities;
  const Atom& h = r.head[0];
  for (std::size_t j = 0; j < h.args.size(); ++j) {
    const Term& t = h.args[j];
    if (t.is_variable() && !sub.count(t.name)) {
      sub[t.name] = tmpl[j];
    } else {
      equalities.emplace_back(tmpl[j], t);
    }
  }
  for (const auto& v : rule_variables(r)) {
    if (!sub.count(v)) sub[v] = fresh(v);
  }
  Rule out;
  out.head = {Atom::pred(h.predicate, tmpl)};
  for (const auto& [a, b] : equalities) out.body.push_back(build::eq(a, substitute(b, sub)));
  for (const auto& l : r.body) out.body.push_back(Literal{substitute(l.atom, sub), l.negated});
  return out;
}

}  // namespace detail

inline UniversalTheory nlp_to_universal_theory(const Program& p, std::size_t k) {
  if (!classify(p).normal) throw Error("nlp2theory: program is not normal");
  if (k == 0) throw Error("nlp2theory: arity bound must be positive");
  for (const auto& [name, info] : p.vocabulary()) {
    if (info.kind == SymbolKind::kPredicate && info.arity > k) {
      throw Error("nlp2theory: predicate " + name + " has arity above " + std::to_string(k));
    }
  }
  auto tau = intensional_symbols(p);
  std::size_t c = k * tau.size() + 1;

  Manifest m(p.vocabulary());
  std::string lt = m.predicate("__lt", 2, "strict total order");
  std::string mx = m.function("__max", 0, "greatest element of the order");
  std::map<std::string, std::vector<std::string>> ranks;  // P -> o_P^1 .. o_P^c
  for (const auto& s : tau) {
    for (std::size_t i = 1; i <= c; ++i) {
      ranks[s.name].push_back(m.function("__o_" + s.name + "_" + std::to_string(i), s.arity, "derivation rank component " +
                                                                                          std::to_string(i) + " of " + s.name));
    }
  }
  auto ord = [&](const Atom& a) {
    std::vector<Term> out;
    const auto& fs = ranks.at(a.predicate);
    for (std::size_t i = c; i >= 1; --i) out.push_back(Term::function(fs[i - 1], a.args));
    return out;
  };
  std::vector<Term> top(c, Term::constant(mx));
  auto derivable = [&](const Atom& a) { return detail::lex_less(ord(a), top, lt); };
  auto less = [&](const Atom& a, const Atom& b) { return detail::lex_less(ord(a), ord(b), lt); };

  Term x = Term::variable("X"), y = Term::variable("Y"), z = Term::variable("Z");
  std::vector<Formula> parts = {
      Formula::negation(Formula::atom(lt, {x, x})),
      Formula::implies(Formula::conjunction({Formula::atom(lt, {x, y}), Formula::atom(lt, {y, z})}), Formula::atom(lt, {x, z})),
      Formula::disjunction({Formula::atom(lt, {x, y}), Formula::equal(x, y), Formula::atom(lt, {y, x})}),
      Formula::disjunction({Formula::atom(lt, {x, Term::constant(mx)}), Formula::equal(x, Term::constant(mx))}),
  };

  for (const auto& r : p.rules()) {
    if (r.head.empty()) {
      std::vector<Formula> body;
      for (const auto& l : r.body) body.push_back(Formula::literal(l));
      parts.push_back(Formula::negation(Formula::conjunction(std::move(body))));
    }
  }

  for (const auto& s : tau) {
    std::vector<Term> tmpl = tuple_variables(s.arity, "T");
    Atom lambda = Atom::pred(s.name, tmpl);
    std::vector<Formula> supports;
    std::size_t i = 0;
    for (const auto& r : p.rules()) {
      if (r.head.empty() || r.head[0].predicate != s.name) continue;
      ++i;
      Rule g = detail::normalize_head(r, tmpl);
      RuleSplit split = split_rule(g, p);
      std::vector<Formula> zeta, full;
      for (const auto& l : split.residue) zeta.push_back(Formula::literal(l));
      full = zeta;
      for (const auto& a : split.positive) full.push_back(Formula::atom(a));
      parts.push_back(
          Formula::implies(Formula::disjunction({Formula::conjunction(full), Formula::atom(lambda)}), derivable(lambda)));
      // The existential body variables become Skolem terms over the template.
      std::map<std::string, Term> skolem;
      for (const auto& v : rule_variables(g)) {
        if (std::find(tmpl.begin(), tmpl.end(), Term::variable(v)) != tmpl.end()) continue;
        std::string f = m.function("__sk_" + s.name + "_" + std::to_string(i) + "_" + v, s.arity,
                                   "witness for " + v + " in rule " + std::to_string(i) + " of " + s.name);
        skolem[v] = Term::function(f, tmpl);
      }
      std::vector<Formula> support;
      for (const auto& l : split.residue) support.push_back(Formula::literal(Literal{substitute(l.atom, skolem), l.negated}));
      for (const auto& a : split.positive) support.push_back(less(substitute(a, skolem), lambda));
      supports.push_back(Formula::conjunction(std::move(support)));
    }
    parts.push_back(Formula::implies(
        derivable(lambda), Formula::conjunction({Formula::atom(lambda), Formula::disjunction(std::move(supports))})));
  }

  UniversalTheory t;
  t.matrix = Formula::conjunction(std::move(parts));
  t.manifest = m.take();
  for (const auto& s : t.manifest) t.prefix.push_back({s.name, s.kind, s.arity});
  t.order_width = c;
  return t;
}

namespace detail {

inline Atom formula_atom(const Formula& f) {
  if (f.kind() == Formula::Kind::kEqual) return Atom::equality(f.terms()[0], f.terms()[1]);
  return Atom::pred(f.predicate(), f.terms());
}

}  // namespace detail

// One constraint per CNF clause, with every literal's sign flipped.
inline TransformReport universal_theory_to_constraints(const UniversalTheory& t) {
  if (!is_quantifier_free(t.matrix)) throw Error("theory2lp: matrix is not quantifier-free");
  std::vector<Rule> rules;
  for (const auto& clause : to_cnf(t.matrix)) {
    Rule r;
    for (const auto& l : clause) r.body.push_back(Literal{detail::formula_atom(l.atom), !l.negated});
    rules.push_back(std::move(r));
  }
  TransformReport rep;
  rep.kind = "theory2lp";
  rep.program = Program(std::move(rules));
  for (const auto& v : t.prefix) {
    const FreshSymbol* known = nullptr;
    for (const auto& s : t.manifest) {
      if (s.name == v.name) known = &s;
    }
    rep.manifest.push_back({v.name, v.kind, v.arity, known ? known->role : "existential symbol"});
  }
  rep.rule_counts = {{"constraints", rep.program.size()}};
  return rep;
}

}  // namespace lpx

#endif  // LPX_TRANSFORMS_UNIVERSAL_HPP_
