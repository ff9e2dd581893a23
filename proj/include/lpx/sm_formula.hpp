// The second-order stable model operator SM(program) as a formula tree.

#ifndef LPX_SM_FORMULA_HPP_
#define LPX_SM_FORMULA_HPP_

#include <lpx/formula.hpp>

namespace lpx {

inline std::string starred(const std::string& predicate) { return predicate + "*"; }

// body -> head, or the bare head for facts.
inline Formula rule_formula(const Rule& r, const std::set<std::string>& star = {}) {
  auto atom = [&](const Atom& a, bool positive) {
    if (positive && !a.is_equality() && star.count(a.predicate)) return Formula::atom(starred(a.predicate), a.args);
    return Formula::atom(a);
  };
  std::vector<Formula> head, body;
  for (const auto& h : r.head) head.push_back(atom(h, true));
  for (const auto& l : r.body) {
    body.push_back(l.negated ? Formula::negation(atom(l.atom, false)) : atom(l.atom, true));
  }
  Formula consequent = Formula::disjunction(std::move(head));
  if (body.empty()) return consequent;
  return Formula::implies(Formula::conjunction(std::move(body)), consequent);
}

// Conjunction of the universal closures of all rules; `star` names the
// predicates whose non-negated occurrences are replaced by starred variables.
inline Formula program_formula(const Program& p, const std::set<std::string>& star = {}) {
  std::vector<Formula> parts;
  for (const auto& r : p.rules()) parts.push_back(universal_closure(rule_formula(r, star)));
  return Formula::conjunction(std::move(parts));
}

inline std::vector<Term> tuple_variables(std::size_t n, const std::string& prefix = "X") {
  std::vector<Term> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(Term::variable(prefix + std::to_string(i)));
  return out;
}

// tau* < tau for the given predicates.
inline Formula starred_below(const std::vector<Symbol>& tau) {
  std::vector<Formula> below, above;
  for (const auto& s : tau) {
    auto args = tuple_variables(s.arity);
    std::vector<std::string> names;
    for (const auto& a : args) names.push_back(a.name);
    Formula p = Formula::atom(s.name, args);
    Formula ps = Formula::atom(starred(s.name), args);
    below.push_back(Formula::forall(names, Formula::implies(ps, p)));
    above.push_back(Formula::forall(names, Formula::implies(p, ps)));
  }
  return Formula::conjunction({Formula::conjunction(std::move(below)), Formula::negation(Formula::conjunction(std::move(above)))});
}

inline std::vector<Symbol> intensional_symbols(const Program& p) {
  std::vector<Symbol> out;
  for (const auto& name : p.intensional()) out.push_back({name, SymbolKind::kPredicate, p.vocabulary().find(name)->arity});
  return out;
}

inline Formula sm_formula(const Program& p) {
  Formula phi = program_formula(p);
  auto tau = intensional_symbols(p);
  if (tau.empty()) return phi;
  std::vector<SoVariable> vars;
  for (const auto& s : tau) vars.push_back({starred(s.name), SymbolKind::kPredicate, s.arity});
  Formula phi_star = program_formula(p, p.intensional());
  Formula minimal = Formula::forall_so(vars, Formula::implies(starred_below(tau), Formula::negation(phi_star)));
  return Formula::conjunction({phi, minimal});
}

}  // namespace lpx

#endif  // LPX_SM_FORMULA_HPP_
