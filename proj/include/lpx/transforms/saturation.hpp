// Disjunctive programs for sentences "exists tau forall sigma forall x exists y
// theta" by saturation, on top of a guessed successor relation, and the
// parity program built with it.

#ifndef LPX_TRANSFORMS_SATURATION_HPP_
#define LPX_TRANSFORMS_SATURATION_HPP_

#include <lpx/sm_formula.hpp>
#include <lpx/transforms/common.hpp>

namespace lpx {

// Names of the successor skeleton's predicates.
struct SuccessorNames {
  std::string succ, nsucc, has_pred, has_succ, first, last, reach;
};

namespace detail {

inline SuccessorNames successor_names(Manifest& m) {
  SuccessorNames n;
  n.succ = m.predicate("__succ", 2, "guessed successor relation");
  n.nsucc = m.predicate("__nsucc", 2, "complement of the successor guess");
  n.has_pred = m.predicate("__has_pred", 1, "element with a predecessor");
  n.has_succ = m.predicate("__has_succ", 1, "element with a successor");
  n.first = m.predicate("__first", 1, "least element of the successor order");
  n.last = m.predicate("__last", 1, "greatest element of the successor order");
  n.reach = m.predicate("__reach", 1, "element reachable from the least one");
  return n;
}

// Guess-and-check program whose stable models make `succ` the successor
// relation of a strict total order on the (finite) domain.
inline std::vector<Rule> successor_skeleton(const SuccessorNames& n) {
  using namespace build;
  Term x = var("X"), y = var("Y"), z = var("Z");
  return {
      rule({atom(n.succ, {x, y})}, {neg(n.nsucc, {x, y})}),
      rule({atom(n.nsucc, {x, y})}, {neg(n.succ, {x, y})}),
      constraint({pos(n.succ, {x, y}), pos(n.succ, {x, z}), neq(y, z)}),
      constraint({pos(n.succ, {x, z}), pos(n.succ, {y, z}), neq(x, y)}),
      constraint({pos(n.succ, {x, x})}),
      rule({atom(n.has_pred, {y})}, {pos(n.succ, {x, y})}),
      rule({atom(n.has_succ, {x})}, {pos(n.succ, {x, y})}),
      rule({atom(n.first, {x})}, {neg(n.has_pred, {x})}),
      rule({atom(n.last, {x})}, {neg(n.has_succ, {x})}),
      constraint({pos(n.first, {x}), pos(n.first, {y}), neq(x, y)}),
      rule({atom(n.reach, {x})}, {pos(n.first, {x})}),
      rule({atom(n.reach, {y})}, {pos(n.reach, {x}), pos(n.succ, {x, y})}),
      constraint({neg(n.reach, {x})}),
  };
}

inline std::vector<Literal> all_of(const std::string& pred, const std::vector<Term>& xs) {
  std::vector<Literal> out;
  for (const auto& x : xs) out.push_back(build::pos(pred, {x}));
  return out;
}

// Rows of the lexicographic successor z -> x on k-tuples.
inline std::vector<std::vector<Literal>> tuple_successor_rows(const SuccessorNames& n, const std::vector<Term>& z,
                                                              const std::vector<Term>& x) {
  std::vector<std::vector<Literal>> rows;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<Literal> row;
    for (std::size_t j = 0; j < i; ++j) row.push_back(build::eq(z[j], x[j]));
    row.push_back(build::pos(n.succ, {z[i], x[i]}));
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      row.push_back(build::pos(n.last, {z[j]}));
      row.push_back(build::pos(n.first, {x[j]}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Formula tuple_successor_formula(const SuccessorNames& n, const std::vector<Term>& z, const std::vector<Term>& x) {
  std::vector<Formula> cases;
  for (const auto& row : tuple_successor_rows(n, z, x)) {
    std::vector<Formula> c;
    for (const auto& l : row) c.push_back(Formula::literal(l));
    cases.push_back(Formula::conjunction(std::move(c)));
  }
  return Formula::disjunction(std::move(cases));
}

inline Atom as_atom(const Formula& f) {
  if (f.kind() == Formula::Kind::kEqual) return Atom::equality(f.terms()[0], f.terms()[1]);
  return Atom::pred(f.predicate(), f.terms());
}

// DNF rows of theta with each negated sigma atom replaced by its complement
// atom. Rows holding a literal and its negation are dropped.
inline std::vector<std::vector<Literal>> complemented_rows(const Formula& theta,
                                                           const std::map<std::string, std::string>& complement) {
  std::vector<std::vector<Literal>> rows;
  for (const auto& row : to_dnf(theta)) {
    std::vector<Literal> out;
    for (const auto& l : row) {
      Atom a = as_atom(l.atom);
      auto c = a.is_equality() ? complement.end() : complement.find(a.predicate);
      Literal lit = l.negated && c != complement.end() ? Literal::pos(Atom::pred(c->second, a.args)) : Literal{a, l.negated};
      if (std::find(out.begin(), out.end(), lit) == out.end()) out.push_back(std::move(lit));
    }
    bool clash = false;
    for (const auto& l : out) {
      if (std::find(out.begin(), out.end(), Literal{l.atom, !l.negated}) != out.end()) clash = true;
    }
    if (!clash) rows.push_back(std::move(out));
  }
  return rows;
}

struct SaturationInput {
  Formula matrix;
  std::vector<Symbol> tau, sigma;
  std::vector<std::string> xs;
};

inline void check_saturation_input(const SaturationInput& in) {
  if (!is_quantifier_free(in.matrix)) throw Error("so2dlp: matrix contains quantifiers");
  if (in.xs.empty()) throw Error("so2dlp: width mismatch: no universal variables");
  std::set<std::string> seen(in.xs.begin(), in.xs.end());
  if (seen.size() != in.xs.size()) throw Error("so2dlp: width mismatch: repeated universal variable");
  std::set<std::string> names;
  for (const auto* part : {&in.tau, &in.sigma}) {
    for (const auto& s : *part) {
      if (s.kind != SymbolKind::kPredicate) throw Error("so2dlp: " + s.name + " is not a predicate");
      if (s.arity > in.xs.size()) {
        throw Error("so2dlp: width mismatch: " + s.name + " has arity above " + std::to_string(in.xs.size()));
      }
      if (!names.insert(s.name).second) throw Error("so2dlp: " + s.name + " is quantified twice");
    }
  }
}

// Appends the saturation rules to `out`, recording per-step counts.
inline void saturate(const SaturationInput& in, const SuccessorNames& n, Manifest& m, std::vector<Rule>& out,
                     std::vector<std::pair<std::string, std::size_t>>& counts) {
  using namespace build;
  std::size_t k = in.xs.size();
  std::map<std::string, std::string> complement, sigma_complement;
  std::vector<std::pair<Symbol, std::string>> guessed;
  for (const auto* part : {&in.tau, &in.sigma}) {
    for (const auto& s : *part) {
      std::string c = m.predicate("__" + s.name.substr(s.name.find_first_not_of('_')) + "_c", s.arity, "complement guess for " + s.name);
      complement[s.name] = c;
      guessed.emplace_back(s, c);
    }
  }
  for (const auto& s : in.sigma) sigma_complement[s.name] = complement[s.name];
  std::string d = m.predicate("__d", k, "tuples reached by the sweep");

  std::vector<std::string> used = free_variables(in.matrix);
  used.insert(used.end(), in.xs.begin(), in.xs.end());
  FreshVariables fresh(used);
  std::vector<Term> x, z, u;
  for (const auto& name : in.xs) x.push_back(var(name));
  for (std::size_t i = 1; i <= k; ++i) z.push_back(fresh("Z" + std::to_string(i)));
  for (std::size_t i = 1; i <= k; ++i) u.push_back(fresh("U" + std::to_string(i)));

  std::size_t before = out.size();
  for (const auto& [s, c] : guessed) {
    std::vector<Term> args(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(s.arity));
    out.push_back(rule({atom(s.name, args), atom(c, args)}, {}));
  }
  counts.emplace_back("guess", out.size() - before);

  before = out.size();
  std::vector<Literal> at_end = all_of(n.last, z);
  at_end.push_back(pos(d, z));
  for (const auto& s : in.sigma) {
    std::vector<Term> args(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(s.arity));
    out.push_back(rule({atom(s.name, args)}, at_end));
    out.push_back(rule({atom(complement[s.name], args)}, at_end));
  }
  counts.emplace_back("saturate", out.size() - before);

  before = out.size();
  auto rows = complemented_rows(in.matrix, sigma_complement);
  for (const auto& row : rows) {
    std::vector<Literal> body = all_of(n.first, x);
    body.insert(body.end(), row.begin(), row.end());
    out.push_back(rule({atom(d, x)}, std::move(body)));
  }
  for (const auto& step : tuple_successor_rows(n, z, x)) {
    for (const auto& row : rows) {
      std::vector<Literal> body = step;
      body.push_back(pos(d, z));
      body.insert(body.end(), row.begin(), row.end());
      out.push_back(rule({atom(d, x)}, std::move(body)));
    }
  }
  counts.emplace_back("sweep", out.size() - before);

  std::vector<Literal> unfinished = all_of(n.last, z);
  unfinished.push_back(neg(d, z));
  out.push_back(rule({atom(d, z)}, std::move(unfinished)));
  counts.emplace_back("finish", 1);
}

}  // namespace detail

// exists tau forall sigma forall xs exists (other variables) matrix.
inline Formula saturation_sentence(const Formula& matrix, const std::vector<Symbol>& tau, const std::vector<Symbol>& sigma,
                                   const std::vector<std::string>& xs) {
  std::vector<std::string> ys;
  for (const auto& v : free_variables(matrix)) {
    if (std::find(xs.begin(), xs.end(), v) == xs.end()) ys.push_back(v);
  }
  auto so = [](const std::vector<Symbol>& ss) {
    std::vector<SoVariable> out;
    for (const auto& s : ss) out.push_back({s.name, s.kind, s.arity});
    return out;
  };
  Formula f = Formula::forall(xs, ys.empty() ? matrix : Formula::exists(ys, matrix));
  if (!sigma.empty()) f = Formula::forall_so(so(sigma), f);
  if (!tau.empty()) f = Formula::exists_so(so(tau), f);
  return f;
}

// The predicates of tau and sigma are intensional in the output; every other
// symbol of the matrix stays extensional.
inline TransformReport so2dlp(const Formula& matrix, const std::vector<Symbol>& tau, const std::vector<Symbol>& sigma,
                              const std::vector<std::string>& xs) {
  detail::SaturationInput in{matrix, tau, sigma, xs};
  detail::check_saturation_input(in);
  Vocabulary taken = formula_symbols(matrix);
  for (const auto* part : {&tau, &sigma}) {
    for (const auto& s : *part) taken.add(s);
  }
  Manifest m(taken);
  SuccessorNames n = detail::successor_names(m);
  TransformReport rep;
  rep.kind = "so2dlp";
  std::vector<Rule> rules = detail::successor_skeleton(n);
  rep.rule_counts.emplace_back("skeleton", rules.size());
  detail::saturate(in, n, m, rules, rep.rule_counts);
  rep.program = Program(std::move(rules));
  rep.manifest = m.take();
  return rep;
}

// A program over the 2k-ary predicate `pred` with a stable expansion over a
// finite structure iff pred holds for an even number of tuples.
inline TransformReport parity_program(std::size_t k, const std::string& pred = "p") {
  if (k == 0) throw Error("parity: tuple width must be positive");
  Vocabulary taken;
  taken.add({pred, SymbolKind::kPredicate, 2 * k});
  Manifest m(taken);
  SuccessorNames n = detail::successor_names(m);
  Symbol odd{m.predicate("__odd", k, "tuples whose row has odd size"), SymbolKind::kPredicate, k};
  Symbol scan{m.predicate("__scan", k, "universally quantified parity scan"), SymbolKind::kPredicate, k};

  auto cat = [](std::vector<Term> a, const std::vector<Term>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  auto P = [&](const std::vector<Term>& a, const std::vector<Term>& b) { return Formula::atom(pred, cat(a, b)); };
  auto X = [&](const std::vector<Term>& a) { return Formula::atom(odd.name, a); };
  auto Y = [&](const std::vector<Term>& a) { return Formula::atom(scan.name, a); };
  auto iff = [](Formula a, Formula b) { return Formula::iff(std::move(a), std::move(b)); };
  auto xor_ = [&](Formula a, Formula b) { return iff(std::move(a), Formula::negation(std::move(b))); };
  auto no = [](Formula a) { return Formula::negation(std::move(a)); };

  std::vector<Term> x = tuple_variables(k, "X"), u = tuple_variables(k, "U"), v = tuple_variables(k, "V"),
                    u2 = tuple_variables(k, "A"), v2 = tuple_variables(k, "B");
  Term zero_var = Term::variable("O"), max_var = Term::variable("M");
  std::vector<Term> zero(k, zero_var), max(k, max_var);

  // Row parity: Y scans row x, so X(x) holds iff the row has odd size.
  Formula row = Formula::disjunction({
      no(iff(Y(zero), P(x, zero))),
      Formula::conjunction({detail::tuple_successor_formula(n, u, v), no(iff(P(x, v), xor_(Y(v), Y(u))))}),
      iff(X(x), Y(max)),
  });
  // Column parity: Y scans X, which must have even size.
  Formula column = Formula::disjunction({
      no(iff(X(zero), Y(zero))),
      Formula::conjunction({detail::tuple_successor_formula(n, u2, v2), no(iff(X(v2), xor_(Y(v2), Y(u2))))}),
      no(Y(max)),
  });
  Formula matrix = Formula::conjunction({Formula::atom(n.first, {zero_var}), Formula::atom(n.last, {max_var}), row, column});

  std::vector<std::string> xs;
  for (const auto& t : x) xs.push_back(t.name);
  detail::SaturationInput in{matrix, {odd}, {scan}, xs};
  detail::check_saturation_input(in);
  TransformReport rep;
  rep.kind = "parity";
  std::vector<Rule> rules = detail::successor_skeleton(n);
  rep.rule_counts.emplace_back("skeleton", rules.size());
  detail::saturate(in, n, m, rules, rep.rule_counts);
  rep.program = Program(std::move(rules));
  rep.manifest = m.take();
  return rep;
}

}  // namespace lpx

#endif  // LPX_TRANSFORMS_SATURATION_HPP_
