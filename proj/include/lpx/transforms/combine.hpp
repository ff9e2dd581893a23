// One program for finite and infinite structures: a finiteness test sets
// one of two flags, and each input program only fires under its flag.

#ifndef LPX_TRANSFORMS_COMBINE_HPP_
#define LPX_TRANSFORMS_COMBINE_HPP_

#include <lpx/transforms/common.hpp>

namespace lpx {

struct CombineNames {
  std::string inf = "__inf", fin = "__fin";
  std::string arc, arc_bar, ok_a, inf_bar;
  std::string succ, nsucc, has_pred, has_succ, first, last, reach, unreached, many_first;
};

namespace detail {

// inf holds in a stable model only if no total transitive relation has a
// loop, which is impossible over a finite domain.
inline std::vector<Rule> infinity_test(const CombineNames& n) {
  using namespace build;
  Term x = var("X"), y = var("Y"), z = var("Z");
  return {
      rule({atom(n.arc_bar, {x, y})}, {neg(n.arc, {x, y})}),
      rule({atom(n.arc, {x, y})}, {neg(n.arc_bar, {x, y})}),
      rule({atom(n.ok_a, {x})}, {pos(n.arc, {x, y})}),
      rule({atom(n.ok_a, {x})}, {neg(n.ok_a, {x})}),
      rule({atom(n.inf_bar)}, {pos(n.arc, {x, x})}),
      rule({atom(n.inf)}, {neg(n.inf_bar)}),
      rule({atom(n.arc, {x, z})}, {pos(n.arc, {x, y}), pos(n.arc, {y, z})}),
  };
}

// fin holds iff the guessed successor relation runs from a unique least
// element through every element to a greatest one. The checks derive
// markers instead of failing, so the program has stable models over any
// structure.
inline std::vector<Rule> finiteness_test(const CombineNames& n) {
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
      rule({atom(n.reach, {x})}, {pos(n.first, {x})}),
      rule({atom(n.reach, {y})}, {pos(n.reach, {x}), pos(n.succ, {x, y})}),
      rule({atom(n.unreached)}, {neg(n.reach, {x})}),
      rule({atom(n.many_first)}, {pos(n.first, {x}), pos(n.first, {y}), neq(x, y)}),
      rule({atom(n.fin)}, {pos(n.last, {x}), pos(n.reach, {x}), neg(n.unreached), neg(n.many_first)}),
  };
}

}  // namespace detail

// p_fin is meant for finite structures, p_inf (typically the output of
// dlp_to_nlp_infinite) for infinite ones.
inline TransformReport combine_fin_inf(const Program& p_fin, const Program& p_inf) {
  Vocabulary taken = p_fin.vocabulary();
  for (const auto& [name, info] : p_inf.vocabulary()) {
    if (const SymbolInfo* other = taken.find(name); other && !(*other == info)) {
      throw Error("combine: symbol " + name + " is used with different arities");
    }
    taken.add(name, info.kind, info.arity);
  }
  CombineNames n;
  for (const auto* flag : {&n.inf, &n.fin}) {
    if (taken.find(*flag)) throw Error("combine: flag " + *flag + " collides with an input symbol");
  }
  Manifest m(taken);
  n.inf = m.predicate(n.inf, 0, "flag: the structure is infinite");
  n.fin = m.predicate(n.fin, 0, "flag: the structure is finite");
  n.arc = m.predicate("__arc", 2, "guessed relation for the infinity test");
  n.arc_bar = m.predicate("__arc_bar", 2, "complement of the arc guess");
  n.ok_a = m.predicate("__ok_a", 1, "element with an outgoing arc");
  n.inf_bar = m.predicate("__inf_bar", 0, "the arc relation has a loop");
  n.succ = m.predicate("__succ", 2, "guessed successor relation for the finiteness test");
  n.nsucc = m.predicate("__nsucc", 2, "complement of the successor guess");
  n.has_pred = m.predicate("__has_pred", 1, "element with a predecessor");
  n.has_succ = m.predicate("__has_succ", 1, "element with a successor");
  n.first = m.predicate("__first", 1, "element without a predecessor");
  n.last = m.predicate("__last", 1, "element without a successor");
  n.reach = m.predicate("__reach", 1, "element reachable from a first element");
  n.unreached = m.predicate("__unreached", 0, "some element is not reachable");
  n.many_first = m.predicate("__many_first", 0, "more than one element lacks a predecessor");

  auto inf_rules = detail::infinity_test(n);
  auto fin_rules = detail::finiteness_test(n);
  Program guarded_inf = guard(p_inf, n.inf);
  Program guarded_fin = guard(p_fin, n.fin);
  std::vector<Rule> all = inf_rules;
  all.insert(all.end(), fin_rules.begin(), fin_rules.end());
  all.insert(all.end(), guarded_inf.rules().begin(), guarded_inf.rules().end());
  all.insert(all.end(), guarded_fin.rules().begin(), guarded_fin.rules().end());
  all.push_back(build::constraint({build::neg(n.fin), build::neg(n.inf)}));

  TransformReport rep;
  rep.kind = "combine";
  rep.rule_counts = {{"infinity_test", inf_rules.size()},
                     {"finiteness_test", fin_rules.size()},
                     {"infinite_branch", guarded_inf.size()},
                     {"finite_branch", guarded_fin.size()},
                     {"some_flag", 1}};
  rep.program = Program(std::move(all));
  rep.manifest = m.take();
  return rep;
}

}  // namespace lpx

#endif  // LPX_TRANSFORMS_COMBINE_HPP_
