// Normal program simulating the progression of a disjunctive program on
// element codes of positive clauses. Meant for infinite domains: the
// encoding predicate must be an injective pairing that avoids the flags.

#ifndef LPX_TRANSFORMS_DLP_TO_NLP_HPP_
#define LPX_TRANSFORMS_DLP_TO_NLP_HPP_

#include <lpx/grounder.hpp>
#include <lpx/sm_formula.hpp>
#include <lpx/transforms/common.hpp>

namespace lpx {

struct EncodingNames {
  std::string enc, enc_bar, ok_e, mrg, ext, in, subc, equ, true_, false_;
  std::string c_eps;
  std::map<std::string, std::string> flag;  // source predicate -> its flag constant
};

namespace detail {

// Conjuncts computing the code of `a` into a term: enc(c_P, t1, U1), ...,
// enc(U(m-1), tm, Um). Returns the final term (c_P itself when m = 0).
inline Term code_chain(const Atom& a, const EncodingNames& n, FreshVariables& fresh, const std::string& stem,
                       std::vector<Literal>& body) {
  Term cur = build::cst(n.flag.at(a.predicate));
  for (std::size_t j = 0; j < a.args.size(); ++j) {
    Term next = fresh(stem + std::to_string(j + 1));
    body.push_back(build::pos(n.enc, {cur, a.args[j], next}));
    cur = next;
  }
  return cur;
}

// The simulation rule for one source rule.
inline Rule progression_rule(const Rule& r, const Program& p, const EncodingNames& n) {
  using namespace build;
  RuleSplit split = split_rule(r, p);
  FreshVariables fresh(rule_variables(r));
  std::vector<Literal> body;
  std::size_t k = split.positive.size();
  std::vector<Term> ys;
  std::vector<Literal> extracts;
  for (std::size_t i = 0; i < k; ++i) {
    std::string idx = std::to_string(i + 1);
    Term x = fresh("X" + idx), z = fresh("Z" + idx), y = fresh("Y" + idx);
    body.push_back(pos(n.true_, {x}));
    Term code = code_chain(split.positive[i], n, fresh, "U" + idx + "_", body);
    body.push_back(eq(z, code));
    body.push_back(pos(n.in, {z, x}));
    extracts.push_back(pos(n.ext, {x, z, y}));
    ys.push_back(y);
  }
  body.insert(body.end(), extracts.begin(), extracts.end());
  // Head clause code: enc(c_eps, <h1>, V1), enc(V1, <h2>, V2), ...
  Term clause = cst(n.c_eps);
  for (std::size_t j = 0; j < r.head.size(); ++j) {
    std::string idx = std::to_string(j + 1);
    Term code = code_chain(r.head[j], n, fresh, "H" + idx + "_", body);
    Term v = fresh("V" + idx);
    body.push_back(pos(n.enc, {clause, code, v}));
    clause = v;
  }
  Term merged = k == 0 ? cst(n.c_eps) : ys[0];
  for (std::size_t i = 1; i < k; ++i) {
    Term w = fresh("W" + std::to_string(i + 1));
    body.push_back(pos(n.mrg, {merged, ys[i], w}));
    merged = w;
  }
  Term v = fresh("V");
  body.push_back(pos(n.mrg, {merged, clause, v}));
  body.insert(body.end(), split.residue.begin(), split.residue.end());
  return rule({atom(n.true_, {v})}, std::move(body));
}

}  // namespace detail

inline TransformReport dlp_to_nlp_infinite(const Program& p) {
  using namespace build;
  Manifest m(p.vocabulary());
  EncodingNames n;
  n.enc = m.predicate("__enc", 3, "encoding function graph");
  n.enc_bar = m.predicate("__enc_bar", 3, "complement of the encoding graph");
  n.ok_e = m.predicate("__ok_e", 2, "totality check for the encoding");
  n.mrg = m.predicate("__mrg", 3, "merging function graph");
  n.ext = m.predicate("__ext", 3, "extracting function graph");
  n.in = m.predicate("__in", 2, "element occurs in a code");
  n.subc = m.predicate("__subc", 2, "code elements contained in another code");
  n.equ = m.predicate("__equ", 2, "codes with the same element set");
  n.true_ = m.predicate("__true", 1, "code of a derived clause");
  n.false_ = m.predicate("__false", 1, "code of a clause with all atoms false");
  n.c_eps = m.function("__c_eps", 0, "ending flag of clauses");
  for (const auto& pred : p.predicates_in_order()) {
    n.flag[pred] = m.function("__c_" + pred, 0, "ending flag of atoms of " + pred);
  }

  Term x = var("X"), y = var("Y"), z = var("Z"), u = var("U"), v = var("V"), w = var("W");
  std::vector<Rule> pi1, pi2, pi3, pi4, pi5;

  pi1.push_back(constraint({pos(n.enc, {x, y, cst(n.c_eps)})}));
  for (const auto& pred : p.predicates_in_order()) pi1.push_back(constraint({pos(n.enc, {x, y, cst(n.flag[pred])})}));
  pi1.push_back(rule({atom(n.enc, {x, y, z})}, {neg(n.enc_bar, {x, y, z})}));
  pi1.push_back(rule({atom(n.enc_bar, {x, y, z})}, {neg(n.enc, {x, y, z})}));
  pi1.push_back(constraint({pos(n.enc, {x, y, z}), pos(n.enc, {u, v, z}), neq(x, u)}));
  pi1.push_back(constraint({pos(n.enc, {x, y, z}), pos(n.enc, {u, v, z}), neq(y, v)}));
  pi1.push_back(rule({atom(n.ok_e, {x, y})}, {pos(n.enc, {x, y, z})}));
  pi1.push_back(rule({atom(n.ok_e, {x, y})}, {neg(n.ok_e, {x, y})}));
  pi1.push_back(constraint({pos(n.enc, {x, y, z}), pos(n.enc, {x, y, u}), neq(z, u)}));

  Term eps = cst(n.c_eps);
  pi2.push_back(rule({atom(n.mrg, {x, y, x})}, {eq(y, eps)}));
  pi2.push_back(rule({atom(n.mrg, {x, y, z})}, {pos(n.mrg, {x, u, v}), pos(n.enc, {u, w, y}), pos(n.enc, {v, w, z})}));
  pi2.push_back(rule({atom(n.ext, {x, y, x})}, {eq(x, eps)}));
  pi2.push_back(rule({atom(n.ext, {x, y, v})}, {pos(n.ext, {u, y, v}), pos(n.enc, {u, w, x}), eq(w, y)}));
  pi2.push_back(rule({atom(n.ext, {x, y, z})},
                     {pos(n.ext, {u, y, v}), pos(n.enc, {u, w, x}), neq(w, y), pos(n.enc, {v, w, z})}));
  pi2.push_back(rule({atom(n.in, {u, y})}, {pos(n.enc, {x, u, y})}));
  pi2.push_back(rule({atom(n.in, {u, y})}, {pos(n.enc, {x, v, y}), pos(n.in, {u, x})}));
  pi2.push_back(rule({atom(n.subc, {x, y})}, {eq(x, eps)}));
  pi2.push_back(rule({atom(n.subc, {x, y})}, {pos(n.subc, {u, y}), pos(n.enc, {u, v, x}), pos(n.in, {v, y})}));
  pi2.push_back(rule({atom(n.equ, {x, y})}, {pos(n.subc, {x, y}), pos(n.subc, {y, x})}));

  pi3.push_back(rule({atom(n.true_, {v})}, {pos(n.true_, {u}), pos(n.equ, {u, v})}));
  for (const auto& r : p.rules()) pi3.push_back(detail::progression_rule(r, p, n));

  pi4.push_back(rule({atom(n.false_, {x})}, {eq(x, eps)}));
  pi5.push_back(constraint({pos(n.true_, {eps})}));
  for (const auto& pred : p.predicates_in_order()) {
    if (!p.is_intensional(pred)) continue;
    std::size_t arity = p.vocabulary().find(pred)->arity;
    Atom theta = atom(pred, tuple_variables(arity, "Z"));
    FreshVariables fresh({"X", "Y"});
    for (std::size_t j = 1; j <= arity; ++j) fresh("Z" + std::to_string(j));
    std::vector<Literal> b4{pos(n.false_, {x})};
    Term code4 = detail::code_chain(theta, n, fresh, "U", b4);
    b4.push_back(pos(n.enc, {x, code4, y}));
    b4.push_back(Literal::neg(theta));
    pi4.push_back(rule({atom(n.false_, {y})}, std::move(b4)));

    FreshVariables fresh5({"X", "Y"});
    for (std::size_t j = 1; j <= arity; ++j) fresh5("Z" + std::to_string(j));
    std::vector<Literal> b5{pos(n.true_, {x})};
    Term code5 = detail::code_chain(theta, n, fresh5, "U", b5);
    b5.push_back(pos(n.ext, {x, code5, y}));
    b5.push_back(pos(n.false_, {y}));
    pi5.push_back(rule({theta}, std::move(b5)));
  }

  TransformReport rep;
  rep.kind = "dlp2nlp";
  rep.rule_counts = {{"pi1", pi1.size()}, {"pi2", pi2.size()}, {"pi3", pi3.size()}, {"pi4", pi4.size()}, {"pi5", pi5.size()}};
  std::vector<Rule> all;
  for (auto* part : {&pi1, &pi2, &pi3, &pi4, &pi5}) all.insert(all.end(), part->begin(), part->end());
  rep.program = Program(std::move(all));
  rep.manifest = m.take();
  return rep;
}

// Closed-form rule counts per step: |C| + 7, 10, 1 + |rules|, 1 + |tau|, 1 + |tau|,
// where C holds one flag per predicate of p plus the clause flag.
inline std::vector<std::pair<std::string, std::size_t>> dlp_to_nlp_expected_counts(const Program& p) {
  std::size_t flags = p.predicates_in_order().size() + 1;
  std::size_t tau = p.intensional().size();
  return {{"pi1", flags + 7}, {"pi2", 10}, {"pi3", 1 + p.size()}, {"pi4", 1 + tau}, {"pi5", 1 + tau}};
}

}  // namespace lpx

#endif  // LPX_TRANSFORMS_DLP_TO_NLP_HPP_
