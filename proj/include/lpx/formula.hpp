// First- and second-order formula trees with a text printer/reader and the
// normal-form rewrites (NNF, DNF, CNF) used by the program transforms.

#ifndef LPX_FORMULA_HPP_
#define LPX_FORMULA_HPP_

#include <lpx/syntax.hpp>

#include <memory>

namespace lpx {

// A quantified predicate or function variable.
struct SoVariable {
  std::string name;
  SymbolKind kind = SymbolKind::kPredicate;
  std::size_t arity = 0;
  friend bool operator==(const SoVariable&, const SoVariable&) = default;
};

class Formula {
 public:
  enum class Kind { kTrue, kFalse, kAtom, kEqual, kNot, kAnd, kOr, kImplies, kIff, kForall, kExists, kForallSO, kExistsSO };

  Formula() : Formula(top()) {}

  static Formula top() { return make(Kind::kTrue); }
  static Formula bottom() { return make(Kind::kFalse); }
  static Formula atom(std::string predicate, std::vector<Term> args = {}) {
    Node n{Kind::kAtom};
    n.name = std::move(predicate);
    n.terms = std::move(args);
    return Formula(std::move(n));
  }
  static Formula atom(const Atom& a) {
    return a.is_equality() ? equal(a.args[0], a.args[1]) : atom(a.predicate, a.args);
  }
  static Formula literal(const Literal& l) { return l.negated ? negation(atom(l.atom)) : atom(l.atom); }
  static Formula equal(Term l, Term r) {
    Node n{Kind::kEqual};
    n.terms = {std::move(l), std::move(r)};
    return Formula(std::move(n));
  }
  static Formula negation(Formula f) {
    Node n{Kind::kNot};
    n.children = {std::move(f)};
    return Formula(std::move(n));
  }
  // Single-element conjunctions and disjunctions collapse to the element.
  static Formula conjunction(std::vector<Formula> fs) {
    if (fs.empty()) return top();
    if (fs.size() == 1) return fs.front();
    Node n{Kind::kAnd};
    n.children = std::move(fs);
    return Formula(std::move(n));
  }
  static Formula disjunction(std::vector<Formula> fs) {
    if (fs.empty()) return bottom();
    if (fs.size() == 1) return fs.front();
    Node n{Kind::kOr};
    n.children = std::move(fs);
    return Formula(std::move(n));
  }
  static Formula implies(Formula a, Formula b) { return binary(Kind::kImplies, std::move(a), std::move(b)); }
  static Formula iff(Formula a, Formula b) { return binary(Kind::kIff, std::move(a), std::move(b)); }
  static Formula forall(std::vector<std::string> vars, Formula body) { return quant(Kind::kForall, std::move(vars), std::move(body)); }
  static Formula exists(std::vector<std::string> vars, Formula body) { return quant(Kind::kExists, std::move(vars), std::move(body)); }
  static Formula forall_so(std::vector<SoVariable> vars, Formula body) { return so_quant(Kind::kForallSO, std::move(vars), std::move(body)); }
  static Formula exists_so(std::vector<SoVariable> vars, Formula body) { return so_quant(Kind::kExistsSO, std::move(vars), std::move(body)); }

  Kind kind() const { return node_->kind; }
  const std::string& predicate() const { return node_->name; }
  const std::vector<Term>& terms() const { return node_->terms; }
  const std::vector<Formula>& children() const { return node_->children; }
  const Formula& child(std::size_t i = 0) const { return node_->children.at(i); }
  const std::vector<std::string>& bound_variables() const { return node_->vars; }
  const std::vector<SoVariable>& so_variables() const { return node_->so_vars; }

  bool is_quantifier() const {
    return kind() == Kind::kForall || kind() == Kind::kExists || kind() == Kind::kForallSO || kind() == Kind::kExistsSO;
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    return x.kind == y.kind && x.name == y.name && x.terms == y.terms && x.vars == y.vars && x.so_vars == y.so_vars &&
           x.children == y.children;
  }

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Term> terms;
    std::vector<Formula> children;
    std::vector<std::string> vars;
    std::vector<SoVariable> so_vars;
  };

  explicit Formula(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}
  static Formula make(Kind k) { return Formula(Node{k}); }
  static Formula binary(Kind k, Formula a, Formula b) {
    Node n{k};
    n.children = {std::move(a), std::move(b)};
    return Formula(std::move(n));
  }
  static Formula quant(Kind k, std::vector<std::string> vars, Formula body) {
    if (vars.empty()) return body;
    Node n{k};
    n.vars = std::move(vars);
    n.children = {std::move(body)};
    return Formula(std::move(n));
  }
  static Formula so_quant(Kind k, std::vector<SoVariable> vars, Formula body) {
    if (vars.empty()) return body;
    Node n{k};
    n.so_vars = std::move(vars);
    n.children = {std::move(body)};
    return Formula(std::move(n));
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Traversal
// ---------------------------------------------------------------------------

namespace detail {

inline void free_variables(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  using K = Formula::Kind;
  auto add_term = [&](const Term& t) {
    std::vector<std::string> vs;
    collect_variables(t, vs);
    for (auto& v : vs) {
      if (std::find(bound.begin(), bound.end(), v) == bound.end() && std::find(out.begin(), out.end(), v) == out.end()) {
        out.push_back(v);
      }
    }
  };
  switch (f.kind()) {
    case K::kAtom:
    case K::kEqual:
      for (const auto& t : f.terms()) add_term(t);
      return;
    case K::kForall:
    case K::kExists: {
      std::size_t mark = bound.size();
      bound.insert(bound.end(), f.bound_variables().begin(), f.bound_variables().end());
      free_variables(f.child(), bound, out);
      bound.resize(mark);
      return;
    }
    default:
      for (const auto& c : f.children()) free_variables(c, bound, out);
  }
}

}  // namespace detail

// Free individual variables in order of first occurrence.
inline std::vector<std::string> free_variables(const Formula& f) {
  std::vector<std::string> bound, out;
  detail::free_variables(f, bound, out);
  return out;
}

inline Formula universal_closure(const Formula& f) { return Formula::forall(free_variables(f), f); }

inline bool is_quantifier_free(const Formula& f) {
  if (f.is_quantifier()) return false;
  return std::all_of(f.children().begin(), f.children().end(), [](const Formula& c) { return is_quantifier_free(c); });
}

// Replaces free occurrences of variables. The caller keeps replacement terms
// free of variables bound inside `f`.
inline Formula substitute(const Formula& f, const std::map<std::string, Term>& sub) {
  using K = Formula::Kind;
  auto terms = [&] {
    std::vector<Term> ts;
    for (const auto& t : f.terms()) ts.push_back(substitute(t, sub));
    return ts;
  };
  auto kids = [&](const std::map<std::string, Term>& s) {
    std::vector<Formula> cs;
    for (const auto& c : f.children()) cs.push_back(substitute(c, s));
    return cs;
  };
  switch (f.kind()) {
    case K::kTrue:
    case K::kFalse:
      return f;
    case K::kAtom:
      return Formula::atom(f.predicate(), terms());
    case K::kEqual: {
      auto ts = terms();
      return Formula::equal(ts[0], ts[1]);
    }
    case K::kNot:
      return Formula::negation(kids(sub)[0]);
    case K::kAnd:
      return Formula::conjunction(kids(sub));
    case K::kOr:
      return Formula::disjunction(kids(sub));
    case K::kImplies: {
      auto cs = kids(sub);
      return Formula::implies(cs[0], cs[1]);
    }
    case K::kIff: {
      auto cs = kids(sub);
      return Formula::iff(cs[0], cs[1]);
    }
    case K::kForall:
    case K::kExists: {
      auto inner = sub;
      for (const auto& v : f.bound_variables()) inner.erase(v);
      auto body = substitute(f.child(), inner);
      return f.kind() == K::kForall ? Formula::forall(f.bound_variables(), body) : Formula::exists(f.bound_variables(), body);
    }
    case K::kForallSO:
      return Formula::forall_so(f.so_variables(), kids(sub)[0]);
    case K::kExistsSO:
      return Formula::exists_so(f.so_variables(), kids(sub)[0]);
  }
  return f;
}

inline void collect_symbols(const Formula& f, Vocabulary& v) {
  using K = Formula::Kind;
  if (f.kind() == K::kAtom) v.add(f.predicate(), SymbolKind::kPredicate, f.terms().size());
  if (f.kind() == K::kAtom || f.kind() == K::kEqual) {
    for (const auto& t : f.terms()) {
      if (auto e = add_term_symbols(t, v)) throw Error(*e);
    }
  }
  for (const auto& c : f.children()) collect_symbols(c, v);
}

inline Vocabulary formula_symbols(const Formula& f) {
  Vocabulary v;
  collect_symbols(f, v);
  return v;
}

// ---------------------------------------------------------------------------
// Printing. ASCII connectives: ~ & | -> <->, quantifiers `forall X Y . f`,
// second-order quantifiers `forall2 p/1, fn f/0 . f`.
// ---------------------------------------------------------------------------

namespace detail {

inline int precedence(Formula::Kind k) {
  using K = Formula::Kind;
  switch (k) {
    case K::kIff: return 1;
    case K::kImplies: return 2;
    case K::kOr: return 3;
    case K::kAnd: return 4;
    case K::kNot: return 5;
    case K::kForall:
    case K::kExists:
    case K::kForallSO:
    case K::kExistsSO: return 0;
    default: return 6;
  }
}

inline void render(const Formula& f, std::string& out);

inline void render_child(const Formula& c, int parent, bool strict, std::string& out) {
  int p = precedence(c.kind());
  bool wrap = strict ? p <= parent : p < parent;
  if (wrap) out += "(";
  render(c, out);
  if (wrap) out += ")";
}

inline void render(const Formula& f, std::string& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::kTrue: out += "true"; return;
    case K::kFalse: out += "false"; return;
    case K::kAtom: out += lpx::render(Atom::pred(f.predicate(), f.terms())); return;
    case K::kEqual: out += lpx::render(f.terms()[0]) + " = " + lpx::render(f.terms()[1]); return;
    case K::kNot:
      out += "~";
      render_child(f.child(), precedence(K::kNot), false, out);
      return;
    case K::kAnd:
    case K::kOr: {
      const char* op = f.kind() == K::kAnd ? " & " : " | ";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += op;
        render_child(f.children()[i], precedence(f.kind()), true, out);
      }
      return;
    }
    case K::kImplies:
      render_child(f.child(0), precedence(K::kImplies), true, out);
      out += " -> ";
      render_child(f.child(1), precedence(K::kImplies), false, out);
      return;
    case K::kIff:
      render_child(f.child(0), precedence(K::kIff), true, out);
      out += " <-> ";
      render_child(f.child(1), precedence(K::kIff), true, out);
      return;
    case K::kForall:
    case K::kExists: {
      out += f.kind() == K::kForall ? "forall" : "exists";
      for (const auto& v : f.bound_variables()) out += " " + v;
      out += " . ";
      render(f.child(), out);
      return;
    }
    case K::kForallSO:
    case K::kExistsSO: {
      out += f.kind() == K::kForallSO ? "forall2 " : "exists2 ";
      for (std::size_t i = 0; i < f.so_variables().size(); ++i) {
        const auto& v = f.so_variables()[i];
        if (i) out += ", ";
        if (v.kind == SymbolKind::kFunction) out += "fn ";
        out += v.name + "/" + std::to_string(v.arity);
      }
      out += " . ";
      render(f.child(), out);
      return;
    }
  }
}

}  // namespace detail

inline std::string render(const Formula& f) {
  std::string out;
  detail::render(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Reader for first-order formulas in the printer's syntax.
// ---------------------------------------------------------------------------

namespace detail {

class FormulaReader {
 public:
  explicit FormulaReader(std::string_view text) : text_(text) { skip(); }

  Formula read() {
    Formula f = read_iff();
    skip();
    if (pos_ != text_.size()) fail("trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, 1, pos_ + 1); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(std::string_view s) {
    skip();
    if (text_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  bool eat_word(std::string_view w) {
    skip();
    if (text_.substr(pos_, w.size()) != w) return false;
    std::size_t end = pos_ + w.size();
    if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) return false;
    pos_ = end;
    return true;
  }

  std::string identifier() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  Formula read_iff() {
    Formula f = read_implies();
    while (eat("<->")) f = Formula::iff(f, read_implies());
    return f;
  }

  Formula read_implies() {
    Formula f = read_or();
    if (eat("->")) return Formula::implies(f, read_implies());
    return f;
  }

  Formula read_or() {
    std::vector<Formula> fs{read_and()};
    while (eat("|")) fs.push_back(read_and());
    return Formula::disjunction(std::move(fs));
  }

  Formula read_and() {
    std::vector<Formula> fs{read_unary()};
    while (eat("&")) fs.push_back(read_unary());
    return Formula::conjunction(std::move(fs));
  }

  Formula read_unary() {
    if (eat("~")) return Formula::negation(read_unary());
    if (eat("(")) {
      Formula f = read_iff();
      if (!eat(")")) fail("expected ')'");
      return f;
    }
    if (eat_word("true")) return Formula::top();
    if (eat_word("false")) return Formula::bottom();
    bool all = eat_word("forall");
    if (all || eat_word("exists")) {
      std::vector<std::string> vars;
      while (!eat(".")) {
        std::string v = identifier();
        if (!std::isupper(static_cast<unsigned char>(v[0]))) fail("quantified variable must be capitalized");
        vars.push_back(v);
      }
      if (vars.empty()) fail("quantifier without variables");
      Formula body = read_iff();
      return all ? Formula::forall(vars, body) : Formula::exists(vars, body);
    }
    Term t = read_term();
    if (eat("!=")) return Formula::negation(Formula::equal(t, read_term()));
    if (eat("=")) return Formula::equal(t, read_term());
    if (!t.is_function()) fail("expected an atom");
    return Formula::atom(t.name, t.args);
  }

  Term read_term() {
    skip();
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return Term{Term::Kind::kNumber, std::string(text_.substr(start, pos_ - start)), {}};
    }
    std::string id = identifier();
    if (std::isupper(static_cast<unsigned char>(id[0]))) return Term::variable(id);
    Term t = Term::function(id);
    if (eat("(")) {
      do {
        t.args.push_back(read_term());
      } while (eat(","));
      if (!eat(")")) fail("expected ')'");
    }
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text) { return detail::FormulaReader(text).read(); }

// ---------------------------------------------------------------------------
// Normal forms over quantifier-free formulas
// ---------------------------------------------------------------------------

// Negation normal form: only atoms/equalities under ~, no ->, <->.
inline Formula to_nnf(const Formula& f, bool negate = false) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::kTrue: return negate ? Formula::bottom() : Formula::top();
    case K::kFalse: return negate ? Formula::top() : Formula::bottom();
    case K::kAtom:
    case K::kEqual: return negate ? Formula::negation(f) : f;
    case K::kNot: return to_nnf(f.child(), !negate);
    case K::kAnd:
    case K::kOr: {
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(to_nnf(c, negate));
      bool conj = (f.kind() == K::kAnd) != negate;
      return conj ? Formula::conjunction(std::move(cs)) : Formula::disjunction(std::move(cs));
    }
    case K::kImplies: {
      auto a = to_nnf(f.child(0), true);
      auto b = to_nnf(f.child(1), false);
      if (!negate) return Formula::disjunction({a, b});
      return Formula::conjunction({to_nnf(f.child(0), false), to_nnf(f.child(1), true)});
    }
    case K::kIff: {
      auto pa = to_nnf(f.child(0), false), na = to_nnf(f.child(0), true);
      auto pb = to_nnf(f.child(1), false), nb = to_nnf(f.child(1), true);
      if (!negate) return Formula::disjunction({Formula::conjunction({pa, pb}), Formula::conjunction({na, nb})});
      return Formula::disjunction({Formula::conjunction({pa, nb}), Formula::conjunction({na, pb})});
    }
    default:
      throw Error("normal forms need a quantifier-free formula: " + render(f));
  }
}

// A literal of a normal form: an atom or equality, possibly negated.
struct FormulaLiteral {
  Formula atom;
  bool negated = false;
  friend bool operator==(const FormulaLiteral& a, const FormulaLiteral& b) {
    return a.negated == b.negated && a.atom == b.atom;
  }
};

// A DNF is a list of conjunctions (a CNF a list of disjunctions) of literals.
using LiteralMatrix = std::vector<std::vector<FormulaLiteral>>;

inline constexpr std::size_t kNormalFormLimit = 4096;

namespace detail {

inline void push_unique(std::vector<FormulaLiteral>& v, const FormulaLiteral& l) {
  if (std::find(v.begin(), v.end(), l) == v.end()) v.push_back(l);
}

// `inner` is the connective that joins literals inside a row (kAnd for DNF).
inline LiteralMatrix distribute(const Formula& nnf, Formula::Kind inner, std::size_t limit) {
  using K = Formula::Kind;
  K outer = inner == K::kAnd ? K::kOr : K::kAnd;
  K unit = inner == K::kAnd ? K::kTrue : K::kFalse;     // neutral inside a row
  K absorbing = inner == K::kAnd ? K::kFalse : K::kTrue;  // kills a row
  if (nnf.kind() == unit) return {{}};
  if (nnf.kind() == absorbing) return {};
  if (nnf.kind() == K::kAtom || nnf.kind() == K::kEqual) return {{FormulaLiteral{nnf, false}}};
  if (nnf.kind() == K::kNot) return {{FormulaLiteral{nnf.child(), true}}};
  if (nnf.kind() == outer) {
    LiteralMatrix out;
    for (const auto& c : nnf.children()) {
      auto part = distribute(c, inner, limit);
      out.insert(out.end(), part.begin(), part.end());
      if (out.size() > limit) throw Error("normal form exceeds " + std::to_string(limit) + " rows");
    }
    return out;
  }
  if (nnf.kind() == inner) {
    LiteralMatrix acc{{}};
    for (const auto& c : nnf.children()) {
      auto part = distribute(c, inner, limit);
      LiteralMatrix next;
      for (const auto& row : acc) {
        for (const auto& prow : part) {
          auto merged = row;
          for (const auto& l : prow) push_unique(merged, l);
          next.push_back(std::move(merged));
          if (next.size() > limit) throw Error("normal form exceeds " + std::to_string(limit) + " rows");
        }
      }
      acc = std::move(next);
    }
    return acc;
  }
  throw Error("formula is not in negation normal form: " + render(nnf));
}

}  // namespace detail

// Disjunctive normal form by plain distribution.
inline LiteralMatrix to_dnf(const Formula& f, std::size_t limit = kNormalFormLimit) {
  return detail::distribute(to_nnf(f), Formula::Kind::kAnd, limit);
}

// Conjunctive normal form by plain distribution.
inline LiteralMatrix to_cnf(const Formula& f, std::size_t limit = kNormalFormLimit) {
  return detail::distribute(to_nnf(f), Formula::Kind::kOr, limit);
}

inline Formula literal_formula(const FormulaLiteral& l) { return l.negated ? Formula::negation(l.atom) : l.atom; }

}  // namespace lpx

#endif  // LPX_FORMULA_HPP_
