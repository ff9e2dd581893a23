// First-order GL reduction: rule splitting, instantiation over a finite
// structure, and the plain ground program of a structure.

#ifndef LPX_GROUNDER_HPP_
#define LPX_GROUNDER_HPP_

#include <lpx/structure.hpp>

namespace lpx {

// The body of a rule split into positive intensional atoms and the residue:
// negated literals, equalities, and non-intensional atoms.
struct RuleSplit {
  Rule source;
  std::vector<Atom> positive;
  std::vector<Literal> residue;
};

inline bool is_positive_intensional(const Literal& l, const std::set<std::string>& tau) {
  return !l.negated && !l.atom.is_equality() && tau.count(l.atom.predicate);
}

inline RuleSplit split_rule(const Rule& r, const Program& p) {
  RuleSplit out{r, {}, {}};
  for (const auto& l : r.body) {
    if (is_positive_intensional(l, p.intensional())) {
      out.positive.push_back(l.atom);
    } else {
      out.residue.push_back(l);
    }
  }
  return out;
}

struct GroundRule {
  std::set<GroundAtom> body;
  PositiveClause head;

  friend bool operator==(const GroundRule&, const GroundRule&) = default;
  friend auto operator<=>(const GroundRule&, const GroundRule&) = default;
};

inline std::string render(const GroundRule& g, const Structure& s) {
  Rule r;
  auto atom = [&](const GroundAtom& a) {
    std::vector<Term> args;
    for (Element e : a.args) {
      const auto& n = s.name(e);
      args.push_back(std::holds_alternative<std::int64_t>(n) ? Term{Term::Kind::kNumber, to_string(n), {}}
                                                              : Term::constant(to_string(n)));
    }
    return Atom::pred(a.predicate, std::move(args));
  };
  for (const auto& h : g.head) r.head.push_back(atom(h));
  for (const auto& b : g.body) r.body.push_back(Literal::pos(atom(b)));
  return render(r);
}

// Dense ids for the grounded atoms GA(tau, A).
class AtomSpace {
 public:
  AtomSpace() = default;
  AtomSpace(const std::vector<Symbol>& predicates, std::size_t domain_size) : n_(domain_size) {
    for (const auto& s : predicates) {
      index_[s.name] = preds_.size();
      preds_.push_back({s.name, s.arity, total_});
      total_ += checked_power(n_, s.arity);
    }
  }

  std::size_t size() const { return total_; }
  std::size_t domain_size() const { return n_; }
  bool has(const std::string& p) const { return index_.count(p) != 0; }
  std::size_t predicate_index(const std::string& p) const { return index_.at(p); }
  const std::string& predicate_name(std::size_t i) const { return preds_[i].name; }
  std::size_t predicate_count() const { return preds_.size(); }

  int id(std::size_t pred, const Tuple& t) const { return static_cast<int>(preds_[pred].offset + tuple_index(t, n_)); }
  int id(const GroundAtom& a) const { return id(predicate_index(a.predicate), a.args); }
  std::optional<int> find(const GroundAtom& a) const {
    auto it = index_.find(a.predicate);
    if (it == index_.end() || a.args.size() != preds_[it->second].arity) return std::nullopt;
    return id(it->second, a.args);
  }

  GroundAtom atom(int id) const {
    auto i = static_cast<std::size_t>(id);
    std::size_t p = preds_.size() - 1;
    while (preds_[p].offset > i) --p;
    return {preds_[p].name, tuple_at(i - preds_[p].offset, preds_[p].arity, n_)};
  }

  std::vector<int> ids(const std::set<GroundAtom>& atoms) const {
    std::vector<int> out;
    for (const auto& a : atoms) {
      auto i = find(a);
      if (!i) throw Error("atom " + a.predicate + " is outside the atom space");
      out.push_back(*i);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::set<GroundAtom> atoms(const std::vector<int>& ids) const {
    std::set<GroundAtom> out;
    for (int i : ids) out.insert(atom(i));
    return out;
  }

  // The true atoms of s, as sorted ids.
  std::vector<int> true_atoms(const Structure& s) const {
    std::vector<int> out;
    for (const auto& p : preds_) {
      const Relation& r = s.relation(p.name);
      for (std::size_t i = 0; i < r.cells(); ++i) {
        if (r.at(i)) out.push_back(static_cast<int>(p.offset + i));
      }
    }
    return out;
  }

 private:
  struct Pred {
    std::string name;
    std::size_t arity;
    std::size_t offset;
  };
  std::size_t n_ = 0;
  std::size_t total_ = 0;
  std::vector<Pred> preds_;
  std::map<std::string, std::size_t> index_;
};

// A ground rule over atom ids: pos & not neg -> head.
struct IntRule {
  std::vector<int> pos;
  std::vector<int> neg;
  std::vector<int> head;

  friend bool operator==(const IntRule&, const IntRule&) = default;
  friend auto operator<=>(const IntRule&, const IntRule&) = default;
};

namespace detail {

// A term with variables replaced by slot numbers and symbols resolved
// against one structure.
struct SlotTerm {
  enum class Kind { kSlot, kElement, kFunction } kind = Kind::kSlot;
  std::size_t slot = 0;
  Element value = 0;
  const FunctionTable* table = nullptr;
  std::vector<SlotTerm> args;

  Element eval(const std::vector<Element>& slots) const {
    switch (kind) {
      case Kind::kSlot: return slots[slot];
      case Kind::kElement: return value;
      case Kind::kFunction: {
        Tuple t;
        t.reserve(args.size());
        for (const auto& a : args) t.push_back(a.eval(slots));
        return table->apply(t);
      }
    }
    return 0;
  }
};

inline SlotTerm compile_term(const Term& t, const Structure& s, const std::map<std::string, std::size_t>& slots) {
  SlotTerm out;
  switch (t.kind) {
    case Term::Kind::kVariable:
      out.kind = SlotTerm::Kind::kSlot;
      out.slot = slots.at(t.name);
      break;
    case Term::Kind::kNumber:
      out.kind = SlotTerm::Kind::kElement;
      out.value = s.numeral(t.name);
      break;
    case Term::Kind::kFunction: {
      const FunctionTable* f = s.find_function(t.name);
      if (!f) throw Error("structure does not interpret function '" + t.name + "'");
      if (f->arity() != t.args.size()) throw Error("arity mismatch for function '" + t.name + "'");
      out.kind = SlotTerm::Kind::kFunction;
      out.table = f;
      for (const auto& a : t.args) out.args.push_back(compile_term(a, s, slots));
      break;
    }
  }
  return out;
}

struct SlotLiteral {
  bool negated = false;
  bool equality = false;
  const Relation* relation = nullptr;  // null for symbolic or equality literals
  std::string predicate;
  std::vector<SlotTerm> args;
  std::size_t ready = 0;  // number of bound slots needed to evaluate

  Tuple tuple(const std::vector<Element>& slots) const {
    Tuple t;
    t.reserve(args.size());
    for (const auto& a : args) t.push_back(a.eval(slots));
    return t;
  }

  bool holds(const std::vector<Element>& slots) const {
    bool v = equality ? args[0].eval(slots) == args[1].eval(slots) : relation->contains(tuple(slots));
    return v != negated;
  }
};

}  // namespace detail

// Instantiates one rule over a structure. Literals for which `symbolic`
// returns true are kept for the caller; all others are evaluated in the
// structure and filter the assignments. Variables are bound in an order that
// lets evaluated literals prune as early as possible.
class RuleGrounder {
 public:
  template <typename Symbolic>
  RuleGrounder(const Rule& r, const Structure& s, Symbolic&& symbolic) : n_(s.size()) {
    std::vector<std::string> order;
    for (const auto& l : r.body) {
      if (!symbolic(l)) collect_variables(l.atom, order);
    }
    for (const auto& v : rule_variables(r)) {
      if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
    }
    std::map<std::string, std::size_t> slots;
    for (std::size_t i = 0; i < order.size(); ++i) slots[order[i]] = i;
    slot_count_ = order.size();
    checks_.resize(slot_count_ + 1);
    auto compile = [&](const Atom& a, bool negated, bool evaluate) {
      detail::SlotLiteral l;
      l.negated = negated;
      l.equality = a.is_equality();
      l.predicate = a.predicate;
      for (const auto& t : a.args) l.args.push_back(detail::compile_term(t, s, slots));
      if (evaluate && !l.equality) {
        l.relation = s.find_relation(a.predicate);
        if (!l.relation) throw Error("structure does not interpret predicate '" + a.predicate + "'");
        if (l.relation->arity() != a.args.size()) throw Error("arity mismatch for predicate '" + a.predicate + "'");
      }
      std::vector<std::string> vs;
      collect_variables(a, vs);
      for (const auto& v : vs) l.ready = std::max(l.ready, slots.at(v) + 1);
      return l;
    };
    for (const auto& a : r.head) heads_.push_back(compile(a, false, false));
    for (const auto& l : r.body) {
      if (symbolic(l)) {
        symbolic_.push_back(compile(l.atom, l.negated, false));
      } else {
        auto c = compile(l.atom, l.negated, true);
        checks_[c.ready].push_back(std::move(c));
      }
    }
  }

  std::size_t variable_count() const { return slot_count_; }
  const std::vector<detail::SlotLiteral>& heads() const { return heads_; }
  const std::vector<detail::SlotLiteral>& symbolic() const { return symbolic_; }

  // fn(slots) for every assignment satisfying the evaluated literals.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    std::vector<Element> slots(slot_count_, 0);
    walk(0, slots, fn);
  }

 private:
  template <typename Fn>
  void walk(std::size_t i, std::vector<Element>& slots, Fn& fn) const {
    for (const auto& c : checks_[i]) {
      if (!c.holds(slots)) return;
    }
    if (i == slot_count_) {
      fn(static_cast<const std::vector<Element>&>(slots));
      return;
    }
    for (Element e = 0; e < n_; ++e) {
      slots[i] = e;
      walk(i + 1, slots, fn);
    }
  }

  std::size_t n_;
  std::size_t slot_count_ = 0;
  std::vector<std::vector<detail::SlotLiteral>> checks_;
  std::vector<detail::SlotLiteral> heads_;
  std::vector<detail::SlotLiteral> symbolic_;
};

inline std::vector<Symbol> predicate_symbols(const Program& p, const std::set<std::string>& names) {
  std::vector<Symbol> out;
  for (const auto& n : names) {
    const SymbolInfo* info = p.vocabulary().find(n);
    out.push_back({n, SymbolKind::kPredicate, info ? info->arity : 0});
  }
  return out;
}

inline void require_interpretation(const Program& p, const Structure& s) {
  for (const auto& [name, info] : p.vocabulary()) {
    const SymbolInfo* got = s.vocabulary().find(name);
    if (!got) throw Error("structure is missing symbol '" + name + "'");
    if (!(*got == info)) throw Error("structure interprets '" + name + "' with a different kind or arity");
  }
}

// Ground rules of p over s with the residue evaluated: positive intensional
// body atoms and heads as ids. Duplicates removed, sorted.
inline std::vector<IntRule> reduct_rules(const Program& p, const Structure& s, const AtomSpace& space) {
  std::vector<IntRule> out;
  const auto& tau = p.intensional();
  for (const auto& r : p.rules()) {
    RuleGrounder g(r, s, [&](const Literal& l) { return is_positive_intensional(l, tau); });
    std::vector<std::size_t> head_pred, body_pred;
    for (const auto& h : g.heads()) head_pred.push_back(space.predicate_index(h.predicate));
    for (const auto& b : g.symbolic()) body_pred.push_back(space.predicate_index(b.predicate));
    g.for_each([&](const std::vector<Element>& slots) {
      IntRule ir;
      for (std::size_t i = 0; i < g.symbolic().size(); ++i) ir.pos.push_back(space.id(body_pred[i], g.symbolic()[i].tuple(slots)));
      for (std::size_t i = 0; i < g.heads().size(); ++i) ir.head.push_back(space.id(head_pred[i], g.heads()[i].tuple(slots)));
      std::sort(ir.pos.begin(), ir.pos.end());
      ir.pos.erase(std::unique(ir.pos.begin(), ir.pos.end()), ir.pos.end());
      std::sort(ir.head.begin(), ir.head.end());
      ir.head.erase(std::unique(ir.head.begin(), ir.head.end()), ir.head.end());
      out.push_back(std::move(ir));
    });
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Pi^A: the set of gamma+[alpha] for all rules and assignments whose residue
// holds in s.
inline std::set<GroundRule> gl_reduct(const Program& p, const Structure& s) {
  require_interpretation(p, s);
  AtomSpace space(predicate_symbols(p, p.intensional()), s.size());
  std::set<GroundRule> out;
  for (const auto& r : reduct_rules(p, s, space)) {
    GroundRule g;
    for (int i : r.pos) g.body.insert(space.atom(i));
    for (int i : r.head) g.head.insert(space.atom(i));
    out.insert(std::move(g));
  }
  return out;
}

}  // namespace lpx

#endif  // LPX_GROUNDER_HPP_
