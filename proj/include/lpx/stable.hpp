// Stable models over finite structures by two independent routes: minimal
// models of the GL reduct, and minimal models of the progression fixpoint.
// Also enumerates the stable expansions of a structure.

#ifndef LPX_STABLE_HPP_
#define LPX_STABLE_HPP_

#include <lpx/grounder.hpp>
#include <lpx/sat.hpp>

#include <bit>
#include <stdexcept>
#include <unordered_set>

namespace lpx {

using ClauseSet = std::set<PositiveClause>;

// ---------------------------------------------------------------------------
// Models and minimal models over atom ids
// ---------------------------------------------------------------------------

namespace detail {

inline bool contains_sorted(const std::vector<int>& v, int x) { return std::binary_search(v.begin(), v.end(), x); }

inline bool subset_of(const std::vector<int>& a, const std::vector<int>& m) {
  return std::all_of(a.begin(), a.end(), [&](int x) { return contains_sorted(m, x); });
}

inline bool intersects(const std::vector<int>& a, const std::vector<int>& m) {
  return std::any_of(a.begin(), a.end(), [&](int x) { return contains_sorted(m, x); });
}

// Index of the first rule (pos -> head) that m violates, if any. `neg` is
// ignored: callers pass plain rules.
inline std::optional<std::size_t> violated_rule(const std::vector<int>& m, const std::vector<IntRule>& rules) {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (subset_of(rules[i].pos, m) && !intersects(rules[i].head, m)) return i;
  }
  return std::nullopt;
}

inline bool models_without(const std::vector<int>& m, int drop, const std::vector<IntRule>& rules) {
  for (const auto& r : rules) {
    bool body = std::all_of(r.pos.begin(), r.pos.end(), [&](int x) { return x != drop && contains_sorted(m, x); });
    if (!body) continue;
    bool head = std::any_of(r.head.begin(), r.head.end(), [&](int x) { return x != drop && contains_sorted(m, x); });
    if (!head) return false;
  }
  return true;
}

}  // namespace detail

struct MinimalityOptions {
  bool exhaustive = false;           // plain subset-lattice walk (oracle mode)
  std::size_t exhaustive_cap = 20;   // atom limit for the exhaustive walk
  bool prune = true;                 // progression check: skip subsumed clauses
};

// A proper subset of m that is still a model of the plain rules, if any.
// m must be sorted and a model.
inline std::optional<std::vector<int>> smaller_model(const std::vector<int>& m, const std::vector<IntRule>& rules,
                                                     const MinimalityOptions& opt = {}) {
  for (int a : m) {
    if (detail::models_without(m, a, rules)) {
      std::vector<int> out;
      for (int x : m) {
        if (x != a) out.push_back(x);
      }
      return out;
    }
  }
  if (m.size() <= 1) return std::nullopt;
  if (opt.exhaustive) {
    if (m.size() > opt.exhaustive_cap) {
      throw Error("minimality check over " + std::to_string(m.size()) + " atoms exceeds the full-lattice cap of " +
                  std::to_string(opt.exhaustive_cap));
    }
    std::size_t full = (std::size_t{1} << m.size()) - 1;
    for (std::size_t mask = 0; mask < full; ++mask) {
      std::vector<int> sub;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (mask >> i & 1) sub.push_back(m[i]);
      }
      if (!detail::violated_rule(sub, rules)) return sub;
    }
    return std::nullopt;
  }
  // Variables: one per atom of m. Every rule whose body lies inside m must
  // stay satisfied, and at least one atom must be dropped.
  std::map<int, int> var;
  for (std::size_t i = 0; i < m.size(); ++i) var[m[i]] = static_cast<int>(i);
  SatSolver sat(static_cast<int>(m.size()));
  for (const auto& r : rules) {
    if (!detail::subset_of(r.pos, m)) continue;
    std::vector<Lit> c;
    for (int b : r.pos) c.push_back(neg_lit(var[b]));
    for (int h : r.head) {
      if (detail::contains_sorted(m, h)) c.push_back(pos_lit(var[h]));
    }
    sat.add_clause(std::move(c));
  }
  std::vector<Lit> drop;
  for (std::size_t i = 0; i < m.size(); ++i) drop.push_back(neg_lit(static_cast<int>(i)));
  sat.add_clause(std::move(drop));
  auto model = sat.solve();
  if (!model) return std::nullopt;
  std::vector<int> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if ((*model)[i] == 1) out.push_back(m[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Public checks on grounded atoms
// ---------------------------------------------------------------------------

namespace detail {

// Atom ids for an ad-hoc collection of grounded atoms.
class AtomIndex {
 public:
  int id(const GroundAtom& a) {
    auto [it, inserted] = ids_.emplace(a, static_cast<int>(atoms_.size()));
    if (inserted) atoms_.push_back(a);
    return it->second;
  }
  std::vector<int> ids(const std::set<GroundAtom>& as) {
    std::vector<int> out;
    for (const auto& a : as) out.push_back(id(a));
    std::sort(out.begin(), out.end());
    return out;
  }
  std::set<GroundAtom> atoms(const std::vector<int>& ids) const {
    std::set<GroundAtom> out;
    for (int i : ids) out.insert(atoms_[i]);
    return out;
  }

 private:
  std::map<GroundAtom, int> ids_;
  std::vector<GroundAtom> atoms_;
};

inline std::vector<IntRule> index_rules(const std::set<GroundRule>& g, AtomIndex& ix) {
  std::vector<IntRule> out;
  for (const auto& r : g) out.push_back({ix.ids(r.body), {}, ix.ids(r.head)});
  return out;
}

inline std::vector<IntRule> index_clauses(const ClauseSet& cs, AtomIndex& ix) {
  std::vector<IntRule> out;
  for (const auto& c : cs) out.push_back({{}, {}, ix.ids(c)});
  return out;
}

}  // namespace detail

inline bool is_model(const Interpretation& i, const std::set<GroundRule>& g) {
  detail::AtomIndex ix;
  auto rules = detail::index_rules(g, ix);
  return !detail::violated_rule(ix.ids(i), rules);
}

inline bool is_model(const Interpretation& i, const ClauseSet& sigma) {
  detail::AtomIndex ix;
  auto rules = detail::index_clauses(sigma, ix);
  return !detail::violated_rule(ix.ids(i), rules);
}

inline std::optional<Interpretation> smaller_model(const Interpretation& i, const std::set<GroundRule>& g,
                                                   const MinimalityOptions& opt = {}) {
  detail::AtomIndex ix;
  auto m = ix.ids(i);
  auto rules = detail::index_rules(g, ix);
  auto sub = smaller_model(m, rules, opt);
  if (!sub) return std::nullopt;
  return ix.atoms(*sub);
}

inline bool is_minimal_model(const Interpretation& i, const std::set<GroundRule>& g, const MinimalityOptions& opt = {}) {
  return is_model(i, g) && !smaller_model(i, g, opt);
}

inline bool is_minimal_model(const Interpretation& i, const ClauseSet& sigma, const MinimalityOptions& opt = {}) {
  detail::AtomIndex ix;
  auto m = ix.ids(i);
  auto rules = detail::index_clauses(sigma, ix);
  return !detail::violated_rule(m, rules) && !smaller_model(m, rules, opt);
}

// Drops clauses that strictly contain another clause. Never changes which
// interpretations are models.
inline ClauseSet remove_subsumed(const ClauseSet& sigma) {
  ClauseSet out;
  for (const auto& c : sigma) {
    bool subsumed = std::any_of(sigma.begin(), sigma.end(), [&](const PositiveClause& d) {
      return d.size() < c.size() && std::includes(c.begin(), c.end(), d.begin(), d.end());
    });
    if (!subsumed) out.insert(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Progression
// ---------------------------------------------------------------------------

// Gamma(sigma): H u C1 u ... u Ck for every rule p1..pk -> H and clauses
// Ci u {pi} in sigma, where Ci is the clause with pi removed.
inline ClauseSet gamma_step(const std::set<GroundRule>& g, const ClauseSet& sigma) {
  ClauseSet out;
  for (const auto& r : g) {
    std::vector<GroundAtom> body(r.body.begin(), r.body.end());
    std::vector<const PositiveClause*> pick(body.size());
    auto rec = [&](auto& self, std::size_t i) -> void {
      if (i == body.size()) {
        PositiveClause c = r.head;
        for (std::size_t j = 0; j < body.size(); ++j) {
          for (const auto& a : *pick[j]) {
            if (!(a == body[j])) c.insert(a);
          }
        }
        out.insert(std::move(c));
        return;
      }
      for (const auto& d : sigma) {
        if (d.count(body[i])) {
          pick[i] = &d;
          self(self, i + 1);
        }
      }
    };
    rec(rec, 0);
  }
  return out;
}

inline constexpr std::size_t kDefaultClauseCap = std::size_t{1} << 21;
inline constexpr std::size_t kDefaultTraceDepth = 64;

// Stages of Gamma over id-level plain rules, computed semi-naively. Clauses
// are kept as atom bitsets for combination and as sorted id vectors for
// callers, both in derivation order.
class Progression {
 public:
  // With prune set, a derived clause is dropped when a known clause is a
  // subset of it. Stages then differ from the raw ones, but the fixpoint has
  // exactly the same models.
  explicit Progression(const std::vector<IntRule>& rules, std::size_t atom_count, std::size_t clause_cap = kDefaultClauseCap,
                       bool prune = false)
      : rules_(rules),
        cap_(clause_cap),
        prune_(prune),
        words_(std::max<std::size_t>(1, (atom_count + 63) / 64)),
        occurs_(atom_count),
        seen_(16, Hash{this}, Equal{this}) {
    stage_end_.push_back(0);
  }

  Progression(const Progression&) = delete;
  Progression& operator=(const Progression&) = delete;

  // Computes one more stage; returns false once nothing new appears.
  bool step() {
    std::size_t old_end = stage_end_.size() >= 2 ? stage_end_[stage_end_.size() - 2] : 0;
    std::size_t delta_end = stage_end_.back();
    std::size_t before = clauses_.size();
    bool first = stage_end_.size() == 1;
    for (const auto& r : rules_) {
      if (r.pos.empty()) {
        if (first) {
          scratch_.assign(words_, 0);
          for (int a : r.head) set_bit(scratch_.data(), a);
          add(scratch_.data());
        }
        continue;
      }
      for (std::size_t j = 0; j < r.pos.size(); ++j) combine(r, j, old_end, delta_end);
    }
    stage_end_.push_back(clauses_.size());
    return clauses_.size() != before;
  }

  // Runs to the fixpoint or to max_stages; returns whether it converged.
  bool run(std::size_t max_stages = std::numeric_limits<std::size_t>::max()) {
    while (stages() < max_stages) {
      if (!step()) {
        stage_end_.pop_back();
        return true;
      }
    }
    return false;
  }

  // Number of stages computed (stage 0 is the empty set).
  std::size_t stages() const { return stage_end_.size() - 1; }
  // Clauses of stage n are clauses()[0, stage_size(n)).
  std::size_t stage_size(std::size_t n) const { return stage_end_.at(n); }
  const std::vector<std::vector<int>>& clauses() const { return clauses_; }

 private:
  static constexpr std::size_t kProbe = std::numeric_limits<std::size_t>::max();

  static void set_bit(std::uint64_t* w, int a) { w[a / 64] |= std::uint64_t{1} << (a % 64); }

  const std::uint64_t* bits(std::size_t id) const { return id == kProbe ? probe_ : bits_.data() + id * words_; }

  struct Hash {
    const Progression* self;
    std::size_t operator()(std::size_t id) const {
      const std::uint64_t* w = self->bits(id);
      std::size_t h = 0x9e3779b97f4a7c15ULL;
      for (std::size_t i = 0; i < self->words_; ++i) h = (h ^ w[i]) * 0x100000001b3ULL + (h >> 29);
      return h;
    }
  };
  struct Equal {
    const Progression* self;
    bool operator()(std::size_t a, std::size_t b) const {
      return std::equal(self->bits(a), self->bits(a) + self->words_, self->bits(b));
    }
  };

  void add(const std::uint64_t* w) {
    probe_ = w;
    if (seen_.count(kProbe)) return;
    if (prune_ && subsumed(w)) return;
    if (clauses_.size() >= cap_) throw Error("progression exceeds the clause cap of " + std::to_string(cap_));
    std::size_t id = clauses_.size();
    bits_.insert(bits_.end(), w, w + words_);
    std::vector<int> c;
    for (std::size_t i = 0; i < words_; ++i) {
      for (std::uint64_t x = w[i]; x; x &= x - 1) c.push_back(static_cast<int>(i * 64 + std::countr_zero(x)));
    }
    for (int a : c) occurs_[a].push_back(static_cast<int>(id));
    clauses_.push_back(std::move(c));
    seen_.insert(id);
  }

  // Position j takes a clause from the last delta, positions before j from
  // older stages, positions after j from anything up to the delta's end.
  void combine(const IntRule& r, std::size_t j, std::size_t old_end, std::size_t delta_end) {
    std::size_t k = r.pos.size();
    // acc[i] holds the head plus the side clauses chosen for positions < i.
    std::vector<std::uint64_t> acc((k + 1) * words_, 0);
    for (int a : r.head) set_bit(acc.data(), a);
    auto rec = [&](auto& self, std::size_t i) -> void {
      if (i == k) {
        add(acc.data() + k * words_);
        return;
      }
      std::size_t lo = i == j ? old_end : 0;
      std::size_t hi = i < j ? old_end : delta_end;
      int atom = r.pos[i];
      const std::uint64_t* in = acc.data() + i * words_;
      std::uint64_t* out = acc.data() + (i + 1) * words_;
      // occurs_ may grow during the walk; only indices below hi are read.
      for (std::size_t t = 0; t < occurs_[atom].size(); ++t) {
        std::size_t d = static_cast<std::size_t>(occurs_[atom][t]);
        if (d < lo) continue;
        if (d >= hi) break;
        const std::uint64_t* side = bits_.data() + d * words_;
        for (std::size_t w = 0; w < words_; ++w) out[w] = in[w] | side[w];
        // The side clause loses its selected atom unless the head or an
        // earlier side clause already contributed it.
        std::uint64_t mask = std::uint64_t{1} << (atom % 64);
        out[atom / 64] = (out[atom / 64] & ~mask) | (in[atom / 64] & mask);
        self(self, i + 1);
      }
    };
    rec(rec, 0);
  }

  bool subsumed(const std::uint64_t* w) {
    std::vector<int> atoms;
    for (std::size_t i = 0; i < words_; ++i) {
      for (std::uint64_t x = w[i]; x; x &= x - 1) atoms.push_back(static_cast<int>(i * 64 + std::countr_zero(x)));
    }
    if (atoms.size() < 20 && (std::size_t{1} << atoms.size()) < clauses_.size()) {
      std::vector<std::uint64_t> sub(words_);
      for (std::size_t m = 0; m + 1 < (std::size_t{1} << atoms.size()); ++m) {
        std::fill(sub.begin(), sub.end(), 0);
        for (std::size_t k = 0; k < atoms.size(); ++k) {
          if (m >> k & 1) set_bit(sub.data(), atoms[k]);
        }
        probe_ = sub.data();
        bool hit = seen_.count(kProbe) > 0;
        probe_ = w;
        if (hit) return true;
      }
      return false;
    }
    for (std::size_t id = 0; id < clauses_.size(); ++id) {
      const std::uint64_t* c = bits_.data() + id * words_;
      bool inside = true;
      for (std::size_t i = 0; i < words_ && inside; ++i) inside = (c[i] & ~w[i]) == 0;
      if (inside) return true;
    }
    return false;
  }

  std::vector<IntRule> rules_;
  std::size_t cap_;
  bool prune_;
  std::size_t words_;
  std::vector<std::vector<int>> occurs_;
  std::vector<std::vector<int>> clauses_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> scratch_;
  const std::uint64_t* probe_ = nullptr;
  std::unordered_set<std::size_t, Hash, Equal> seen_;
  std::vector<std::size_t> stage_end_;
};

struct GammaTrace {
  std::vector<ClauseSet> stages;  // stages[n] = Gamma^n, up to the trace depth
  ClauseSet fixpoint;
  std::size_t stage_count = 0;    // first n with Gamma^n = Gamma^omega
};

inline GammaTrace gamma_omega(const Structure& s, const Program& p, std::size_t trace_depth = kDefaultTraceDepth,
                              std::size_t clause_cap = kDefaultClauseCap) {
  require_interpretation(p, s);
  AtomSpace space(predicate_symbols(p, p.intensional()), s.size());
  Progression prog(reduct_rules(p, s, space), space.size(), clause_cap);
  prog.run();
  auto to_set = [&](std::size_t n) {
    ClauseSet out;
    for (std::size_t i = 0; i < prog.stage_size(n); ++i) out.insert(space.atoms(prog.clauses()[i]));
    return out;
  };
  GammaTrace t;
  t.stage_count = prog.stages();
  for (std::size_t n = 0; n <= std::min(trace_depth, prog.stages()); ++n) t.stages.push_back(to_set(n));
  t.fixpoint = to_set(prog.stages());
  return t;
}

// ---------------------------------------------------------------------------
// Stability checks
// ---------------------------------------------------------------------------

struct StableReport {
  bool stable = false;
  std::string reason;
  std::optional<Interpretation> smaller_model;  // minimality witness
  std::optional<std::string> violated;          // falsified ground rule or clause
};

namespace detail {

inline StableReport minimal_report(const std::vector<int>& m, const std::vector<IntRule>& rules, const AtomSpace& space,
                                   const Structure& s, const MinimalityOptions& opt) {
  StableReport rep;
  if (auto v = violated_rule(m, rules)) {
    GroundRule g;
    for (int i : rules[*v].pos) g.body.insert(space.atom(i));
    for (int i : rules[*v].head) g.head.insert(space.atom(i));
    rep.reason = "not a model";
    rep.violated = render(g, s);
    return rep;
  }
  if (auto sub = smaller_model(m, rules, opt)) {
    rep.reason = "not minimal";
    rep.smaller_model = space.atoms(*sub);
    return rep;
  }
  rep.stable = true;
  return rep;
}

}  // namespace detail

// Ins(s, tau) is a minimal model of the GL reduct of p over s.
inline StableReport is_stable_reduct(const Structure& s, const Program& p, const MinimalityOptions& opt = {}) {
  require_interpretation(p, s);
  AtomSpace space(predicate_symbols(p, p.intensional()), s.size());
  return detail::minimal_report(space.true_atoms(s), reduct_rules(p, s, space), space, s, opt);
}

// Ins(s, tau) is a minimal model of the progression fixpoint. For normal
// programs the equality Ins = unit clauses of the fixpoint is checked too and
// must agree.
inline StableReport is_stable_progression(const Structure& s, const Program& p, const MinimalityOptions& opt = {},
                                          std::size_t clause_cap = kDefaultClauseCap) {
  require_interpretation(p, s);
  AtomSpace space(predicate_symbols(p, p.intensional()), s.size());
  Progression prog(reduct_rules(p, s, space), space.size(), clause_cap, opt.prune);
  prog.run();
  std::vector<IntRule> clauses;
  for (const auto& c : prog.clauses()) clauses.push_back({{}, {}, c});
  auto m = space.true_atoms(s);
  StableReport rep = detail::minimal_report(m, clauses, space, s, opt);
  if (rep.violated) rep.violated = "clause " + *rep.violated;
  if (classify(p).normal) {
    std::vector<int> units;
    bool empty_clause = false;
    for (const auto& c : prog.clauses()) {
      if (c.empty()) empty_clause = true;
      if (c.size() == 1) units.push_back(c[0]);
      if (c.size() > 1) throw std::logic_error("normal program derived a multi-atom clause");
    }
    std::sort(units.begin(), units.end());
    bool shortcut = !empty_clause && units == m;
    if (shortcut != rep.stable) throw std::logic_error("fixpoint-equality and minimality criteria disagree");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Stable expansions
// ---------------------------------------------------------------------------

struct EnumerationOptions {
  std::size_t cap = kDefaultEnumerationCap;
  bool brute_force = false;  // enumerate every expansion and test it (oracle)
};

namespace detail {

inline void check_aux(const Structure& base, const Program& p, const std::vector<Symbol>& aux) {
  Vocabulary known = base.vocabulary();
  for (const auto& s : aux) {
    if (base.interprets(s.name)) throw Error("auxiliary symbol '" + s.name + "' is already interpreted by the structure");
    known.add(s);
  }
  for (const auto& [name, info] : p.vocabulary()) {
    const SymbolInfo* got = known.find(name);
    if (!got) throw Error("symbol '" + name + "' is neither interpreted nor auxiliary");
    if (!(*got == info)) throw Error("symbol '" + name + "' has a different kind or arity in the structure");
  }
}

// Searches the intensional atoms of p over a structure e; `free_preds` are
// intensional predicates not interpreted by e and `guessed` are
// non-intensional predicates left to the solver, which are fixed before
// minimality is checked. fn receives each stable expansion.
template <typename Fn>
bool search_intensional(const Structure& e, const Program& p, const std::set<std::string>& free_preds,
                        const std::set<std::string>& guessed, Fn& fn) {
  const auto& tau = p.intensional();
  std::set<std::string> searched = tau;
  searched.insert(guessed.begin(), guessed.end());
  AtomSpace space(predicate_symbols(p, searched), e.size());
  const int n_atoms = static_cast<int>(space.size());
  std::vector<char> is_guessed(n_atoms, 0);
  for (const auto& name : guessed) {
    std::size_t pi = space.predicate_index(name);
    std::size_t arity = p.vocabulary().find(name)->arity, cells = 1;
    for (std::size_t i = 0; i < arity; ++i) cells *= e.size();
    for (std::size_t c = 0; c < cells; ++c) is_guessed[space.id(pi, tuple_at(c, arity, e.size()))] = 1;
  }
  std::vector<IntRule> ground;
  for (const auto& r : p.rules()) {
    auto symbolic = [&](const Literal& l) { return !l.atom.is_equality() && searched.count(l.atom.predicate) != 0; };
    RuleGrounder g(r, e, symbolic);
    std::vector<std::size_t> head_pred, body_pred;
    for (const auto& h : g.heads()) head_pred.push_back(space.predicate_index(h.predicate));
    for (const auto& b : g.symbolic()) body_pred.push_back(space.predicate_index(b.predicate));
    g.for_each([&](const std::vector<Element>& slots) {
      IntRule ir;
      for (std::size_t i = 0; i < g.symbolic().size(); ++i) {
        int id = space.id(body_pred[i], g.symbolic()[i].tuple(slots));
        (g.symbolic()[i].negated ? ir.neg : ir.pos).push_back(id);
      }
      for (std::size_t i = 0; i < g.heads().size(); ++i) ir.head.push_back(space.id(head_pred[i], g.heads()[i].tuple(slots)));
      for (auto* v : {&ir.pos, &ir.neg, &ir.head}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
      }
      ground.push_back(std::move(ir));
    });
  }
  std::sort(ground.begin(), ground.end());
  ground.erase(std::unique(ground.begin(), ground.end()), ground.end());

  SatSolver sat(n_atoms);
  // Atoms of intensional predicates fixed by the structure.
  for (const auto& name : tau) {
    if (free_preds.count(name)) continue;
    const Relation& r = e.relation(name);
    std::size_t pi = space.predicate_index(name);
    for (std::size_t c = 0; c < r.cells(); ++c) {
      int id = space.id(pi, tuple_at(c, r.arity(), e.size()));
      sat.add_clause({r.at(c) ? pos_lit(id) : neg_lit(id)});
    }
  }
  // Each rule holds: some body literal fails or some head atom is true.
  std::vector<int> body_var(ground.size(), -1);
  std::vector<std::vector<std::size_t>> heads_of(n_atoms);
  for (std::size_t ri = 0; ri < ground.size(); ++ri) {
    const auto& r = ground[ri];
    std::vector<Lit> c;
    for (int a : r.pos) c.push_back(neg_lit(a));
    for (int a : r.neg) c.push_back(pos_lit(a));
    for (int a : r.head) c.push_back(pos_lit(a));
    sat.add_clause(c);
    for (int a : r.head) heads_of[a].push_back(ri);
  }
  // Support: a true atom needs a rule with a true body whose other head atoms
  // are false. Necessary for minimality of the reduct, and cheap to encode.
  auto define_and = [&](const std::vector<Lit>& conj) {
    int v = sat.add_var();
    std::vector<Lit> back{pos_lit(v)};
    for (Lit l : conj) {
      sat.add_clause({neg_lit(v), l});
      back.push_back(l ^ 1);
    }
    sat.add_clause(back);
    return v;
  };
  for (int a = 0; a < n_atoms; ++a) {
    if (is_guessed[a]) continue;
    std::vector<Lit> support{neg_lit(a)};
    bool trivially = false;
    for (std::size_t ri : heads_of[a]) {
      const auto& r = ground[ri];
      std::vector<Lit> conj;
      for (int b : r.pos) conj.push_back(pos_lit(b));
      for (int b : r.neg) conj.push_back(neg_lit(b));
      for (int h : r.head) {
        if (h != a) conj.push_back(neg_lit(h));
      }
      if (conj.empty()) {
        trivially = true;
        break;
      }
      if (conj.size() == 1) {
        support.push_back(conj[0]);
        continue;
      }
      if (r.head.size() == 1) {
        if (body_var[ri] < 0) body_var[ri] = define_and(conj);
        support.push_back(pos_lit(body_var[ri]));
      } else {
        support.push_back(pos_lit(define_and(conj)));
      }
    }
    if (!trivially) sat.add_clause(std::move(support));
  }

  std::vector<int> atoms(n_atoms);
  for (int a = 0; a < n_atoms; ++a) atoms[a] = a;
  return sat.enumerate_projected(
      [&](const std::vector<std::int8_t>& v) {
        std::vector<int> m, fixed;
        for (int a = 0; a < n_atoms; ++a) {
          if (v[a] == 1) (is_guessed[a] ? fixed : m).push_back(a);
        }
        std::vector<IntRule> reduct;
        for (const auto& r : ground) {
          if (intersects(r.neg, m) || intersects(r.neg, fixed)) continue;
          // Guessed atoms only occur in bodies and act as facts here.
          std::vector<int> pos;
          bool holds = true;
          for (int b : r.pos) {
            if (is_guessed[b]) {
              holds &= std::binary_search(fixed.begin(), fixed.end(), b);
            } else {
              pos.push_back(b);
            }
          }
          if (holds && subset_of(pos, m)) reduct.push_back({std::move(pos), {}, r.head});
        }
        if (smaller_model(m, reduct)) return true;
        Structure out = e;
        for (const auto& name : free_preds) out.add_predicate(name, p.vocabulary().find(name)->arity);
        for (const auto& name : guessed) out.add_predicate(name, p.vocabulary().find(name)->arity);
        for (int a : m) {
          GroundAtom g = space.atom(a);
          if (free_preds.count(g.predicate)) out.set(g.predicate, g.args);
        }
        for (int a : fixed) {
          GroundAtom g = space.atom(a);
          out.set(g.predicate, g.args);
        }
        return fn(static_cast<const Structure&>(out));
      },
      atoms);
}

}  // namespace detail

// Calls fn(expansion) for every expansion of base by aux that is a stable
// model of p, in a deterministic order. fn may return false to stop.
template <typename Fn>
void for_each_stable_expansion(const Structure& base, const Program& p, const std::vector<Symbol>& aux, Fn&& fn,
                               const EnumerationOptions& opt = {}) {
  detail::check_aux(base, p, aux);
  auto emit = [&](const Structure& s) -> bool {
    if constexpr (std::is_same_v<std::invoke_result_t<Fn&, const Structure&>, bool>) {
      return fn(s);
    } else {
      fn(s);
      return true;
    }
  };
  if (opt.brute_force) {
    for_each_expansion(
        base, aux, [&](const Structure& e) { return !is_stable_reduct(e, p).stable || emit(e); }, opt.cap);
    return;
  }
  std::vector<Symbol> outer;
  std::set<std::string> free_preds, guessed;
  for (const auto& s : aux) {
    if (s.kind == SymbolKind::kPredicate && p.is_intensional(s.name)) {
      free_preds.insert(s.name);
    } else if (s.kind == SymbolKind::kPredicate && p.vocabulary().find(s.name)) {
      guessed.insert(s.name);
    } else {
      outer.push_back(s);
    }
  }
  std::vector<std::string> order_names;
  for (const auto& s : aux) order_names.push_back(s.name);
  for_each_expansion(
      base, outer,
      [&](const Structure& e) {
        auto confirm = [&](const Structure& found) {
          // Re-establish the aux symbol order of a plain expansion.
          Structure s = base;
          for (const auto& sym : aux) {
            if (sym.kind == SymbolKind::kPredicate) {
              s.add_predicate(sym.name, sym.arity) = found.relation(sym.name);
            } else {
              s.add_function(sym.name, sym.arity) = found.function(sym.name);
            }
          }
          if (!is_stable_reduct(s, p).stable) throw std::logic_error("search produced an expansion the reduct check rejects");
          return emit(s);
        };
        return detail::search_intensional(e, p, free_preds, guessed, confirm);
      },
      opt.cap);
}

inline std::vector<Structure> enumerate_stable_expansions(const Structure& base, const Program& p, const std::vector<Symbol>& aux,
                                                          const EnumerationOptions& opt = {}) {
  std::vector<Structure> out;
  for_each_stable_expansion(base, p, aux, [&](const Structure& s) { out.push_back(s); }, opt);
  return out;
}

inline bool has_stable_expansion(const Structure& base, const Program& p, const std::vector<Symbol>& aux,
                                 const EnumerationOptions& opt = {}) {
  bool found = false;
  for_each_stable_expansion(
      base, p, aux,
      [&](const Structure&) {
        found = true;
        return false;
      },
      opt);
  return found;
}

// Symbols of p that base does not interpret, in vocabulary order.
inline std::vector<Symbol> missing_symbols(const Structure& base, const Program& p) {
  std::vector<Symbol> out;
  for (const auto& s : p.vocabulary().symbols()) {
    if (!base.interprets(s.name)) out.push_back(s);
  }
  return out;
}

}  // namespace lpx

#endif  // LPX_STABLE_HPP_
