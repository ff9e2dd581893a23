// Finite model finding for first-order sentences by propositional encoding:
// the unknown symbols become SAT variables (one-hot for function values),
// quantifiers are expanded over the domain and connectives become Tseitin
// gates.

#ifndef LPX_MODEL_FINDER_HPP_
#define LPX_MODEL_FINDER_HPP_

#include <lpx/formula.hpp>
#include <lpx/sat.hpp>
#include <lpx/structure.hpp>

#include <unordered_map>

namespace lpx {

class ModelFinder {
 public:
  // Symbols of `unknown` are to be found; everything else must be
  // interpreted by base.
  ModelFinder(const Structure& base, std::vector<Symbol> unknown) : base_(base), unknown_(std::move(unknown)) {
    n_ = base_.size();
    solver_.add_clause({pos_lit(solver_.add_var())});  // variable 0 is constant true
    for (const auto& s : unknown_) {
      if (base_.interprets(s.name)) throw Error("symbol " + s.name + " is already interpreted");
      Cells c;
      c.symbol = s;
      std::size_t cells = checked_power(n_, s.arity);
      std::size_t width = s.kind == SymbolKind::kPredicate ? 1 : n_;
      if (cells * width > (std::size_t{1} << 24)) throw Error("too many unknown cells for " + s.name);
      c.first = solver_.var_count();
      for (std::size_t i = 0; i < cells * width; ++i) solver_.add_var();
      if (s.kind == SymbolKind::kFunction) {
        for (std::size_t cell = 0; cell < cells; ++cell) {
          std::vector<Lit> some;
          for (std::size_t v = 0; v < n_; ++v) some.push_back(pos_lit(c.first + static_cast<int>(cell * n_ + v)));
          solver_.add_clause(some);
          for (std::size_t v = 0; v < n_; ++v) {
            for (std::size_t w = v + 1; w < n_; ++w) solver_.add_clause({some[v] ^ 1, some[w] ^ 1});
          }
        }
      }
      cells_.emplace(s.name, c);
    }
  }

  // Adds the universal closure of f (first-order quantifiers are expanded).
  void require(const Formula& f) {
    auto vars = free_variables(f);
    for (const auto& a : assignments(base_, vars)) {
      Assignment alpha = a;
      solver_.add_clause({formula(f, alpha)});
    }
  }

  // Calls fn(expansion) once per distinct interpretation of the `keep`
  // symbols (all unknown symbols when keep is empty) that extends to a model.
  // Each expansion interprets base's symbols plus `keep`. fn may return
  // false to stop.
  template <typename Fn>
  void for_each_model(Fn&& fn, std::vector<std::string> keep = {}) {
    if (keep.empty()) {
      for (const auto& s : unknown_) keep.push_back(s.name);
    }
    std::vector<int> projection;
    for (const auto& name : keep) {
      const Cells& c = cells_.at(name);
      std::size_t width = c.symbol.kind == SymbolKind::kPredicate ? 1 : n_;
      for (std::size_t i = 0; i < checked_power(n_, c.symbol.arity) * width; ++i) projection.push_back(c.first + static_cast<int>(i));
    }
    solver_.enumerate_projected(
        [&](const std::vector<std::int8_t>& m) -> bool {
          Structure s = base_;
          for (const auto& name : keep) {
            const Cells& c = cells_.at(name);
            std::size_t cells = checked_power(n_, c.symbol.arity);
            if (c.symbol.kind == SymbolKind::kPredicate) {
              Relation& r = s.add_predicate(name, c.symbol.arity);
              for (std::size_t i = 0; i < cells; ++i) r.set_at(i, m[c.first + i] == 1);
            } else {
              FunctionTable& f = s.add_function(name, c.symbol.arity);
              for (std::size_t i = 0; i < cells; ++i) {
                for (std::size_t v = 0; v < n_; ++v) {
                  if (m[c.first + i * n_ + v] == 1) f.set_at(i, static_cast<Element>(v));
                }
              }
            }
          }
          if constexpr (std::is_same_v<std::invoke_result_t<Fn&, const Structure&>, bool>) {
            return fn(static_cast<const Structure&>(s));
          } else {
            fn(static_cast<const Structure&>(s));
            return true;
          }
        },
        projection);
  }

  bool satisfiable() {
    bool found = false;
    for_each_model(
        [&](const Structure&) {
          found = true;
          return false;
        },
        {unknown_.empty() ? std::vector<std::string>{} : std::vector<std::string>{unknown_.front().name}});
    return found;
  }

 private:
  struct Cells {
    Symbol symbol;
    int first = 0;
  };

  static constexpr Lit kTrue = 0;   // pos_lit(0)
  static constexpr Lit kFalse = 1;  // neg_lit(0)

  Lit gate(bool conj, std::vector<Lit> in) {
    Lit absorbing = conj ? kFalse : kTrue;
    Lit neutral = conj ? kTrue : kFalse;
    std::vector<Lit> xs;
    for (Lit l : in) {
      if (l == absorbing) return absorbing;
      if (l != neutral) xs.push_back(l);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if ((xs[i] ^ 1) == xs[i + 1]) return absorbing;
    }
    if (xs.empty()) return neutral;
    if (xs.size() == 1) return xs[0];
    std::string key(conj ? "&" : "|");
    for (Lit l : xs) key += std::to_string(l) + ",";
    auto it = gates_.find(key);
    if (it != gates_.end()) return it->second;
    // g <-> AND(xs), or for a disjunction the dual with negated literals.
    Lit g = pos_lit(solver_.add_var());
    Lit gg = conj ? g : g ^ 1;
    std::vector<Lit> back{gg};
    for (Lit l : xs) {
      Lit x = conj ? l : l ^ 1;
      solver_.add_clause({gg ^ 1, x});
      back.push_back(x ^ 1);
    }
    solver_.add_clause(back);
    gates_.emplace(key, g);
    return g;
  }
  Lit conj(std::vector<Lit> in) { return gate(true, std::move(in)); }
  Lit disj(std::vector<Lit> in) { return gate(false, std::move(in)); }

  struct Value {
    std::string key;
    std::vector<Lit> onehot;
  };

  Value constant_value(Element e, std::string key) {
    std::vector<Lit> v(n_, kFalse);
    v[e] = kTrue;
    return {std::move(key), std::move(v)};
  }

  // Literals "args take the values of tuple t".
  Lit tuple_lit(const std::vector<Value>& args, const Tuple& t) {
    std::vector<Lit> xs;
    for (std::size_t i = 0; i < args.size(); ++i) xs.push_back(args[i].onehot[t[i]]);
    return conj(std::move(xs));
  }

  Value term(const Term& t, const Assignment& a) {
    switch (t.kind) {
      case Term::Kind::kVariable: {
        auto it = a.find(t.name);
        if (it == a.end()) throw Error("unassigned variable " + t.name);
        return constant_value(it->second, "#" + std::to_string(it->second));
      }
      case Term::Kind::kNumber:
        return constant_value(base_.numeral(t.name), "#" + std::to_string(base_.numeral(t.name)));
      case Term::Kind::kFunction:
        break;
    }
    std::vector<Value> args;
    std::string key = t.name + "(";
    for (const auto& x : t.args) {
      args.push_back(term(x, a));
      key += args.back().key + ",";
    }
    key += ")";
    auto memo = terms_.find(key);
    if (memo != terms_.end()) return {key, memo->second};
    std::vector<std::vector<Lit>> by_value(n_);
    auto cell = cells_.find(t.name);
    for_each_tuple(n_, t.args.size(), [&](const Tuple& tup) {
      Lit at = tuple_lit(args, tup);
      if (at == kFalse) return;
      if (cell == cells_.end()) {
        by_value[base_.function(t.name).apply(tup)].push_back(at);
      } else {
        std::size_t idx = tuple_index(tup, n_);
        for (std::size_t v = 0; v < n_; ++v) {
          by_value[v].push_back(conj({at, pos_lit(cell->second.first + static_cast<int>(idx * n_ + v))}));
        }
      }
    });
    std::vector<Lit> onehot;
    for (auto& xs : by_value) onehot.push_back(disj(std::move(xs)));
    terms_.emplace(key, onehot);
    return {key, std::move(onehot)};
  }

  Lit atom(const std::string& pred, const std::vector<Term>& ts, const Assignment& a) {
    std::vector<Value> args;
    for (const auto& x : ts) args.push_back(term(x, a));
    auto cell = cells_.find(pred);
    const Relation* rel = cell == cells_.end() ? &base_.relation(pred) : nullptr;
    std::vector<Lit> options;
    for_each_tuple(n_, ts.size(), [&](const Tuple& tup) {
      Lit at = tuple_lit(args, tup);
      if (at == kFalse) return;
      if (rel) {
        if (rel->contains(tup)) options.push_back(at);
      } else {
        options.push_back(conj({at, pos_lit(cell->second.first + static_cast<int>(tuple_index(tup, n_)))}));
      }
    });
    return disj(std::move(options));
  }

  Lit formula(const Formula& f, Assignment& a) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::kTrue: return kTrue;
      case K::kFalse: return kFalse;
      case K::kAtom: return atom(f.predicate(), f.terms(), a);
      case K::kEqual: {
        Value l = term(f.terms()[0], a), r = term(f.terms()[1], a);
        std::vector<Lit> same;
        for (std::size_t v = 0; v < n_; ++v) same.push_back(conj({l.onehot[v], r.onehot[v]}));
        return disj(std::move(same));
      }
      case K::kNot: return formula(f.child(), a) ^ 1;
      case K::kAnd:
      case K::kOr: {
        std::vector<Lit> xs;
        for (const auto& c : f.children()) xs.push_back(formula(c, a));
        return f.kind() == K::kAnd ? conj(std::move(xs)) : disj(std::move(xs));
      }
      case K::kImplies: return disj({formula(f.child(0), a) ^ 1, formula(f.child(1), a)});
      case K::kIff: {
        Lit x = formula(f.child(0), a), y = formula(f.child(1), a);
        return conj({disj({x ^ 1, y}), disj({x, y ^ 1})});
      }
      case K::kForall:
      case K::kExists: {
        std::vector<Lit> xs;
        const auto& vars = f.bound_variables();
        Assignment saved = a;
        for_each_tuple(n_, vars.size(), [&](const Tuple& t) {
          for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = t[i];
          xs.push_back(formula(f.child(), a));
        });
        a = saved;
        return f.kind() == K::kForall ? conj(std::move(xs)) : disj(std::move(xs));
      }
      default:
        throw Error("model finder: second-order quantifier in " + render(f));
    }
  }

  Structure base_;
  std::vector<Symbol> unknown_;
  std::size_t n_ = 0;
  SatSolver solver_;
  std::map<std::string, Cells> cells_;
  std::unordered_map<std::string, Lit> gates_;
  std::unordered_map<std::string, std::vector<Lit>> terms_;
};

// Expansions of base by `unknown` satisfying f, projected to `keep` (all
// unknown symbols when empty).
inline std::vector<Structure> find_models(const Structure& base, const std::vector<Symbol>& unknown, const Formula& f,
                                          const std::vector<std::string>& keep = {}) {
  ModelFinder mf(base, unknown);
  mf.require(f);
  std::vector<Structure> out;
  mf.for_each_model([&](const Structure& s) { out.push_back(s); }, keep);
  return out;
}

}  // namespace lpx

#endif  // LPX_MODEL_FINDER_HPP_
