// Finite first-order structures: dense relation and function tables, formula
// evaluation (including brute-force second-order quantifiers), grounded atoms,
// JSON I/O, and exhaustive enumeration of expansions and assignments.

#ifndef LPX_STRUCTURE_HPP_
#define LPX_STRUCTURE_HPP_

#include <lpx/formula.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <variant>

namespace lpx {

using Element = std::uint32_t;
using Tuple = std::vector<Element>;
using ElementName = std::variant<std::int64_t, std::string>;

inline std::string to_string(const ElementName& n) {
  if (auto* i = std::get_if<std::int64_t>(&n)) return std::to_string(*i);
  return std::get<std::string>(n);
}

inline std::size_t checked_power(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base) throw Error("table size overflow");
    r *= base;
  }
  return r;
}

// Mixed-radix index of a tuple over a domain of size n.
inline std::size_t tuple_index(const Tuple& t, std::size_t n) {
  std::size_t i = 0;
  for (Element e : t) i = i * n + e;
  return i;
}

inline Tuple tuple_at(std::size_t index, std::size_t arity, std::size_t n) {
  Tuple t(arity);
  for (std::size_t i = arity; i-- > 0;) {
    t[i] = static_cast<Element>(index % n);
    index /= n;
  }
  return t;
}

class Relation {
 public:
  Relation() = default;
  Relation(std::size_t arity, std::size_t domain_size)
      : arity_(arity), n_(domain_size), bits_(checked_power(domain_size, arity), 0) {}

  std::size_t arity() const { return arity_; }
  std::size_t cells() const { return bits_.size(); }
  bool contains(const Tuple& t) const { return bits_[tuple_index(t, n_)] != 0; }
  bool at(std::size_t index) const { return bits_[index] != 0; }
  void set(const Tuple& t, bool v = true) { bits_[tuple_index(t, n_)] = v; }
  void set_at(std::size_t index, bool v) { bits_[index] = v; }
  std::size_t count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

  std::vector<Tuple> tuples() const {
    std::vector<Tuple> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i]) out.push_back(tuple_at(i, arity_, n_));
    }
    return out;
  }

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  std::size_t arity_ = 0;
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

class FunctionTable {
 public:
  FunctionTable() = default;
  FunctionTable(std::size_t arity, std::size_t domain_size, Element init = 0)
      : arity_(arity), n_(domain_size), values_(checked_power(domain_size, arity), init) {}

  std::size_t arity() const { return arity_; }
  std::size_t cells() const { return values_.size(); }
  Element apply(const Tuple& t) const { return values_[tuple_index(t, n_)]; }
  Element at(std::size_t index) const { return values_[index]; }
  void set(const Tuple& t, Element v) { values_[tuple_index(t, n_)] = v; }
  void set_at(std::size_t index, Element v) { values_[index] = v; }

  friend bool operator==(const FunctionTable&, const FunctionTable&) = default;

 private:
  std::size_t arity_ = 0;
  std::size_t n_ = 0;
  std::vector<Element> values_;
};

// ---------------------------------------------------------------------------
// Grounded atoms and clauses
// ---------------------------------------------------------------------------

struct GroundAtom {
  std::string predicate;
  Tuple args;

  friend bool operator==(const GroundAtom&, const GroundAtom&) = default;
  friend auto operator<=>(const GroundAtom&, const GroundAtom&) = default;
};

// Positive clauses and interpretations are atom sets.
using PositiveClause = std::set<GroundAtom>;
using Interpretation = std::set<GroundAtom>;

// ---------------------------------------------------------------------------
// Structures
// ---------------------------------------------------------------------------

class Structure {
 public:
  Structure() = default;

  explicit Structure(std::vector<ElementName> domain) : domain_(std::move(domain)) {
    if (domain_.empty()) throw Error("structure domain must be nonempty");
    for (std::size_t i = 0; i < domain_.size(); ++i) {
      if (!index_.emplace(domain_[i], static_cast<Element>(i)).second) {
        throw Error("duplicate domain element '" + lpx::to_string(domain_[i]) + "'");
      }
    }
  }

  // Domain {0, ..., n-1} named by integers.
  static Structure of_size(std::size_t n) {
    std::vector<ElementName> d;
    for (std::size_t i = 0; i < n; ++i) d.emplace_back(static_cast<std::int64_t>(i));
    return Structure(std::move(d));
  }

  std::size_t size() const { return domain_.size(); }
  const std::vector<ElementName>& domain() const { return domain_; }
  const ElementName& name(Element e) const { return domain_.at(e); }
  std::string element_text(Element e) const { return lpx::to_string(domain_.at(e)); }

  std::optional<Element> find_element(const ElementName& n) const {
    auto it = index_.find(n);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // The element a numeral denotes: integer-named first, then string-named.
  Element numeral(const std::string& text) const {
    if (text.size() < 19) {
      if (auto e = find_element(ElementName{static_cast<std::int64_t>(std::stoll(text))})) return *e;
    }
    if (auto e = find_element(ElementName{text})) return *e;
    throw Error("numeral " + text + " names no domain element");
  }

  const Vocabulary& vocabulary() const { return vocabulary_; }
  bool interprets(const std::string& name) const { return vocabulary_.contains(name); }

  Relation& add_predicate(const std::string& name, std::size_t arity) {
    vocabulary_.add(name, SymbolKind::kPredicate, arity);
    return predicates_.try_emplace(name, arity, size()).first->second;
  }

  FunctionTable& add_function(const std::string& name, std::size_t arity, Element init = 0) {
    vocabulary_.add(name, SymbolKind::kFunction, arity);
    return functions_.try_emplace(name, arity, size(), init).first->second;
  }

  void add_symbol(const Symbol& s) {
    if (s.kind == SymbolKind::kPredicate) {
      add_predicate(s.name, s.arity);
    } else {
      add_function(s.name, s.arity);
    }
  }

  const Relation& relation(const std::string& name) const {
    auto it = predicates_.find(name);
    if (it == predicates_.end()) throw Error("structure does not interpret predicate '" + name + "'");
    return it->second;
  }
  Relation& relation(const std::string& name) {
    return const_cast<Relation&>(static_cast<const Structure*>(this)->relation(name));
  }
  const FunctionTable& function(const std::string& name) const {
    auto it = functions_.find(name);
    if (it == functions_.end()) throw Error("structure does not interpret function '" + name + "'");
    return it->second;
  }
  FunctionTable& function(const std::string& name) {
    return const_cast<FunctionTable&>(static_cast<const Structure*>(this)->function(name));
  }
  const Relation* find_relation(const std::string& name) const {
    auto it = predicates_.find(name);
    return it == predicates_.end() ? nullptr : &it->second;
  }
  const FunctionTable* find_function(const std::string& name) const {
    auto it = functions_.find(name);
    return it == functions_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, Relation>& relations() const { return predicates_; }
  const std::map<std::string, FunctionTable>& functions() const { return functions_; }

  void set(const std::string& predicate, const Tuple& t, bool v = true) { relation(predicate).set(t, v); }
  bool holds(const std::string& predicate, const Tuple& t) const { return relation(predicate).contains(t); }

  // Keeps only the symbols accepted by `keep`.
  Structure restrict(const std::function<bool(const std::string&)>& keep) const {
    Structure out(domain_);
    for (const auto& [name, r] : predicates_) {
      if (keep(name)) {
        out.vocabulary_.add(name, SymbolKind::kPredicate, r.arity());
        out.predicates_.emplace(name, r);
      }
    }
    for (const auto& [name, f] : functions_) {
      if (keep(name)) {
        out.vocabulary_.add(name, SymbolKind::kFunction, f.arity());
        out.functions_.emplace(name, f);
      }
    }
    return out;
  }

  Structure restrict(const Vocabulary& v) const {
    return restrict([&](const std::string& n) { return v.contains(n); });
  }

  friend bool operator==(const Structure& a, const Structure& b) {
    return a.domain_ == b.domain_ && a.predicates_ == b.predicates_ && a.functions_ == b.functions_;
  }

 private:
  std::vector<ElementName> domain_;
  std::map<ElementName, Element> index_;
  Vocabulary vocabulary_;
  std::map<std::string, Relation> predicates_;
  std::map<std::string, FunctionTable> functions_;
};

inline std::string render(const GroundAtom& a, const Structure& s) {
  std::string out = a.predicate;
  if (a.args.empty()) return out;
  out += "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += s.element_text(a.args[i]);
  }
  return out + ")";
}

// Ins(s, preds): the true grounded atoms of the given predicates.
inline Interpretation ins(const Structure& s, const std::set<std::string>& preds) {
  Interpretation out;
  for (const auto& p : preds) {
    for (auto& t : s.relation(p).tuples()) out.insert(GroundAtom{p, std::move(t)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

using Assignment = std::map<std::string, Element>;

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 24;

// Evaluates formulas in a structure. Second-order variables are bound in an
// overlay that shadows the structure's own symbols.
class Evaluator {
 public:
  explicit Evaluator(const Structure& s, std::size_t cap = kDefaultEnumerationCap) : s_(s), cap_(cap) {}

  Element term(const Term& t, const Assignment& a) const {
    switch (t.kind) {
      case Term::Kind::kVariable: {
        auto it = a.find(t.name);
        if (it == a.end()) throw Error("unassigned variable " + t.name);
        return it->second;
      }
      case Term::Kind::kNumber:
        return s_.numeral(t.name);
      case Term::Kind::kFunction: {
        Tuple args;
        args.reserve(t.args.size());
        for (const auto& x : t.args) args.push_back(term(x, a));
        return function(t.name).apply(args);
      }
    }
    return 0;
  }

  bool atom(const Atom& at, const Assignment& a) const {
    if (at.is_equality()) return term(at.args[0], a) == term(at.args[1], a);
    return relation(at.predicate).contains(terms(at.args, a));
  }

  bool literal(const Literal& l, const Assignment& a) const { return atom(l.atom, a) != l.negated; }

  bool formula(const Formula& f, Assignment& a) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::kTrue: return true;
      case K::kFalse: return false;
      case K::kAtom: return relation(f.predicate()).contains(terms(f.terms(), a));
      case K::kEqual: return term(f.terms()[0], a) == term(f.terms()[1], a);
      case K::kNot: return !formula(f.child(), a);
      case K::kAnd:
        for (const auto& c : f.children()) {
          if (!formula(c, a)) return false;
        }
        return true;
      case K::kOr:
        for (const auto& c : f.children()) {
          if (formula(c, a)) return true;
        }
        return false;
      case K::kImplies: return !formula(f.child(0), a) || formula(f.child(1), a);
      case K::kIff: return formula(f.child(0), a) == formula(f.child(1), a);
      case K::kForall:
      case K::kExists: return quantify(f, a, 0, f.kind() == K::kForall);
      case K::kForallSO:
      case K::kExistsSO: return quantify_so(f, a, 0, f.kind() == K::kForallSO);
    }
    return false;
  }

 private:
  Tuple terms(const std::vector<Term>& ts, const Assignment& a) const {
    Tuple out;
    out.reserve(ts.size());
    for (const auto& t : ts) out.push_back(term(t, a));
    return out;
  }

  const Relation& relation(const std::string& name) const {
    auto it = so_relations_.find(name);
    if (it != so_relations_.end()) return it->second;
    if (auto* r = s_.find_relation(name)) return *r;
    throw Error("uninterpreted predicate '" + name + "'");
  }

  const FunctionTable& function(const std::string& name) const {
    auto it = so_functions_.find(name);
    if (it != so_functions_.end()) return it->second;
    if (auto* f = s_.find_function(name)) return *f;
    throw Error("uninterpreted function '" + name + "'");
  }

  bool quantify(const Formula& f, Assignment& a, std::size_t i, bool all) {
    if (i == f.bound_variables().size()) return formula(f.child(), a);
    const std::string& v = f.bound_variables()[i];
    auto saved = a.find(v) == a.end() ? std::nullopt : std::optional<Element>(a[v]);
    bool result = all;
    for (Element e = 0; e < s_.size(); ++e) {
      a[v] = e;
      if (quantify(f, a, i + 1, all) != all) {
        result = !all;
        break;
      }
    }
    if (saved) {
      a[v] = *saved;
    } else {
      a.erase(v);
    }
    return result;
  }

  bool quantify_so(const Formula& f, Assignment& a, std::size_t i, bool all) {
    if (i == f.so_variables().size()) return formula(f.child(), a);
    const SoVariable& v = f.so_variables()[i];
    std::size_t n = s_.size();
    std::size_t cells = checked_power(n, v.arity);
    std::size_t radix = v.kind == SymbolKind::kPredicate ? 2 : n;
    if (cells >= 64 || checked_power(radix, cells) > cap_) {
      throw Error("second-order quantifier over " + v.name + " exceeds the enumeration cap");
    }
    std::size_t total = checked_power(radix, cells);
    bool result = all;
    if (v.kind == SymbolKind::kPredicate) {
      auto saved = so_relations_.extract(v.name);
      for (std::size_t code = 0; code < total; ++code) {
        Relation r(v.arity, n);
        for (std::size_t c = 0; c < cells; ++c) r.set_at(c, (code >> c) & 1);
        so_relations_.insert_or_assign(v.name, std::move(r));
        if (quantify_so(f, a, i + 1, all) != all) {
          result = !all;
          break;
        }
      }
      so_relations_.erase(v.name);
      if (saved) so_relations_.insert(std::move(saved));
    } else {
      auto saved = so_functions_.extract(v.name);
      for (std::size_t code = 0; code < total; ++code) {
        FunctionTable t(v.arity, n);
        std::size_t rest = code;
        for (std::size_t c = 0; c < cells; ++c) {
          t.set_at(c, static_cast<Element>(rest % n));
          rest /= n;
        }
        so_functions_.insert_or_assign(v.name, std::move(t));
        if (quantify_so(f, a, i + 1, all) != all) {
          result = !all;
          break;
        }
      }
      so_functions_.erase(v.name);
      if (saved) so_functions_.insert(std::move(saved));
    }
    return result;
  }

  const Structure& s_;
  std::size_t cap_;
  std::map<std::string, Relation> so_relations_;
  std::map<std::string, FunctionTable> so_functions_;
};

inline bool eval(const Structure& s, const Assignment& a, const Formula& f) {
  Evaluator ev(s);
  Assignment copy = a;
  return ev.formula(f, copy);
}

inline bool eval(const Structure& s, const Assignment& a, const Literal& l) { return Evaluator(s).literal(l, a); }

// A sentence is true in s.
inline bool satisfies(const Structure& s, const Formula& f) { return eval(s, {}, f); }

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

// Calls fn(values) for every tuple in {0..n-1}^k, lexicographically. A
// callback returning false stops the walk; the result says whether it ran to
// completion.
template <typename Fn>
bool for_each_tuple(std::size_t n, std::size_t k, Fn&& fn) {
  Tuple t(k, 0);
  while (true) {
    if constexpr (std::is_same_v<std::invoke_result_t<Fn&, const Tuple&>, bool>) {
      if (!fn(static_cast<const Tuple&>(t))) return false;
    } else {
      fn(static_cast<const Tuple&>(t));
    }
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (++t[i] < n) break;
      t[i] = 0;
      if (i == 0) return true;
    }
    if (k == 0) return true;
  }
}

// All |A|^|vars| assignments, lexicographic in the order of `vars`.
inline std::vector<Assignment> assignments(const Structure& s, const std::vector<std::string>& vars) {
  std::vector<Assignment> out;
  for_each_tuple(s.size(), vars.size(), [&](const Tuple& t) {
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = t[i];
    out.push_back(std::move(a));
  });
  return out;
}

// Number of expansions, saturating at SIZE_MAX.
inline std::size_t expansion_count(std::size_t n, const std::vector<Symbol>& extra) {
  long double total = 1;
  for (const auto& s : extra) {
    long double cells = std::pow(static_cast<long double>(n), static_cast<long double>(s.arity));
    long double radix = s.kind == SymbolKind::kPredicate ? 2 : static_cast<long double>(n);
    total *= std::pow(radix, cells);
  }
  if (total >= static_cast<long double>(std::numeric_limits<std::size_t>::max())) {
    return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(std::llround(total));
}

// Visits every expansion of `base` by `extra` in a fixed order (the last
// cell of the last symbol varies fastest). fn may return false to stop.
template <typename Fn>
void for_each_expansion(const Structure& base, const std::vector<Symbol>& extra, Fn&& fn,
                        std::size_t cap = kDefaultEnumerationCap) {
  std::size_t count = expansion_count(base.size(), extra);
  if (count > cap) {
    throw Error("expansion count " + (count == std::numeric_limits<std::size_t>::max() ? std::string("overflow") : std::to_string(count)) +
                " exceeds the enumeration cap " + std::to_string(cap));
  }
  Structure e = base;
  struct Cell {
    std::string name;
    bool predicate;
    std::size_t index;
  };
  std::vector<Cell> cells;
  for (const auto& s : extra) {
    if (base.interprets(s.name)) throw Error("expansion symbol '" + s.name + "' already interpreted");
    e.add_symbol(s);
    std::size_t n = checked_power(base.size(), s.arity);
    for (std::size_t i = 0; i < n; ++i) cells.push_back({s.name, s.kind == SymbolKind::kPredicate, i});
  }
  std::size_t n = base.size();
  std::vector<std::size_t> digit(cells.size(), 0);
  while (true) {
    if constexpr (std::is_same_v<std::invoke_result_t<Fn&, const Structure&>, bool>) {
      if (!fn(static_cast<const Structure&>(e))) return;
    } else {
      fn(static_cast<const Structure&>(e));
    }
    std::size_t i = cells.size();
    while (true) {
      if (i == 0) return;
      --i;
      std::size_t radix = cells[i].predicate ? 2 : n;
      digit[i] = (digit[i] + 1) % radix;
      if (cells[i].predicate) {
        e.relation(cells[i].name).set_at(cells[i].index, digit[i] != 0);
      } else {
        e.function(cells[i].name).set_at(cells[i].index, static_cast<Element>(digit[i]));
      }
      if (digit[i] != 0) break;
    }
  }
}

inline std::vector<Structure> enumerate_expansions(const Structure& base, const std::vector<Symbol>& extra,
                                                   std::size_t cap = kDefaultEnumerationCap) {
  std::vector<Structure> out;
  for_each_expansion(base, extra, [&](const Structure& s) { out.push_back(s); }, cap);
  return out;
}

// ---------------------------------------------------------------------------
// JSON I/O
// ---------------------------------------------------------------------------

namespace detail {

inline ElementName element_name(const nlohmann::json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  throw Error("domain elements must be integers or strings, got " + j.dump());
}

inline nlohmann::json element_json(const ElementName& n) {
  if (auto* i = std::get_if<std::int64_t>(&n)) return *i;
  return std::get<std::string>(n);
}

inline Element lookup(const Structure& s, const nlohmann::json& j, const std::string& where) {
  auto e = s.find_element(element_name(j));
  if (!e) throw Error("element " + j.dump() + " in " + where + " is outside the domain");
  return *e;
}

}  // namespace detail

inline Structure structure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("domain")) throw Error("structure needs a 'domain' array");
  std::vector<ElementName> domain;
  for (const auto& x : j.at("domain")) domain.push_back(detail::element_name(x));
  Structure s(std::move(domain));
  std::map<std::string, std::size_t> arities;
  if (j.contains("arities")) {
    for (auto& [name, a] : j.at("arities").items()) arities[name] = a.get<std::size_t>();
  }
  if (j.contains("predicates")) {
    for (auto& [name, tuples] : j.at("predicates").items()) {
      std::size_t arity = !tuples.empty() ? tuples.front().size() : (arities.count(name) ? arities[name] : 0);
      if (arities.count(name) && arities[name] != arity) throw Error("tuple arity mismatch for '" + name + "'");
      Relation& r = s.add_predicate(name, arity);
      for (const auto& t : tuples) {
        if (!t.is_array() || t.size() != arity) throw Error("tuple arity mismatch for '" + name + "'");
        Tuple tup;
        for (const auto& x : t) tup.push_back(detail::lookup(s, x, name));
        r.set(tup);
      }
    }
  }
  if (j.contains("functions")) {
    for (auto& [name, rows] : j.at("functions").items()) {
      if (rows.empty() || !rows.front().is_array() || rows.front().empty()) throw Error("partial function '" + name + "'");
      std::size_t arity = rows.front().size() - 1;
      FunctionTable& f = s.add_function(name, arity);
      std::vector<std::uint8_t> seen(f.cells(), 0);
      for (const auto& row : rows) {
        if (!row.is_array() || row.size() != arity + 1) throw Error("tuple arity mismatch for '" + name + "'");
        Tuple args;
        for (std::size_t i = 0; i < arity; ++i) args.push_back(detail::lookup(s, row[i], name));
        Element v = detail::lookup(s, row[arity], name);
        std::size_t idx = tuple_index(args, s.size());
        if (seen[idx] && f.at(idx) != v) throw Error("function '" + name + "' maps one argument tuple to two values");
        seen[idx] = 1;
        f.set_at(idx, v);
      }
      if (std::count(seen.begin(), seen.end(), 0) != 0) throw Error("partial function '" + name + "'");
    }
  }
  return s;
}

inline nlohmann::json structure_to_json(const Structure& s) {
  nlohmann::json j;
  j["domain"] = nlohmann::json::array();
  for (const auto& n : s.domain()) j["domain"].push_back(detail::element_json(n));
  j["predicates"] = nlohmann::json::object();
  nlohmann::json arities = nlohmann::json::object();
  for (const auto& [name, r] : s.relations()) {
    nlohmann::json tuples = nlohmann::json::array();
    for (const auto& t : r.tuples()) {
      nlohmann::json row = nlohmann::json::array();
      for (Element e : t) row.push_back(detail::element_json(s.name(e)));
      tuples.push_back(std::move(row));
    }
    if (tuples.empty() && r.arity() != 0) arities[name] = r.arity();
    j["predicates"][name] = std::move(tuples);
  }
  j["functions"] = nlohmann::json::object();
  for (const auto& [name, f] : s.functions()) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < f.cells(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Element e : tuple_at(i, f.arity(), s.size())) row.push_back(detail::element_json(s.name(e)));
      row.push_back(detail::element_json(s.name(f.at(i))));
      rows.push_back(std::move(row));
    }
    j["functions"][name] = std::move(rows);
  }
  if (!arities.empty()) j["arities"] = std::move(arities);
  return j;
}

inline Structure load_structure(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("malformed structure JSON: ") + e.what());
  }
  return structure_from_json(j);
}

inline std::string save_structure(const Structure& s) { return structure_to_json(s).dump(2); }

}  // namespace lpx

#endif  // LPX_STRUCTURE_HPP_
