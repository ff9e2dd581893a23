// Shared plumbing for program transforms: the report type, fresh-symbol
// bookkeeping and small rule-building helpers.

#ifndef LPX_TRANSFORMS_COMMON_HPP_
#define LPX_TRANSFORMS_COMMON_HPP_

#include <lpx/formula.hpp>

#include <json.hpp>

namespace lpx {

struct FreshSymbol {
  std::string name;
  SymbolKind kind = SymbolKind::kPredicate;
  std::size_t arity = 0;
  std::string role;
};

struct TransformReport {
  std::string kind;
  Program program;
  std::vector<FreshSymbol> manifest;
  std::vector<std::pair<std::string, std::size_t>> rule_counts;  // per construction step

  const FreshSymbol* fresh(const std::string& name) const {
    for (const auto& s : manifest) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }

  std::vector<Symbol> fresh_symbols() const {
    std::vector<Symbol> out;
    for (const auto& s : manifest) out.push_back({s.name, s.kind, s.arity});
    return out;
  }

  std::size_t count(const std::string& step) const {
    for (const auto& [name, n] : rule_counts) {
      if (name == step) return n;
    }
    return 0;
  }
};

inline nlohmann::ordered_json manifest_json(const TransformReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["kind"] = r.kind;
  j["symbols"] = nlohmann::ordered_json::array();
  for (const auto& s : r.manifest) {
    j["symbols"].push_back({{"name", s.name}, {"arity", s.arity}, {"kind", to_string(s.kind)}, {"role", s.role}});
  }
  j["rule_counts"] = nlohmann::ordered_json::object();
  for (const auto& [step, n] : r.rule_counts) j["rule_counts"][step] = n;
  return j;
}

// Hands out names that avoid a reserved vocabulary and each other. A numeric
// suffix is added only when the preferred name is taken.
class FreshNames {
 public:
  FreshNames() = default;
  explicit FreshNames(const Vocabulary& taken) {
    for (const auto& [name, info] : taken) taken_.insert(name);
  }

  void reserve(const std::string& name) { taken_.insert(name); }
  void reserve(const Vocabulary& v) {
    for (const auto& [name, info] : v) taken_.insert(name);
  }

  std::string take(const std::string& preferred) {
    std::string name = preferred;
    for (int i = 1; taken_.count(name); ++i) name = preferred + "_" + std::to_string(i);
    taken_.insert(name);
    return name;
  }

 private:
  std::set<std::string> taken_;
};

// Records fresh symbols in order of creation.
class Manifest {
 public:
  explicit Manifest(const Vocabulary& taken) : names_(taken) {}

  FreshNames& names() { return names_; }

  std::string predicate(const std::string& preferred, std::size_t arity, std::string role) {
    return add(preferred, SymbolKind::kPredicate, arity, std::move(role));
  }
  std::string function(const std::string& preferred, std::size_t arity, std::string role) {
    return add(preferred, SymbolKind::kFunction, arity, std::move(role));
  }

  std::vector<FreshSymbol> take() { return std::move(symbols_); }
  const std::vector<FreshSymbol>& symbols() const { return symbols_; }

 private:
  std::string add(const std::string& preferred, SymbolKind kind, std::size_t arity, std::string role) {
    std::string name = names_.take(preferred);
    symbols_.push_back({name, kind, arity, std::move(role)});
    return name;
  }

  FreshNames names_;
  std::vector<FreshSymbol> symbols_;
};

// Variable names unused by a rule.
class FreshVariables {
 public:
  FreshVariables() = default;
  explicit FreshVariables(const std::vector<std::string>& used) : used_(used.begin(), used.end()) {}

  Term operator()(const std::string& preferred) {
    std::string name = preferred;
    for (int i = 1; used_.count(name); ++i) name = preferred + "_" + std::to_string(i);
    used_.insert(name);
    return Term::variable(name);
  }

 private:
  std::set<std::string> used_;
};

namespace build {

inline Term var(const std::string& n) { return Term::variable(n); }
inline Term cst(const std::string& n) { return Term::constant(n); }
inline Atom atom(const std::string& p, std::vector<Term> args = {}) { return Atom::pred(p, std::move(args)); }
inline Literal pos(const std::string& p, std::vector<Term> args = {}) { return Literal::pos(atom(p, std::move(args))); }
inline Literal neg(const std::string& p, std::vector<Term> args = {}) { return Literal::neg(atom(p, std::move(args))); }
inline Literal eq(Term a, Term b) { return Literal::pos(Atom::equality(std::move(a), std::move(b))); }
inline Literal neq(Term a, Term b) { return Literal::neg(Atom::equality(std::move(a), std::move(b))); }
inline Rule rule(std::vector<Atom> head, std::vector<Literal> body) { return Rule{std::move(head), std::move(body)}; }
inline Rule fact(Atom head) { return Rule{{std::move(head)}, {}}; }
inline Rule constraint(std::vector<Literal> body) { return Rule{{}, std::move(body)}; }

}  // namespace build

// Adds `flag` as a body conjunct of every rule.
inline Program guard(const Program& p, const std::string& flag) {
  std::vector<Rule> out;
  for (Rule r : p.rules()) {
    r.body.insert(r.body.begin(), build::pos(flag));
    out.push_back(std::move(r));
  }
  return Program(std::move(out));
}

}  // namespace lpx

#endif  // LPX_TRANSFORMS_COMMON_HPP_
