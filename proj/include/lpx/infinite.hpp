// Bounded simulation of the clause-coding construction over the positive
// integers: the pairing e(m,n) = 2^m + 3^n, codes of atoms and clauses, the
// merge/extract/membership evaluators, and a stage-by-stage comparison of
// the progression of a program with its simulation on codes.

#ifndef LPX_INFINITE_HPP_
#define LPX_INFINITE_HPP_

#include <lpx/stable.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <mutex>

namespace lpx {

using Natural = boost::multiprecision::cpp_int;

// A positive integer produced by the pairing. Values with small exponents
// are stored exactly; 2^m + 3^n with a large or symbolic exponent is kept
// as the term e(m,n). Off the three colliding pairs the pairing is
// injective, so equal terms and equal values coincide.
class Code {
 public:
  Code() = default;
  Code(Natural v) : exact_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  Code(std::uint64_t v) : exact_(v) {}       // NOLINT(google-explicit-constructor)
  Code(int v) : exact_(v) {}                 // NOLINT(google-explicit-constructor)

  static Code symbolic(Code left, Code right);

  bool is_exact() const { return node_ == nullptr; }
  const Natural& exact() const { return exact_; }
  const Code& left() const;
  const Code& right() const;

  std::string str() const { return is_exact() ? exact_.str() : "e(" + left().str() + "," + right().str() + ")"; }

  friend bool operator==(const Code& a, const Code& b) { return (a <=> b) == 0; }
  friend std::strong_ordering operator<=>(const Code& a, const Code& b) {
    if (a.is_exact() != b.is_exact()) return a.is_exact() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.is_exact()) {
      if (a.exact_ == b.exact_) return std::strong_ordering::equal;
      return a.exact_ < b.exact_ ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.left() <=> b.left(); c != 0) return c;
    return a.right() <=> b.right();
  }

 private:
  struct Node;
  Natural exact_ = 0;
  std::shared_ptr<const Node> node_;
};

struct Code::Node {
  Code left, right;
};

inline Code Code::symbolic(Code left, Code right) {
  Code c;
  c.node_ = std::make_shared<const Node>(Node{std::move(left), std::move(right)});
  return c;
}

inline const Code& Code::left() const { return node_->left; }
inline const Code& Code::right() const { return node_->right; }

inline std::string to_string(const Code& c) { return c.str(); }

// Exponents up to this bound are evaluated exactly.
inline constexpr unsigned kExactExponentLimit = 1024;

// Whether v = 2^m + 3^n for some m, n >= 1.
inline bool in_pairing_range(const Natural& v) {
  Natural p2 = 2;
  while (p2 < v) {
    Natural rest = v - p2;
    while (rest % 3 == 0 && rest > 3) rest /= 3;
    if (rest == 3) return true;
    p2 *= 2;
  }
  return false;
}

// Left operands of the pairs on which 2^m + 3^n is not injective:
// e(1,2) = e(3,1), e(3,3) = e(5,1), e(4,5) = e(8,1).
inline bool collision_prone(const Natural& v) { return v == 1 || v == 3 || v == 4 || v == 5 || v == 8; }

// The first `count` positive integers usable as ending flags: outside the
// pairing's range and never the left operand of a colliding pair.
inline std::vector<Natural> safe_flags(std::size_t count) {
  std::vector<Natural> out;
  for (Natural v = 1; out.size() < count; ++v) {
    if (!in_pairing_range(v) && !collision_prone(v)) out.push_back(v);
  }
  return out;
}

class CodeRegistry {
 public:
  struct Entry {
    Code left, right;
  };

  // Flags for each predicate (in the given order) and for clauses.
  CodeRegistry(std::vector<std::pair<std::string, Code>> atom_flags, Code clause_flag)
      : atom_flags_(std::move(atom_flags)), clause_flag_(std::move(clause_flag)) {
    std::set<Code> seen;
    auto check = [&](const Code& f, const std::string& owner) {
      if (!f.is_exact() || f.exact() < 1) throw Error("registry: flag of " + owner + " must be a positive integer");
      if (in_pairing_range(f.exact())) throw Error("registry: flag " + f.str() + " of " + owner + " lies in the pairing's range");
      if (!seen.insert(f).second) throw Error("registry: flag " + f.str() + " is used twice");
    };
    for (const auto& [p, f] : atom_flags_) check(f, p);
    check(clause_flag_, "clauses");
  }

  // Flags from safe_flags: predicates in order of first occurrence, then
  // the clause flag.
  static CodeRegistry for_program(const Program& p) {
    auto preds = p.predicates_in_order();
    std::vector<Natural> flags = safe_flags(preds.size() + 1);
    std::vector<std::pair<std::string, Code>> af;
    for (std::size_t i = 0; i < preds.size(); ++i) af.emplace_back(preds[i], Code(flags[i]));
    return CodeRegistry(std::move(af), Code(flags.back()));
  }

  CodeRegistry(const CodeRegistry& o) : atom_flags_(o.atom_flags_), clause_flag_(o.clause_flag_), entries_(o.entries_) {}

  Code pair(const Code& m, const Code& n) {
    if (m == Code(0) || n == Code(0)) throw Error("pair: arguments must be positive, got " + m.str() + " and " + n.str());
    Code v;
    if (m.is_exact() && n.is_exact() && m.exact() <= kExactExponentLimit && n.exact() <= kExactExponentLimit) {
      Natural x = Natural(1) << static_cast<unsigned>(m.exact());
      x += boost::multiprecision::pow(Natural(3), static_cast<unsigned>(n.exact()));
      v = Code(std::move(x));
    } else {
      v = Code::symbolic(m, n);
    }
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = entries_.try_emplace(v, Entry{m, n});
    if (!inserted && (it->second.left != m || it->second.right != n)) {
      throw Error("pair: e(" + m.str() + "," + n.str() + ") collides with e(" + it->second.left.str() + "," +
                  it->second.right.str() + ")");
    }
    return v;
  }

  // enc(a1, ..., ak; c).
  Code chain(const std::vector<Code>& items, const Code& flag) {
    Code cur = flag;
    for (const auto& a : items) cur = pair(cur, a);
    return cur;
  }

  const Entry* find(const Code& code) const {
    auto it = entries_.find(code);
    return it == entries_.end() ? nullptr : &it->second;
  }

  // Follows left operands back to an unregistered value: (flag, items).
  std::pair<Code, std::vector<Code>> unchain(const Code& code) const {
    std::vector<Code> items;
    Code cur = code;
    while (const Entry* e = find(cur)) {
      items.push_back(e->right);
      cur = e->left;
    }
    std::reverse(items.begin(), items.end());
    return {cur, items};
  }

  const Code& flag(const std::string& predicate) const {
    for (const auto& [p, f] : atom_flags_) {
      if (p == predicate) return f;
    }
    throw Error("registry: predicate " + predicate + " has no reserved flag");
  }
  const Code& clause_flag() const { return clause_flag_; }
  const std::vector<std::pair<std::string, Code>>& atom_flags() const { return atom_flags_; }

  std::optional<std::string> flag_owner(const Code& v) const {
    for (const auto& [p, f] : atom_flags_) {
      if (f == v) return p;
    }
    return std::nullopt;
  }
  std::optional<std::size_t> predicate_index(const std::string& predicate) const {
    for (std::size_t i = 0; i < atom_flags_.size(); ++i) {
      if (atom_flags_[i].first == predicate) return i;
    }
    return std::nullopt;
  }

  const std::map<Code, Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<std::string, Code>> atom_flags_;
  Code clause_flag_;
  std::map<Code, Entry> entries_;
  std::mutex mu_;
};

// A ground atom over the positive integers.
struct NatAtom {
  std::string predicate;
  std::vector<Code> args;

  friend bool operator==(const NatAtom&, const NatAtom&) = default;
};

inline std::string render(const NatAtom& a) {
  std::string out = a.predicate;
  if (!a.args.empty()) {
    out += "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) out += (i ? "," : "") + a.args[i].str();
    out += ")";
  }
  return out;
}

inline Code code_atom(CodeRegistry& reg, const NatAtom& a) { return reg.chain(a.args, reg.flag(a.predicate)); }

// Atoms sorted by (predicate index, arguments) and deduplicated first.
inline Code code_clause(CodeRegistry& reg, std::vector<NatAtom> clause) {
  auto key = [&](const NatAtom& a) {
    auto i = reg.predicate_index(a.predicate);
    if (!i) throw Error("registry: predicate " + a.predicate + " has no reserved flag");
    return std::make_pair(*i, a.args);
  };
  std::sort(clause.begin(), clause.end(), [&](const NatAtom& a, const NatAtom& b) { return key(a) < key(b); });
  clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
  std::vector<Code> items;
  for (const auto& a : clause) items.push_back(code_atom(reg, a));
  return reg.chain(items, reg.clause_flag());
}

// mrg, ext, in, subc and equ on codes of tuples ending in the clause flag,
// computed by decoding through the registry.
class Encodings {
 public:
  explicit Encodings(CodeRegistry& reg) : reg_(reg) {}

  // The tuple a clause code encodes.
  std::vector<Code> items(const Code& code) const {
    auto [flag, items] = reg_.unchain(code);
    if (flag != reg_.clause_flag()) {
      if (items.empty()) throw Error("encodings: unregistered code " + code.str());
      throw Error("encodings: code " + code.str() + " does not end in the clause flag");
    }
    return items;
  }

  bool is_clause_code(const Code& code) const { return reg_.unchain(code).first == reg_.clause_flag(); }

  Code mrg(const Code& a, const Code& b) {
    auto xs = items(a);
    for (auto& y : items(b)) xs.push_back(std::move(y));
    return reg_.chain(xs, reg_.clause_flag());
  }

  Code ext(const Code& a, const Code& b) {
    auto xs = items(a);
    xs.erase(std::remove(xs.begin(), xs.end(), b), xs.end());
    return reg_.chain(xs, reg_.clause_flag());
  }

  bool in(const Code& element, const Code& code) const {
    auto xs = items(code);
    return std::find(xs.begin(), xs.end(), element) != xs.end();
  }

  bool subc(const Code& a, const Code& b) const {
    auto ys = items(b);
    for (const auto& x : items(a)) {
      if (std::find(ys.begin(), ys.end(), x) == ys.end()) return false;
    }
    return true;
  }

  bool equ(const Code& a, const Code& b) const { return subc(a, b) && subc(b, a); }

  // Elements of a clause code as a set: two codes are equ iff keys agree.
  std::set<Code> key(const Code& code) const {
    auto xs = items(code);
    return {xs.begin(), xs.end()};
  }

  std::optional<NatAtom> decode_atom(const Code& code) const {
    auto [flag, args] = reg_.unchain(code);
    auto owner = reg_.flag_owner(flag);
    if (!owner) return std::nullopt;
    return NatAtom{*owner, std::move(args)};
  }

  // Readable provenance of a registered code.
  std::string describe(const Code& code) const {
    auto [flag, xs] = reg_.unchain(code);
    if (auto owner = reg_.flag_owner(flag)) return render(NatAtom{*owner, xs});
    if (flag == reg_.clause_flag()) {
      std::string out = "clause[";
      for (std::size_t i = 0; i < xs.size(); ++i) {
        out += i ? " | " : "";
        auto a = decode_atom(xs[i]);
        out += a ? render(*a) : xs[i].str();
      }
      return out + "]";
    }
    if (const auto* e = reg_.find(code)) return "e(" + e->left.str() + "," + e->right.str() + ")";
    return code.str();
  }

 private:
  CodeRegistry& reg_;
};

// ---------------------------------------------------------------------------
// Stage-wise simulation
// ---------------------------------------------------------------------------

// A finitely supported interpretation over the naturals of every predicate
// the program mentions; absent predicates are empty.
struct NatBase {
  std::map<std::string, std::set<std::vector<std::uint64_t>>> facts;

  bool holds(const std::string& p, const std::vector<std::uint64_t>& args) const {
    auto it = facts.find(p);
    return it != facts.end() && it->second.count(args);
  }
};

inline std::uint64_t numeral_value(const Term& t) {
  try {
    return std::stoull(t.name);
  } catch (const std::exception&) {
    throw Error("claim1: numeral " + t.name + " is out of range");
  }
}

// A base from a program of ground facts.
inline NatBase base_from_facts(const Program& facts) {
  NatBase b;
  for (const auto& r : facts.rules()) {
    if (r.head.size() != 1 || !r.body.empty() || r.head[0].is_equality()) throw Error("base: only ground facts are allowed");
    std::vector<std::uint64_t> args;
    for (const auto& t : r.head[0].args) {
      if (!t.is_number()) throw Error("base: arguments must be numerals");
      args.push_back(numeral_value(t));
    }
    b.facts[r.head[0].predicate].insert(std::move(args));
  }
  return b;
}

// Throws unless every term is a variable or numeral and every variable is
// bound by a positive body atom or by an equality chain to such a variable
// or a numeral.
inline void check_range_restricted(const Program& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Rule& r = p.rules()[i];
    std::string where = "claim1: rule " + std::to_string(i + 1);
    auto check_terms = [&](const Atom& a) {
      for (const auto& t : a.args) {
        if (t.is_function()) throw Error(where + " uses symbol " + t.name + "; only numerals and variables are supported");
      }
    };
    std::set<std::string> bound;
    for (const auto& a : r.head) check_terms(a);
    for (const auto& l : r.body) {
      check_terms(l.atom);
      if (!l.negated && !l.atom.is_equality()) {
        for (const auto& t : l.atom.args) {
          if (t.is_variable()) bound.insert(t.name);
        }
      }
    }
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& l : r.body) {
        if (l.negated || !l.atom.is_equality()) continue;
        const Term& a = l.atom.args[0];
        const Term& b = l.atom.args[1];
        auto ok = [&](const Term& t) { return !t.is_variable() || bound.count(t.name); };
        if (ok(a) && b.is_variable() && bound.insert(b.name).second) grew = true;
        if (ok(b) && a.is_variable() && bound.insert(a.name).second) grew = true;
      }
    }
    for (const auto& v : rule_variables(r)) {
      if (!bound.count(v)) throw Error(where + ": variable " + v + " is not range-restricted");
    }
  }
}

// 1 when the numeral 0 occurs in p or base, so that all values are >= 1.
inline std::uint64_t domain_offset(const Program& p, const NatBase& base) {
  for (const auto& r : p.rules()) {
    auto zero = [](const Atom& a) {
      return std::any_of(a.args.begin(), a.args.end(), [](const Term& t) { return t.is_number() && numeral_value(t) == 0; });
    };
    if (std::any_of(r.head.begin(), r.head.end(), zero)) return 1;
    if (std::any_of(r.body.begin(), r.body.end(), [&](const Literal& l) { return zero(l.atom); })) return 1;
  }
  for (const auto& [_, ts] : base.facts) {
    for (const auto& t : ts) {
      if (std::find(t.begin(), t.end(), 0) != t.end()) return 1;
    }
  }
  return 0;
}

struct DeltaStages {
  std::vector<std::vector<Code>> stages;  // stages[0] is empty
  bool converged = false;                    // the last stage added no new equ class
};

namespace detail {

// One application of the code-level rules: the equ-closure rule and one
// progression-simulating rule per program rule.
class DeltaStepper {
 public:
  DeltaStepper(const Program& p, const NatBase& base, CodeRegistry& reg)
      : p_(p), base_(base), reg_(reg), enc_(reg), offset_(domain_offset(p, base)) {
    for (const auto& r : p.rules()) splits_.push_back(split_rule(r, p));
  }

  std::set<Code> step(const std::set<Code>& cur) {
    std::set<Code> next;
    // true(u), equ(u, v) -> true(v) over registered clause codes.
    std::map<std::set<Code>, std::vector<Code>> by_key;
    for (const auto& c : registered_clause_codes()) by_key[enc_.key(c)].push_back(c);
    for (const auto& u : cur) {
      for (const auto& v : by_key[enc_.key(u)]) {
        if (enc_.equ(u, v)) next.insert(v);
      }
    }
    for (const auto& s : splits_) fire(s, cur, next);
    return next;
  }

 private:
  using Binding = std::map<std::string, Code>;

  std::vector<Code> registered_clause_codes() const {
    std::vector<Code> out{reg_.clause_flag()};
    for (const auto& [code, _] : reg_.entries()) {
      if (enc_.is_clause_code(code)) out.push_back(code);
    }
    return out;
  }

  std::optional<Code> value(const Term& t, const Binding& b) const {
    if (t.is_number()) return Code(numeral_value(t) + offset_);
    auto it = b.find(t.name);
    if (it == b.end()) return std::nullopt;
    return it->second;
  }

  bool unify(const Atom& a, const std::vector<Code>& vals, Binding& b) const {
    if (a.args.size() != vals.size()) return false;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (auto v = value(a.args[i], b)) {
        if (*v != vals[i]) return false;
      } else {
        b[a.args[i].name] = vals[i];
      }
    }
    return true;
  }

  void fire(const RuleSplit& s, const std::set<Code>& cur, std::set<Code>& next) {
    std::vector<Code> xs(s.positive.size()), zs(s.positive.size());
    auto choose = [&](auto& self, std::size_t i, const Binding& b) -> void {
      if (i == s.positive.size()) {
        std::vector<bool> done(s.residue.size(), false);
        Binding nb = b;
        solve_residue(s, done, nb, xs, zs, next);
        return;
      }
      const Atom& theta = s.positive[i];
      const Code& flag = reg_.flag(theta.predicate);
      for (const auto& x : cur) {
        std::set<Code> tried;
        for (const auto& z : enc_.items(x)) {
          if (!tried.insert(z).second) continue;
          auto [f, args] = reg_.unchain(z);
          if (f != flag) continue;
          Binding nb = b;
          if (!unify(theta, args, nb)) continue;
          xs[i] = x;
          zs[i] = z;
          self(self, i + 1, nb);
        }
      }
    };
    choose(choose, 0, {});
  }

  bool ready(const Literal& l, const Binding& b) const {
    for (const auto& t : l.atom.args) {
      if (!value(t, b)) return false;
    }
    return true;
  }

  // Extensional atoms bind by enumerating base facts; equalities bind or
  // test; negated literals test. Ready conjuncts are tested first.
  void solve_residue(const RuleSplit& s, std::vector<bool>& done, Binding& b, const std::vector<Code>& xs,
                     const std::vector<Code>& zs, std::set<Code>& next) {
    std::size_t pick = s.residue.size();
    for (std::size_t i = 0; i < s.residue.size(); ++i) {
      if (!done[i] && ready(s.residue[i], b)) {
        pick = i;
        break;
      }
    }
    if (pick < s.residue.size()) {
      done[pick] = true;
      if (test(s.residue[pick], b)) solve_residue(s, done, b, xs, zs, next);
      done[pick] = false;
      return;
    }
    // Then a binding conjunct.
    for (std::size_t i = 0; i < s.residue.size(); ++i) {
      const Literal& l = s.residue[i];
      if (done[i] || l.negated) continue;
      done[i] = true;
      if (l.atom.is_equality()) {
        const Term& a = l.atom.args[0];
        const Term& c = l.atom.args[1];
        auto va = value(a, b), vc = value(c, b);
        if (va || vc) {
          Binding nb = b;
          nb[(va ? c : a).name] = va ? *va : *vc;
          solve_residue(s, done, nb, xs, zs, next);
          done[i] = false;
          return;
        }
      } else {
        auto it = base_.facts.find(l.atom.predicate);
        if (it != base_.facts.end()) {
          for (const auto& t : it->second) {
            std::vector<Code> vals;
            for (auto v : t) vals.push_back(Code(v + offset_));
            Binding nb = b;
            if (unify(l.atom, vals, nb)) solve_residue(s, done, nb, xs, zs, next);
          }
        }
        done[i] = false;
        return;
      }
      done[i] = false;
    }
    if (std::all_of(done.begin(), done.end(), [](bool d) { return d; })) {
      emit(s, b, xs, zs, next);
      return;
    }
    throw Error("claim1: a rule's residue cannot be evaluated; the program is not range-restricted");
  }

  bool test(const Literal& l, const Binding& b) const {
    bool truth;
    if (l.atom.is_equality()) {
      truth = *value(l.atom.args[0], b) == *value(l.atom.args[1], b);
    } else {
      std::vector<std::uint64_t> t;
      for (const auto& a : l.atom.args) {
        Code v = *value(a, b);
        if (!v.is_exact()) return l.negated;
        t.push_back(static_cast<std::uint64_t>(v.exact() - offset_));
      }
      truth = base_.holds(l.atom.predicate, t);
    }
    return truth != l.negated;
  }

  void emit(const RuleSplit& s, const Binding& b, const std::vector<Code>& xs, const std::vector<Code>& zs,
            std::set<Code>& next) {
    std::vector<Code> heads;
    for (const auto& h : s.source.head) {
      std::vector<Code> args;
      for (const auto& t : h.args) args.push_back(*value(t, b));
      heads.push_back(reg_.chain(args, reg_.flag(h.predicate)));
    }
    Code head = reg_.chain(heads, reg_.clause_flag());
    if (xs.empty()) {
      next.insert(head);
      return;
    }
    Code w = enc_.ext(xs[0], zs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) w = enc_.mrg(w, enc_.ext(xs[i], zs[i]));
    next.insert(enc_.mrg(w, head));
  }

  const Program& p_;
  const NatBase& base_;
  CodeRegistry& reg_;
  Encodings enc_;
  std::uint64_t offset_;
  std::vector<RuleSplit> splits_;
};

}  // namespace detail

// Delta^0 .. Delta^n: codes c with true(c) derived within m stages.
inline DeltaStages delta_n(const Program& p, const NatBase& base, std::size_t n, CodeRegistry& reg) {
  check_range_restricted(p);
  detail::DeltaStepper stepper(p, base, reg);
  Encodings enc(reg);
  DeltaStages out;
  std::set<Code> cur;
  out.stages.push_back({});
  auto classes = [&](const std::set<Code>& s) {
    std::set<std::set<Code>> k;
    for (const auto& c : s) k.insert(enc.key(c));
    return k;
  };
  for (std::size_t m = 1; m <= n; ++m) {
    std::set<Code> next = stepper.step(cur);
    out.converged = classes(next) == classes(cur);
    cur = std::move(next);
    out.stages.emplace_back(cur.begin(), cur.end());
  }
  if (n == 0) out.converged = true;
  return out;
}

// ---------------------------------------------------------------------------
// Clause side and comparison
// ---------------------------------------------------------------------------

namespace detail {

// A ground rule whose body keeps repeated atoms: each occurrence picks its
// own clause in a progression step.
struct MultiGroundRule {
  std::vector<GroundAtom> body;
  PositiveClause head;

  friend auto operator<=>(const MultiGroundRule&, const MultiGroundRule&) = default;
};

inline std::set<MultiGroundRule> ground_with_multiplicity(const Program& p, const Structure& s) {
  require_interpretation(p, s);
  const auto& tau = p.intensional();
  std::set<MultiGroundRule> out;
  for (const auto& r : p.rules()) {
    RuleGrounder g(r, s, [&](const Literal& l) { return is_positive_intensional(l, tau); });
    g.for_each([&](const std::vector<Element>& slots) {
      MultiGroundRule mr;
      for (const auto& b : g.symbolic()) mr.body.push_back({b.predicate, b.tuple(slots)});
      for (const auto& h : g.heads()) mr.head.insert({h.predicate, h.tuple(slots)});
      out.insert(std::move(mr));
    });
  }
  return out;
}

inline ClauseSet gamma_multiset_step(const std::set<MultiGroundRule>& g, const ClauseSet& sigma) {
  ClauseSet out;
  for (const auto& r : g) {
    std::vector<const PositiveClause*> pick(r.body.size());
    auto rec = [&](auto& self, std::size_t i) -> void {
      if (i == r.body.size()) {
        PositiveClause c = r.head;
        for (std::size_t j = 0; j < r.body.size(); ++j) {
          for (const auto& a : *pick[j]) {
            if (!(a == r.body[j])) c.insert(a);
          }
        }
        out.insert(std::move(c));
        return;
      }
      for (const auto& d : sigma) {
        if (d.count(r.body[i])) {
          pick[i] = &d;
          self(self, i + 1);
        }
      }
    };
    rec(rec, 0);
  }
  return out;
}

}  // namespace detail

struct GammaStages {
  std::vector<ClauseSet> stages;
  Structure structure;  // the active-domain structure the stages are over
  bool converged = false;
};

// Gamma stages over the finite structure spanned by the numerals of p and
// the values of base; range restriction makes this the relevant part of
// the infinite structure. Ground bodies keep repeated atoms, so stages can
// hold clauses that the set-based step only derives in subsumed form.
inline GammaStages gamma_n(const Program& p, const NatBase& base, std::size_t n) {
  check_range_restricted(p);
  std::set<std::uint64_t> values;
  for (const auto& r : p.rules()) {
    auto note = [&](const Atom& a) {
      for (const auto& t : a.args) {
        if (t.is_number()) values.insert(numeral_value(t));
      }
    };
    for (const auto& h : r.head) note(h);
    for (const auto& l : r.body) note(l.atom);
  }
  for (const auto& [_, ts] : base.facts) {
    for (const auto& t : ts) values.insert(t.begin(), t.end());
  }
  if (values.empty()) values.insert(1);
  std::vector<ElementName> names;
  for (auto v : values) names.emplace_back(static_cast<std::int64_t>(v));
  GammaStages out;
  out.structure = Structure(names);
  for (const auto& [name, info] : p.vocabulary()) {
    Relation& rel = out.structure.add_predicate(name, info.arity);
    auto it = base.facts.find(name);
    if (it == base.facts.end()) continue;
    for (const auto& t : it->second) {
      if (t.size() != info.arity) throw Error("claim1: base fact of " + name + " has the wrong arity");
      Tuple tt;
      for (auto v : t) tt.push_back(*out.structure.find_element(ElementName{static_cast<std::int64_t>(v)}));
      rel.set(tt);
    }
  }
  auto g = detail::ground_with_multiplicity(p, out.structure);
  out.stages.push_back({});
  for (std::size_t m = 1; m <= n; ++m) {
    ClauseSet next = out.stages.back();
    for (auto& c : detail::gamma_multiset_step(g, out.stages.back())) next.insert(std::move(c));
    out.converged = next == out.stages.back();
    out.stages.push_back(std::move(next));
  }
  if (n == 0) out.converged = true;
  return out;
}

struct StageComparison {
  std::size_t stage = 0;
  std::size_t gamma_clauses = 0;
  std::size_t delta_codes = 0;
  std::size_t delta_classes = 0;
  std::vector<std::string> missing_from_delta;  // clauses whose code class is not derived
  std::vector<std::string> extra_in_delta;      // derived codes no clause accounts for
};

struct SimulationReport {
  bool pass = true;
  std::uint64_t offset = 0;
  bool gamma_converged = false;
  bool delta_converged = false;
  std::vector<StageComparison> stages;
};

// Compares the codes of Gamma^m with Delta^m modulo equ for m = 0..n.
inline SimulationReport claim1_check(const Program& p, const NatBase& base, std::size_t n, CodeRegistry& reg) {
  SimulationReport rep;
  rep.offset = domain_offset(p, base);
  GammaStages gamma = gamma_n(p, base, n);
  DeltaStages delta = delta_n(p, base, n, reg);
  rep.gamma_converged = gamma.converged;
  rep.delta_converged = delta.converged;
  Encodings enc(reg);
  auto to_nat = [&](const GroundAtom& a) {
    NatAtom out{a.predicate, {}};
    for (Element e : a.args) out.args.push_back(Code(Natural(std::get<std::int64_t>(gamma.structure.name(e))) + rep.offset));
    return out;
  };
  auto clause_text = [&](const PositiveClause& c) {
    std::string s;
    for (const auto& a : c) {
      NatAtom na = to_nat(a);
      for (auto& v : na.args) v = Code(v.exact() - rep.offset);
      s += (s.empty() ? "" : " | ") + render(na);
    }
    return s.empty() ? std::string("#false") : s;
  };
  for (std::size_t m = 0; m <= n; ++m) {
    StageComparison st;
    st.stage = m;
    st.gamma_clauses = gamma.stages[m].size();
    st.delta_codes = delta.stages[m].size();
    std::map<std::set<Code>, std::string> gamma_keys;
    for (const auto& c : gamma.stages[m]) {
      std::vector<NatAtom> atoms;
      for (const auto& a : c) atoms.push_back(to_nat(a));
      gamma_keys.emplace(enc.key(code_clause(reg, atoms)), clause_text(c));
    }
    std::map<std::set<Code>, Code> delta_keys;
    for (const auto& d : delta.stages[m]) delta_keys.emplace(enc.key(d), d);
    st.delta_classes = delta_keys.size();
    for (const auto& [k, text] : gamma_keys) {
      if (!delta_keys.count(k)) st.missing_from_delta.push_back(text);
    }
    for (const auto& [k, code] : delta_keys) {
      if (!gamma_keys.count(k)) st.extra_in_delta.push_back(enc.describe(code));
    }
    if (!st.missing_from_delta.empty() || !st.extra_in_delta.empty()) rep.pass = false;
    rep.stages.push_back(std::move(st));
  }
  return rep;
}

}  // namespace lpx

#endif  // LPX_INFINITE_HPP_
