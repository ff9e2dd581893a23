// Shifting disjunctive heads into negated body literals, and the
// head-cycle-freeness test that makes it sound.

#ifndef LPX_TRANSFORMS_SHIFT_HPP_
#define LPX_TRANSFORMS_SHIFT_HPP_

#include <lpx/transforms/common.hpp>

namespace lpx {

// Edge P -> Q when Q occurs positively in the body of a rule with P in its
// head. Returns the set of predicates each predicate reaches in one or more
// steps.
inline std::map<std::string, std::set<std::string>> positive_reachability(const Program& p) {
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& r : p.rules()) {
    for (const auto& h : r.head) {
      auto& out = edges[h.predicate];
      for (const auto& l : r.body) {
        if (!l.negated && !l.atom.is_equality()) out.insert(l.atom.predicate);
      }
    }
  }
  std::map<std::string, std::set<std::string>> reach;
  for (const auto& [from, direct] : edges) {
    std::set<std::string>& seen = reach[from];
    std::vector<std::string> todo(direct.begin(), direct.end());
    while (!todo.empty()) {
      std::string q = todo.back();
      todo.pop_back();
      if (!seen.insert(q).second) continue;
      auto it = edges.find(q);
      if (it != edges.end()) todo.insert(todo.end(), it->second.begin(), it->second.end());
    }
  }
  return reach;
}

// False iff two atoms of one head have predicates on a common positive
// cycle. Predicate-level, so conservative for non-ground programs.
inline bool head_cycle_free(const Program& p) {
  auto reach = positive_reachability(p);
  auto reaches = [&](const std::string& a, const std::string& b) {
    auto it = reach.find(a);
    return it != reach.end() && it->second.count(b) != 0;
  };
  for (const auto& r : p.rules()) {
    for (std::size_t i = 0; i < r.head.size(); ++i) {
      for (std::size_t j = i + 1; j < r.head.size(); ++j) {
        const auto& a = r.head[i].predicate;
        const auto& b = r.head[j].predicate;
        if (a == b ? reaches(a, a) : reaches(a, b) && reaches(b, a)) return false;
      }
    }
  }
  return true;
}

namespace detail {

inline std::vector<Atom> distinct_atoms(const std::vector<Atom>& head) {
  std::vector<Atom> out;
  for (const auto& a : head) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

}  // namespace detail

// Each rule B -> a_1 v ... v a_n becomes n rules B, not a_j (j != i) -> a_i.
// When a_j and a_i share a predicate, an instance where they coincide must
// not block a_i, so `not a_j` is paired with an alternative rule that has the
// argument equalities instead.
inline TransformReport shift(const Program& p) {
  if (!head_cycle_free(p)) throw Error("shift: program is not head-cycle-free");
  std::vector<Rule> out;
  for (const auto& r : p.rules()) {
    auto head = detail::distinct_atoms(r.head);
    if (head.size() <= 1) {
      out.push_back(Rule{head, r.body});
      continue;
    }
    for (std::size_t i = 0; i < head.size(); ++i) {
      std::vector<std::vector<Literal>> bodies{r.body};
      for (std::size_t j = 0; j < head.size(); ++j) {
        if (j == i) continue;
        std::vector<std::vector<Literal>> options{{Literal::neg(head[j])}};
        if (head[j].predicate == head[i].predicate) {
          std::vector<Literal> same;
          for (std::size_t k = 0; k < head[i].args.size(); ++k) {
            if (head[i].args[k] != head[j].args[k]) same.push_back(build::eq(head[i].args[k], head[j].args[k]));
          }
          options.push_back(std::move(same));
        }
        std::vector<std::vector<Literal>> next;
        for (const auto& b : bodies) {
          for (const auto& o : options) {
            auto nb = b;
            nb.insert(nb.end(), o.begin(), o.end());
            next.push_back(std::move(nb));
          }
        }
        bodies = std::move(next);
      }
      for (auto& b : bodies) out.push_back(Rule{{head[i]}, std::move(b)});
    }
  }
  TransformReport rep;
  rep.kind = "shift";
  rep.program = Program(std::move(out));
  rep.rule_counts = {{"shift", rep.program.size()}};
  return rep;
}

}  // namespace lpx

#endif  // LPX_TRANSFORMS_SHIFT_HPP_
