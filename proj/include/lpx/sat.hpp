// A small CDCL solver: two watched literals, first-UIP learning, activity
// ordering and Luby restarts. Models are enumerated with blocking clauses
// that hang off a per-call selector variable, so the solver can be queried
// again afterwards.

#ifndef LPX_SAT_HPP_
#define LPX_SAT_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <vector>

namespace lpx {

// Literal encoding: 2*var for var, 2*var+1 for its negation.
using Lit = int;
inline Lit pos_lit(int v) { return 2 * v; }
inline Lit neg_lit(int v) { return 2 * v + 1; }
inline int lit_var(Lit l) { return l >> 1; }

class SatSolver {
 public:
  explicit SatSolver(int vars = 0) { resize(vars); }

  int add_var() {
    resize(var_count() + 1);
    return var_count() - 1;
  }
  int var_count() const { return static_cast<int>(assign_.size()); }

  void add_clause(std::vector<Lit> c) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      if ((c[i] ^ 1) == c[i + 1]) return;  // tautology
    }
    for (Lit l : c) {
      if (lit_var(l) >= var_count()) resize(lit_var(l) + 1);
    }
    if (c.empty()) {
      unsat_ = true;
    } else if (c.size() == 1) {
      units_.push_back(c[0]);
    } else {
      attach(std::move(c));
    }
  }

  // Calls fn(values) for every model; values[v] is 0 or 1. fn may return
  // false to stop. Returns false if stopped early.
  template <typename Fn>
  bool enumerate(Fn&& fn) {
    std::vector<int> all(var_count());
    for (int v = 0; v < var_count(); ++v) all[v] = v;
    return enumerate_projected(std::forward<Fn>(fn), all);
  }

  // Calls fn(values) once per assignment of `projection` that extends to a
  // model; values is one such model. fn may return false to stop.
  template <typename Fn>
  bool enumerate_projected(Fn&& fn, const std::vector<int>& projection) {
    int selector = add_var();
    bool go_on = true;
    while (go_on) {
      auto m = solve({pos_lit(selector)});
      if (!m) break;
      if constexpr (std::is_same_v<std::invoke_result_t<Fn&, const std::vector<std::int8_t>&>, bool>) {
        go_on = fn(static_cast<const std::vector<std::int8_t>&>(*m));
      } else {
        fn(static_cast<const std::vector<std::int8_t>&>(*m));
      }
      if (projection.empty()) break;
      std::vector<Lit> block{neg_lit(selector)};
      for (int v : projection) block.push_back((*m)[v] == 1 ? neg_lit(v) : pos_lit(v));
      add_clause(std::move(block));
    }
    add_clause({neg_lit(selector)});
    return go_on;
  }

  // One model under the given assumptions, if any.
  std::optional<std::vector<std::int8_t>> solve(const std::vector<Lit>& assumptions = {}) {
    // Start from scratch so clauses added since the last call get watched
    // correctly.
    cancel_until(0);
    while (!trail_.empty()) {
      assign_[lit_var(trail_.back())] = -1;
      trail_.pop_back();
    }
    head_ = 0;
    if (unsat_) return std::nullopt;
    for (Lit u : units_) {
      if (value(u) == 0) {
        unsat_ = true;
        return std::nullopt;
      }
      if (value(u) < 0) enqueue(u, -1);
    }
    if (propagate() >= 0) {
      unsat_ = true;
      return std::nullopt;
    }
    restarts_ = 0;
    std::size_t conflicts = 0, budget = restart_unit_ * luby(0);
    while (true) {
      int confl = propagate();
      if (confl >= 0) {
        ++conflicts;
        if (level() == 0) {
          unsat_ = true;
          return std::nullopt;
        }
        auto [learnt, back] = analyze(confl);
        cancel_until(back);
        if (learnt.size() == 1) {
          units_.push_back(learnt[0]);
          enqueue(learnt[0], -1);
        } else {
          Lit first = learnt[0];
          int ci = attach(std::move(learnt));
          enqueue(first, ci);
        }
        var_inc_ /= 0.95;
        continue;
      }
      if (conflicts >= budget) {
        conflicts = 0;
        budget = restart_unit_ * luby(++restarts_);
        cancel_until(0);
        continue;
      }
      Lit next = -1;
      while (level() < static_cast<int>(assumptions.size())) {
        Lit a = assumptions[level()];
        if (value(a) == 1) {
          trail_lim_.push_back(trail_.size());
        } else if (value(a) == 0) {
          cancel_until(0);
          return std::nullopt;
        } else {
          next = a;
          break;
        }
      }
      if (next < 0) {
        int v = pick_branch();
        if (v < 0) {
          std::vector<std::int8_t> model = assign_;
          cancel_until(0);
          return model;
        }
        next = phase_[v] ? pos_lit(v) : neg_lit(v);
      }
      trail_lim_.push_back(trail_.size());
      enqueue(next, -1);
    }
  }

 private:
  static constexpr std::size_t restart_unit_ = 64;

  static std::size_t luby(std::size_t i) {
    std::size_t size = 1, seq = 0;
    while (size < i + 1) {
      ++seq;
      size = 2 * size + 1;
    }
    while (size - 1 != i) {
      size = (size - 1) >> 1;
      --seq;
      i %= size;
    }
    return std::size_t{1} << seq;
  }

  void resize(int n) {
    int old = var_count();
    assign_.resize(n, -1);
    level_.resize(n, 0);
    reason_.resize(n, -1);
    phase_.resize(n, 0);
    seen_.resize(n, 0);
    activity_.resize(n, 0.0);
    heap_index_.resize(n, -1);
    watches_.resize(2 * static_cast<std::size_t>(n));
    for (int v = old; v < n; ++v) heap_insert(v);
  }

  int attach(std::vector<Lit> c) {
    int ci = static_cast<int>(clauses_.size());
    watches_[c[0]].push_back(ci);
    watches_[c[1]].push_back(ci);
    clauses_.push_back(std::move(c));
    return ci;
  }

  int level() const { return static_cast<int>(trail_lim_.size()); }

  // -1 unassigned, 0 false, 1 true.
  int value(Lit l) const {
    int a = assign_[lit_var(l)];
    if (a < 0) return -1;
    return (l & 1) ? 1 - a : a;
  }

  void enqueue(Lit l, int reason) {
    int v = lit_var(l);
    assign_[v] = (l & 1) ? 0 : 1;
    level_[v] = level();
    reason_[v] = reason;
    trail_.push_back(l);
  }

  void cancel_until(int lvl) {
    if (level() <= lvl) return;
    std::size_t mark = trail_lim_[lvl];
    while (trail_.size() > mark) {
      int v = lit_var(trail_.back());
      phase_[v] = assign_[v];
      assign_[v] = -1;
      reason_[v] = -1;
      if (heap_index_[v] < 0) heap_insert(v);
      trail_.pop_back();
    }
    trail_lim_.resize(lvl);
    head_ = std::min(head_, trail_.size());
  }

  // Index of a conflicting clause, or -1.
  int propagate() {
    while (head_ < trail_.size()) {
      Lit falsified = trail_[head_++] ^ 1;
      auto& ws = watches_[falsified];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        int ci = ws[i++];
        auto& c = clauses_[ci];
        if (c[0] == falsified) std::swap(c[0], c[1]);
        if (value(c[0]) == 1) {
          ws[j++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (value(c[k]) != 0) {
            std::swap(c[1], c[k]);
            watches_[c[1]].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = ci;
        if (value(c[0]) == 0) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          head_ = trail_.size();
          return ci;
        }
        enqueue(c[0], ci);
      }
      ws.resize(j);
    }
    return -1;
  }

  // First-UIP clause (asserting literal first, then a literal of the
  // backjump level) and the level to return to.
  std::pair<std::vector<Lit>, int> analyze(int confl) {
    std::vector<Lit> learnt{-1};
    int open = 0;
    Lit p = -1;
    std::size_t index = trail_.size();
    do {
      for (Lit q : clauses_[confl]) {
        if (p >= 0 && q == p) continue;
        int v = lit_var(q);
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        bump(v);
        if (level_[v] == level()) {
          ++open;
        } else {
          learnt.push_back(q);
        }
      }
      while (!seen_[lit_var(trail_[--index])]) {
      }
      p = trail_[index];
      confl = reason_[lit_var(p)];
      seen_[lit_var(p)] = 0;
      --open;
    } while (open > 0);
    learnt[0] = p ^ 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) seen_[lit_var(learnt[i])] = 0;
    int back = 0;
    if (learnt.size() > 1) {
      std::size_t best = 1;
      for (std::size_t i = 2; i < learnt.size(); ++i) {
        if (level_[lit_var(learnt[i])] > level_[lit_var(learnt[best])]) best = i;
      }
      std::swap(learnt[1], learnt[best]);
      back = level_[lit_var(learnt[1])];
    }
    return {std::move(learnt), back};
  }

  void bump(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_index_[v] >= 0) sift_up(heap_index_[v]);
  }

  int pick_branch() {
    while (!heap_.empty()) {
      int v = heap_pop();
      if (assign_[v] < 0) return v;
    }
    return -1;
  }

  // Max-heap on activity, ties broken by the lower variable index.
  bool before(int a, int b) const { return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b); }

  void heap_insert(int v) {
    heap_index_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    sift_up(heap_index_[v]);
  }

  int heap_pop() {
    int top = heap_[0];
    heap_index_[top] = -1;
    int last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_index_[last] = 0;
      sift_down(0);
    }
    return top;
  }

  void sift_up(int i) {
    int v = heap_[i];
    while (i > 0) {
      int parent = (i - 1) / 2;
      if (!before(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      heap_index_[heap_[i]] = i;
      i = parent;
    }
    heap_[i] = v;
    heap_index_[v] = i;
  }

  void sift_down(int i) {
    int v = heap_[i];
    int n = static_cast<int>(heap_.size());
    while (true) {
      int child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && before(heap_[child + 1], heap_[child])) ++child;
      if (!before(heap_[child], v)) break;
      heap_[i] = heap_[child];
      heap_index_[heap_[i]] = i;
      i = child;
    }
    heap_[i] = v;
    heap_index_[v] = i;
  }

  std::vector<std::int8_t> assign_;
  std::vector<int> level_, reason_;
  std::vector<std::int8_t> phase_, seen_;
  std::vector<double> activity_;
  std::vector<int> heap_, heap_index_;
  double var_inc_ = 1.0;
  std::vector<std::vector<Lit>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<Lit> units_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t head_ = 0;
  std::size_t restarts_ = 0;
  bool unsat_ = false;
};

}  // namespace lpx

#endif  // LPX_SAT_HPP_
