// Copyright 2026 The udsolve Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UDSOLVE_BP_HPP
#define UDSOLVE_BP_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "udsolve/instance.hpp"
#include "udsolve/verify.hpp"

namespace udsolve {

/// Directed message vector for max-product matching BP: one value in [0, W]
/// per ordered endpoint pair of every edge. Message (i -> j) on edge index
/// e lives at slot 2e when i is the stored lower endpoint, 2e+1 otherwise.
class MessageState {
 public:
  MessageState() = default;

  static MessageState zero(const Instance& inst) {
    MessageState m;
    m.values_.assign(2 * inst.edges().size(), 0.0);
    return m;
  }

  /// Matching-seeded start: the edge weight on both directions of matched
  /// edges, zero elsewhere.
  static MessageState matching_init(const Instance& inst, const Matching& m) {
    MessageState state = zero(inst);
    for (const auto& [u, v] : m.pairs()) {
      const int e = inst.find_edge(u, v);
      const double w = inst.edges()[static_cast<std::size_t>(e)].weight;
      state.values_[static_cast<std::size_t>(2 * e)] = w;
      state.values_[static_cast<std::size_t>(2 * e) + 1] = w;
    }
    return state;
  }

  double at(const Instance& inst, int from, int to) const {
    return values_[slot(inst, from, to)];
  }

  void set(const Instance& inst, int from, int to, double value) {
    values_[slot(inst, from, to)] = value;
  }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  int iteration = 0;

  static std::size_t slot(const Instance& inst, int from, int to) {
    const int e = inst.find_edge(from, to);
    if (e < 0) {
      throw std::invalid_argument("message: edge (" + std::to_string(from) +
                                  ", " + std::to_string(to) +
                                  ") not in instance");
    }
    const bool forward = inst.edges()[static_cast<std::size_t>(e)].u == from;
    return static_cast<std::size_t>(2 * e) + (forward ? 0 : 1);
  }

  friend bool operator==(const MessageState& a, const MessageState& b) {
    return a.values_ == b.values_;
  }

 private:
  std::vector<double> values_;
};

inline double sup_distance(const MessageState& a, const MessageState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
  }
  return d;
}

namespace bp_detail {

struct IncomingTop2 {
  double top1 = 0.0;
  int top1_src = 0;
  double top2 = 0.0;
};

/// Largest and second largest incoming message per node (zeros when the
/// degree runs out).
inline std::vector<IncomingTop2> incoming_top2(const Instance& inst,
                                               const MessageState& m) {
  std::vector<IncomingTop2> tops(
      static_cast<std::size_t>(inst.node_count()) + 1);
  for (int i = 1; i <= inst.node_count(); ++i) {
    IncomingTop2& t = tops[static_cast<std::size_t>(i)];
    for (const Incidence& inc : inst.neighbors(i)) {
      const double value = m.at(inst, inc.neighbor, i);
      if (t.top1_src == 0 || value > t.top1) {
        if (t.top1_src != 0) t.top2 = std::max(t.top2, t.top1);
        t.top1 = value;
        t.top1_src = inc.neighbor;
      } else {
        t.top2 = std::max(t.top2, value);
      }
    }
  }
  return tops;
}

}  // namespace bp_detail

/// One synchronous max-product update of every directed message:
/// m'(i -> j) = (w_ij - max over k in N(i)\{j} of m(k -> i))_+.
/// Values stay in [0, W].
inline MessageState bp_step(const Instance& inst, const MessageState& m) {
  const auto tops = bp_detail::incoming_top2(inst, m);
  MessageState next = m;
  next.iteration = m.iteration + 1;
  for (int e = 0; e < static_cast<int>(inst.edges().size()); ++e) {
    const Edge& edge = inst.edges()[static_cast<std::size_t>(e)];
    for (int dir = 0; dir < 2; ++dir) {
      const int from = dir == 0 ? edge.u : edge.v;
      const int to = dir == 0 ? edge.v : edge.u;
      const auto& t = tops[static_cast<std::size_t>(from)];
      const double alpha = t.top1_src == to ? t.top2 : t.top1;
      next.values()[static_cast<std::size_t>(2 * e) + dir] =
          std::max(edge.weight - alpha, 0.0);
    }
  }
  return next;
}

/// Dual point read off a BP fixed point: y_i is the mean of the two largest
/// incoming messages at i (missing entries count as zero).
inline Allocation dual_from_fixed_point(const Instance& inst,
                                        const MessageState& m) {
  const auto tops = bp_detail::incoming_top2(inst, m);
  Allocation y = zero_allocation(inst);
  for (int i = 1; i <= inst.node_count(); ++i) {
    const auto& t = tops[static_cast<std::size_t>(i)];
    y[static_cast<std::size_t>(i)] = (t.top1 + t.top2) / 2.0;
  }
  return y;
}

struct BpOptions {
  int max_iters = 0;     // 0: use the heuristic cap 10 * |V| * ceil(W/w_min)
  double delta = 1e-12;  // fixed-point snap tolerance
  double tol_eq = kTolEq;
};

struct BpResult {
  bool converged = false;
  MessageState fixed_point;
  int iterations = 0;
  std::optional<Matching> matching;
  std::optional<Allocation> dual;
  std::string diagnostic;  // non-empty when extraction or validation failed
};

/// Iteration bound for converging BP when the LP optimum is unique and
/// integral with gap `g`: ceil(2 |V| W / g).
inline int bp_iteration_bound(const Instance& inst, double gap) {
  if (!(gap > 0.0)) {
    throw std::invalid_argument("bp_iteration_bound: gap must be positive");
  }
  return static_cast<int>(
      std::ceil(2.0 * inst.node_count() * inst.weight_bound() / gap));
}

namespace bp_detail {

inline int default_max_iters(const Instance& inst) {
  double w_min = inst.weight_bound();
  for (const Edge& e : inst.edges()) w_min = std::min(w_min, e.weight);
  // Heuristic cap only; not the convergence bound from the gap.
  return 10 * inst.node_count() *
         static_cast<int>(std::ceil(inst.weight_bound() / w_min));
}

/// Runs synchronous updates until an (exact, delta-snapped) fixed point or
/// the iteration cap. On success `iterations` is the first index t with
/// m^t = m^{t+1}.
inline BpResult iterate(const Instance& inst, MessageState m, int max_iters,
                        double delta) {
  BpResult result;
  for (int steps = 1; steps <= max_iters + 1; ++steps) {
    MessageState next = bp_step(inst, m);
    if (sup_distance(next, m) <= delta) {
      result.converged = true;
      result.iterations = steps - 1;
      result.fixed_point = std::move(m);
      return result;
    }
    m = std::move(next);
  }
  result.converged = false;
  result.iterations = max_iters;
  result.fixed_point = std::move(m);
  return result;
}

/// Reads the matching off a fixed point: node i pairs with the source of
/// its strictly largest positive incoming message. Ambiguity or asymmetry
/// reports failure through `diagnostic`.
inline std::optional<Matching> extract_matching(const Instance& inst,
                                                const MessageState& m,
                                                double tol,
                                                std::string& diagnostic) {
  const auto tops = incoming_top2(inst, m);
  std::vector<int> partner(static_cast<std::size_t>(inst.node_count()) + 1,
                           0);
  for (int i = 1; i <= inst.node_count(); ++i) {
    const auto& t = tops[static_cast<std::size_t>(i)];
    if (t.top1 <= tol) continue;  // unmatched: all incoming messages vanish
    if (t.top1 - t.top2 <= tol) {
      diagnostic = "ambiguous argmax at node " + std::to_string(i) +
                   " (optimum may not be unique)";
      return std::nullopt;
    }
    partner[static_cast<std::size_t>(i)] = t.top1_src;
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i <= inst.node_count(); ++i) {
    const int j = partner[static_cast<std::size_t>(i)];
    if (j == 0) continue;
    if (partner[static_cast<std::size_t>(j)] != i) {
      diagnostic = "asymmetric argmax between nodes " + std::to_string(i) +
                   " and " + std::to_string(j);
      return std::nullopt;
    }
    if (i < j) pairs.emplace_back(i, j);
  }
  return Matching::of(inst, std::move(pairs));
}

}  // namespace bp_detail

/// Max-product BP for maximum-weight matching from the all-zero start.
/// Converges iff the LP optimum is integral (given uniqueness); the fixed
/// point then yields the matching and an optimal dual point.
inline BpResult run_bp_mwm(const Instance& inst, const BpOptions& opts = {}) {
  const int cap =
      opts.max_iters > 0 ? opts.max_iters : bp_detail::default_max_iters(inst);
  BpResult result =
      bp_detail::iterate(inst, MessageState::zero(inst), cap, opts.delta);
  if (!result.converged) {
    result.diagnostic =
        "no fixed point within " + std::to_string(cap) +
        " iterations (fractional or non-unique optimum)";
    return result;
  }
  std::string diagnostic;
  auto matching = bp_detail::extract_matching(inst, result.fixed_point,
                                              opts.tol_eq, diagnostic);
  if (!matching) {
    result.diagnostic = diagnostic;
    return result;
  }
  result.matching = std::move(*matching);
  result.dual = dual_from_fixed_point(inst, result.fixed_point);
  return result;
}

/// Matching-seeded BP: run the same updates from the matching_init state.
/// With a maximum-weight matching of an instance that has a UD solution it
/// reaches an exact fixed point within 2|E| iterations and the dual read
/// off it makes (dual, matching) a stable outcome; anything else means the
/// precondition was violated.
inline BpResult run_algorithm_a(const Instance& inst, const Matching& matching,
                                const BpOptions& opts = {}) {
  const int cap = 2 * static_cast<int>(inst.edges().size());
  BpResult result = bp_detail::iterate(
      inst, MessageState::matching_init(inst, matching), cap, opts.delta);
  if (!result.converged) {
    result.diagnostic = "no fixed point within 2|E| = " + std::to_string(cap) +
                        " iterations (matching not optimal or no UD solution)";
    return result;
  }
  Allocation dual = dual_from_fixed_point(inst, result.fixed_point);
  Outcome outcome{dual, matching};
  try {
    validate_outcome(inst, outcome, opts.tol_eq);
  } catch (const std::invalid_argument& err) {
    result.diagnostic = std::string("dual is not an allocation: ") +
                        err.what();
    return result;
  }
  const ViolationReport stability =
      check_stability(inst, outcome, opts.tol_eq);
  if (!stability.stability_violations.empty()) {
    result.diagnostic =
        "dual outcome is unstable (matching not optimal or no UD solution)";
    return result;
  }
  result.matching = matching;
  result.dual = std::move(dual);
  return result;
}

/// Four-way comparison in the matching-relative partial order: m "below"
/// m_hat means m is larger on both directions of every matched edge and
/// smaller on every other directed edge.
enum class MessageOrder { less_equal, greater_equal, equal, incomparable };

inline MessageOrder message_partial_order(const Instance& inst,
                                          const MessageState& m,
                                          const MessageState& m_hat,
                                          const Matching& matching,
                                          double tol_eq = kTolEq) {
  if (m.values().size() != m_hat.values().size() ||
      m.values().size() != 2 * inst.edges().size()) {
    throw std::invalid_argument(
        "message_partial_order: states belong to different instances");
  }
  bool le = true;
  bool ge = true;
  for (int e = 0; e < static_cast<int>(inst.edges().size()); ++e) {
    const Edge& edge = inst.edges()[static_cast<std::size_t>(e)];
    const bool is_matched = matching.contains(edge.u, edge.v);
    for (int dir = 0; dir < 2; ++dir) {
      const double a = m.values()[static_cast<std::size_t>(2 * e) + dir];
      const double b = m_hat.values()[static_cast<std::size_t>(2 * e) + dir];
      if (is_matched) {
        if (a < b - tol_eq) le = false;
        if (a > b + tol_eq) ge = false;
      } else {
        if (a > b + tol_eq) le = false;
        if (a < b - tol_eq) ge = false;
      }
    }
  }
  if (le && ge) return MessageOrder::equal;
  if (le) return MessageOrder::less_equal;
  if (ge) return MessageOrder::greater_equal;
  return MessageOrder::incomparable;
}

/// Walks the argmax-predecessor chain of a fixed point starting from the
/// directed edge (from -> to). Stops on a vanishing message, a node with no
/// other neighbor, or a repeated directed edge; ties pick the lowest node
/// id. Returns the nodes from the far end back to `to`, so at most
/// 2|E| + 1 directed edges long.
inline std::vector<int> critical_path(const Instance& inst,
                                      const MessageState& m_star, int from,
                                      int to, double tol_eq = kTolEq) {
  if (inst.find_edge(from, to) < 0) {
    throw std::invalid_argument("critical_path: start edge not in instance");
  }
  std::vector<int> seq{to, from};  // i_0, i_1, ...
  std::set<std::pair<int, int>> visited{{from, to}};
  int prev = to;
  int cur = from;
  while (m_star.at(inst, cur, prev) > tol_eq) {
    int next = 0;
    double best = 0.0;
    for (const Incidence& inc : inst.neighbors(cur)) {
      if (inc.neighbor == prev) continue;
      const double value = m_star.at(inst, inc.neighbor, cur);
      if (next == 0 || value > best + tol_eq ||
          (value > best - tol_eq && inc.neighbor < next)) {
        best = std::max(best, value);
        next = inc.neighbor;
      }
    }
    if (next == 0) break;  // walker reached a degree-1 node
    seq.push_back(next);
    prev = cur;
    cur = next;
    if (!visited.insert({cur, prev}).second) break;  // directed edge repeats
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

}  // namespace udsolve

#endif  // UDSOLVE_BP_HPP
