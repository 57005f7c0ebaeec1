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

#ifndef UDSOLVE_ORACLE_HPP
#define UDSOLVE_ORACLE_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "udsolve/instance.hpp"
#include "udsolve/verify.hpp"

namespace udsolve {

/// Exhaustive-enumeration oracles for small instances. They exist to test
/// everything else, so they trade speed for being unarguably correct.
struct OracleOptions {
  int max_edges = 24;
  double tol_eq = kTolEq;
};

namespace oracle_detail {

inline void check_cap(const Instance& inst, const OracleOptions& opts) {
  if (static_cast<int>(inst.edges().size()) > opts.max_edges) {
    throw std::invalid_argument(
        "oracle: instance exceeds enumeration cap of " +
        std::to_string(opts.max_edges) + " edges");
  }
  if (inst.node_count() > 64) {
    throw std::invalid_argument("oracle: instance exceeds 64 nodes");
  }
}

inline std::uint64_t node_bit(int node) {
  return std::uint64_t{1} << (node - 1);
}

/// Calls f(edge_indices, weight) once per matching (the empty matching
/// included) whose edges avoid `blocked` nodes. Enumeration order is
/// lexicographic in edge-index sequences.
template <typename F>
void for_each_matching(const Instance& inst, std::uint64_t blocked, F&& f) {
  const auto& edges = inst.edges();
  const int m = static_cast<int>(edges.size());
  std::vector<int> selected;
  const auto rec = [&](const auto& self, int k, std::uint64_t used,
                       double weight) -> void {
    if (k == m) {
      f(selected, weight);
      return;
    }
    const Edge& e = edges[static_cast<std::size_t>(k)];
    const std::uint64_t ends = node_bit(e.u) | node_bit(e.v);
    if ((used & ends) == 0) {
      selected.push_back(k);
      self(self, k + 1, used | ends, weight + e.weight);
      selected.pop_back();
    }
    self(self, k + 1, used, weight);
  };
  rec(rec, 0, blocked, 0.0);
}

struct Cycle {
  std::vector<int> edge_indices;
  std::uint64_t node_mask = 0;
  double weight = 0.0;
};

/// All simple odd cycles, each reported once (smallest node first, smaller
/// of the two neighbors second).
inline std::vector<Cycle> odd_cycles(const Instance& inst) {
  std::vector<Cycle> cycles;
  std::vector<int> path;
  std::vector<int> path_edges;
  std::vector<char> on_path(static_cast<std::size_t>(inst.node_count()) + 1,
                            0);
  const auto dfs = [&](const auto& self, int start, int node) -> void {
    for (const Incidence& inc : inst.neighbors(node)) {
      const int next = inc.neighbor;
      if (next == start && path.size() >= 3) {
        if (path[1] < path.back() && path.size() % 2 == 1) {
          Cycle c;
          c.edge_indices = path_edges;
          c.edge_indices.push_back(inc.edge);
          for (int p : path) c.node_mask |= node_bit(p);
          for (int e : c.edge_indices) {
            c.weight += inst.edges()[static_cast<std::size_t>(e)].weight;
          }
          cycles.push_back(std::move(c));
        }
        continue;
      }
      if (next <= start || on_path[static_cast<std::size_t>(next)]) continue;
      on_path[static_cast<std::size_t>(next)] = 1;
      path.push_back(next);
      path_edges.push_back(inc.edge);
      self(self, start, next);
      path_edges.pop_back();
      path.pop_back();
      on_path[static_cast<std::size_t>(next)] = 0;
    }
  };
  for (int s = 1; s <= inst.node_count(); ++s) {
    on_path[static_cast<std::size_t>(s)] = 1;
    path.assign(1, s);
    path_edges.clear();
    dfs(dfs, s, s);
    on_path[static_cast<std::size_t>(s)] = 0;
  }
  return cycles;
}

}  // namespace oracle_detail

struct MwmResult {
  double weight = 0.0;
  std::vector<Matching> optimal;  // every maximum-weight matching, lex order
};

/// Exact maximum-weight matching by enumeration.
inline MwmResult brute_force_mwm(const Instance& inst,
                                 const OracleOptions& opts = {}) {
  oracle_detail::check_cap(inst, opts);
  double best = 0.0;
  oracle_detail::for_each_matching(
      inst, 0, [&](const std::vector<int>&, double w) {
        if (w > best) best = w;
      });
  std::vector<std::vector<int>> optimal_indices;
  oracle_detail::for_each_matching(
      inst, 0, [&](const std::vector<int>& sel, double w) {
        if (w >= best - opts.tol_eq) optimal_indices.push_back(sel);
      });
  std::sort(optimal_indices.begin(), optimal_indices.end());
  MwmResult result;
  result.weight = best;
  for (const auto& indices : optimal_indices) {
    std::vector<std::pair<int, int>> pairs;
    for (int idx : indices) {
      const Edge& e = inst.edges()[static_cast<std::size_t>(idx)];
      pairs.emplace_back(e.u, e.v);
    }
    result.optimal.push_back(Matching::of(inst, std::move(pairs)));
  }
  return result;
}

struct LpVertexEdge {
  int edge = -1;
  bool half = false;  // true: value 1/2 (odd-cycle edge); false: value 1

  friend bool operator==(const LpVertexEdge&, const LpVertexEdge&) = default;
};

/// A half-integral vertex of the fractional matching polytope: a matching
/// at value 1 plus node-disjoint odd cycles at value 1/2.
struct LpVertex {
  std::vector<LpVertexEdge> support;  // sorted by edge index
  double objective = 0.0;

  bool integral() const {
    for (const LpVertexEdge& e : support) {
      if (e.half) return false;
    }
    return true;
  }
};

struct FractionalOptimum {
  double value = 0.0;
  LpVertex vertex;
};

/// Exact optimum of the fractional matching LP, found by enumerating all
/// half-integral vertices: matchings combined with node-disjoint odd cycles
/// taken at value 1/2. Ties prefer integral vertices, then the
/// lexicographically smallest support.
inline FractionalOptimum fractional_lp_optimum(const Instance& inst,
                                               const OracleOptions& opts = {}) {
  using namespace oracle_detail;
  check_cap(inst, opts);
  const std::vector<Cycle> cycles = odd_cycles(inst);

  bool have_best = false;
  double best_value = 0.0;
  bool best_integral = false;
  std::vector<LpVertexEdge> best_support;

  const auto consider = [&](const std::vector<int>& cycle_subset,
                            double cycle_weight, std::uint64_t cycle_mask) {
    for_each_matching(inst, cycle_mask, [&](const std::vector<int>& sel,
                                            double match_weight) {
      const double value = match_weight + cycle_weight / 2.0;
      std::vector<LpVertexEdge> support;
      for (int ci : cycle_subset) {
        for (int e : cycles[static_cast<std::size_t>(ci)].edge_indices) {
          support.push_back({e, true});
        }
      }
      for (int e : sel) support.push_back({e, false});
      std::sort(support.begin(), support.end(),
                [](const LpVertexEdge& a, const LpVertexEdge& b) {
                  return std::pair(a.edge, a.half) < std::pair(b.edge, b.half);
                });
      const bool integral = cycle_subset.empty();
      const auto lex_edges = [](const std::vector<LpVertexEdge>& s) {
        std::vector<int> ids;
        ids.reserve(s.size());
        for (const LpVertexEdge& e : s) ids.push_back(e.edge);
        return ids;
      };
      bool better = false;
      if (!have_best || value > best_value + opts.tol_eq) {
        better = true;
      } else if (value >= best_value - opts.tol_eq) {
        if (integral != best_integral) {
          better = integral;
        } else {
          better = lex_edges(support) < lex_edges(best_support);
        }
      }
      if (better) {
        have_best = true;
        best_value = std::max(best_value, value);
        best_integral = integral;
        best_support = std::move(support);
      }
    });
  };

  std::vector<int> chosen;
  const auto choose_cycles = [&](const auto& self, int k, std::uint64_t mask,
                                 double weight) -> void {
    consider(chosen, weight, mask);
    for (int i = k; i < static_cast<int>(cycles.size()); ++i) {
      const Cycle& c = cycles[static_cast<std::size_t>(i)];
      if ((mask & c.node_mask) != 0) continue;
      chosen.push_back(i);
      self(self, i + 1, mask | c.node_mask, weight + c.weight);
      chosen.pop_back();
    }
  };
  choose_cycles(choose_cycles, 0, 0, 0.0);

  FractionalOptimum result;
  result.value = best_value;
  result.vertex.support = std::move(best_support);
  result.vertex.objective = best_value;
  return result;
}

/// Stable outcomes (hence UD solutions) exist iff the fractional optimum
/// is attained by a matching.
inline bool has_integral_optimum(const Instance& inst,
                                 const OracleOptions& opts = {}) {
  const double integral = brute_force_mwm(inst, opts).weight;
  const double fractional = fractional_lp_optimum(inst, opts).value;
  return fractional - integral <= opts.tol_eq;
}

/// LP gap over integral corners: weight difference between the heaviest and
/// the next heaviest matching. Two matchings tying for the maximum give
/// g = 0 (non-unique optimum). With fewer than two matchings (edgeless
/// instance) the report is degenerate and g equals the best weight.
struct GapReport {
  double best_matching_weight = 0.0;
  double second_best_corner_weight = 0.0;
  double gap = 0.0;
  bool degenerate = false;  // fewer than two corners to compare
  bool tie = false;         // gap <= tol_eq: optimum not unique
};

inline GapReport lp_gap(const Instance& inst, const OracleOptions& opts = {}) {
  oracle_detail::check_cap(inst, opts);
  double best = 0.0;
  double second = 0.0;
  long count = 0;
  oracle_detail::for_each_matching(
      inst, 0, [&](const std::vector<int>&, double w) {
        ++count;
        if (count == 1) {
          best = w;
        } else if (w > best) {
          second = best;
          best = w;
        } else if (count == 2 || w > second) {
          second = w;
        }
      });
  GapReport report;
  report.best_matching_weight = best;
  if (count < 2) {
    report.degenerate = true;
    report.second_best_corner_weight = 0.0;
    report.gap = best;
  } else {
    report.second_best_corner_weight = second;
    report.gap = best - second;
    report.tie = report.gap <= opts.tol_eq;
  }
  return report;
}

/// True iff the outcome is stable to `tol` and every matched edge satisfies
/// the correct-division equation to `tol`.
inline bool exact_ud_check(const Instance& inst, const Outcome& out,
                           double tol) {
  const ViolationReport stability = check_stability(inst, out, tol);
  if (!stability.stability_violations.empty() ||
      !stability.offers_to_unmatched.empty()) {
    return false;
  }
  return check_eps_correct_division(inst, out) <= tol;
}

}  // namespace udsolve

#endif  // UDSOLVE_ORACLE_HPP
