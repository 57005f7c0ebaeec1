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

#ifndef UDSOLVE_INSTANCE_HPP
#define UDSOLVE_INSTANCE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace udsolve {

/// Default tolerance for exact-equality comparisons on reals.
inline constexpr double kTolEq = 1e-9;

/// One undirected edge of a bargaining network. `split` is the fraction of
/// the edge surplus awarded to endpoint `u`; endpoint `v` implicitly gets
/// `1 - split`. Instances store edges normalized so that `u < v`.
struct Edge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
  double split = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Adjacency entry: a neighbor together with the index of the connecting
/// edge in Instance::edges().
struct Incidence {
  int neighbor = 0;
  int edge = -1;
};

/// A validated problem instance: an undirected weighted graph with per-edge
/// surplus split fractions and a uniform weight bound.
///
/// Node ids are 1-based (1..n) to match the text file format; vectors that
/// are indexed by node are sized n+1 with slot 0 unused.
class Instance {
 public:
  Instance() = default;

  /// Validates and canonicalizes: edges are flipped to u < v (mirroring the
  /// split fraction) and sorted by (u, v). Throws std::invalid_argument on
  /// any violation: bad node ids, self-loops, duplicate edges, weights
  /// outside (0, weight_bound], splits outside (0, 1).
  Instance(int node_count, std::vector<Edge> edges, double weight_bound = 1.0)
      : node_count_(node_count),
        edges_(std::move(edges)),
        weight_bound_(weight_bound) {
    if (node_count_ < 1) {
      throw std::invalid_argument("instance: node count must be positive");
    }
    if (!(weight_bound_ > 0.0) || !std::isfinite(weight_bound_)) {
      throw std::invalid_argument("instance: weight bound must be positive");
    }
    for (Edge& e : edges_) {
      if (e.u < 1 || e.u > node_count_ || e.v < 1 || e.v > node_count_) {
        throw std::invalid_argument("instance: node id out of range on edge " +
                                    edge_name(e.u, e.v));
      }
      if (e.u == e.v) {
        throw std::invalid_argument("instance: self-loop at node " +
                                    std::to_string(e.u));
      }
      if (!(e.weight > 0.0) || !(e.weight <= weight_bound_) ||
          !std::isfinite(e.weight)) {
        throw std::invalid_argument("instance: weight out of (0, W] on edge " +
                                    edge_name(e.u, e.v));
      }
      if (!(e.split > 0.0) || !(e.split < 1.0)) {
        throw std::invalid_argument(
            "instance: split fraction out of (0, 1) on edge " +
            edge_name(e.u, e.v));
      }
      if (e.u > e.v) {
        std::swap(e.u, e.v);
        e.split = 1.0 - e.split;
      }
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    for (std::size_t i = 1; i < edges_.size(); ++i) {
      if (edges_[i - 1].u == edges_[i].u && edges_[i - 1].v == edges_[i].v) {
        throw std::invalid_argument("instance: duplicate edge " +
                                    edge_name(edges_[i].u, edges_[i].v));
      }
    }
    adjacency_.assign(static_cast<std::size_t>(node_count_) + 1, {});
    for (int idx = 0; idx < static_cast<int>(edges_.size()); ++idx) {
      const Edge& e = edges_[static_cast<std::size_t>(idx)];
      adjacency_[static_cast<std::size_t>(e.u)].push_back({e.v, idx});
      adjacency_[static_cast<std::size_t>(e.v)].push_back({e.u, idx});
    }
  }

  int node_count() const { return node_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double weight_bound() const { return weight_bound_; }

  const std::vector<Incidence>& neighbors(int node) const {
    return adjacency_[static_cast<std::size_t>(node)];
  }

  int degree(int node) const {
    return static_cast<int>(neighbors(node).size());
  }

  /// Index into edges() of the undirected edge {u, v}, or -1 if absent.
  int find_edge(int u, int v) const {
    if (u < 1 || u > node_count_ || v < 1 || v > node_count_) return -1;
    for (const Incidence& inc : neighbors(u)) {
      if (inc.neighbor == v) return inc.edge;
    }
    return -1;
  }

  /// Split fraction seen from `endpoint` on edge `edge_index`.
  double split_for(int edge_index, int endpoint) const {
    const Edge& e = edges_[static_cast<std::size_t>(edge_index)];
    return endpoint == e.u ? e.split : 1.0 - e.split;
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.node_count_ == b.node_count_ &&
           a.weight_bound_ == b.weight_bound_ && a.edges_ == b.edges_;
  }

 private:
  static std::string edge_name(int u, int v) {
    return "(" + std::to_string(u) + ", " + std::to_string(v) + ")";
  }

  int node_count_ = 0;
  std::vector<Edge> edges_;
  double weight_bound_ = 1.0;
  std::vector<std::vector<Incidence>> adjacency_;
};

/// A set of pairwise node-disjoint instance edges. Pairs are normalized to
/// u < v and kept sorted.
class Matching {
 public:
  Matching() = default;

  /// Validates against the instance: every pair must be an instance edge and
  /// no node may appear twice. Throws std::invalid_argument otherwise.
  static Matching of(const Instance& inst,
                     std::vector<std::pair<int, int>> pairs) {
    Matching m;
    m.partner_.assign(static_cast<std::size_t>(inst.node_count()) + 1, 0);
    for (auto& [u, v] : pairs) {
      if (u > v) std::swap(u, v);
      if (inst.find_edge(u, v) < 0) {
        throw std::invalid_argument("matching: edge (" + std::to_string(u) +
                                    ", " + std::to_string(v) +
                                    ") not in instance");
      }
      if (m.partner_[static_cast<std::size_t>(u)] != 0 ||
          m.partner_[static_cast<std::size_t>(v)] != 0) {
        throw std::invalid_argument("matching: node matched twice at edge (" +
                                    std::to_string(u) + ", " +
                                    std::to_string(v) + ")");
      }
      m.partner_[static_cast<std::size_t>(u)] = v;
      m.partner_[static_cast<std::size_t>(v)] = u;
    }
    std::sort(pairs.begin(), pairs.end());
    m.pairs_ = std::move(pairs);
    return m;
  }

  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

  /// Partner of `node`, or 0 when unmatched.
  int partner(int node) const {
    if (node < 1 || node >= static_cast<int>(partner_.size())) return 0;
    return partner_[static_cast<std::size_t>(node)];
  }

  bool contains(int u, int v) const { return partner(u) == v && u != v; }

  std::size_t size() const { return pairs_.size(); }

  double weight(const Instance& inst) const {
    double total = 0.0;
    for (const auto& [u, v] : pairs_) {
      total += inst.edges()[static_cast<std::size_t>(inst.find_edge(u, v))]
                   .weight;
    }
    return total;
  }

  friend bool operator==(const Matching& a, const Matching& b) {
    return a.pairs_ == b.pairs_;
  }

 private:
  std::vector<std::pair<int, int>> pairs_;
  std::vector<int> partner_;  // size n+1; 0 = unmatched
};

/// Per-node earnings, 1-based (size n+1, slot 0 unused and zero).
using Allocation = std::vector<double>;

inline Allocation zero_allocation(const Instance& inst) {
  return Allocation(static_cast<std::size_t>(inst.node_count()) + 1, 0.0);
}

/// Sup-norm distance between two allocations of equal size.
inline double sup_distance(const Allocation& a, const Allocation& b) {
  double d = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

/// A trade outcome: a matching plus an allocation that splits each matched
/// edge's weight; unmatched nodes earn zero.
struct Outcome {
  Allocation gamma;
  Matching matching;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Checks the outcome invariants: gamma has one entry per node, matched
/// sums equal the edge weights to `tol`, unmatched nodes earn zero to `tol`,
/// and every entry lies in [0, W] (to `tol`). Throws std::invalid_argument.
inline void validate_outcome(const Instance& inst, const Outcome& out,
                             double tol = kTolEq) {
  const int n = inst.node_count();
  if (static_cast<int>(out.gamma.size()) != n + 1) {
    throw std::invalid_argument("outcome: allocation has wrong length");
  }
  for (int i = 1; i <= n; ++i) {
    const double g = out.gamma[static_cast<std::size_t>(i)];
    if (!std::isfinite(g) || g < -tol || g > inst.weight_bound() + tol) {
      throw std::invalid_argument("outcome: gamma out of [0, W] at node " +
                                  std::to_string(i));
    }
    if (out.matching.partner(i) == 0 && std::abs(g) > tol) {
      throw std::invalid_argument("outcome: unmatched node " +
                                  std::to_string(i) + " earns nonzero");
    }
  }
  for (const auto& [u, v] : out.matching.pairs()) {
    const int idx = inst.find_edge(u, v);
    if (idx < 0) {
      throw std::invalid_argument("outcome: matched edge not in instance");
    }
    const double w = inst.edges()[static_cast<std::size_t>(idx)].weight;
    const double sum = out.gamma[static_cast<std::size_t>(u)] +
                       out.gamma[static_cast<std::size_t>(v)];
    if (std::abs(sum - w) > tol) {
      throw std::invalid_argument("outcome: matched sum != weight on edge (" +
                                  std::to_string(u) + ", " +
                                  std::to_string(v) + ")");
    }
  }
}

}  // namespace udsolve

#endif  // UDSOLVE_INSTANCE_HPP
