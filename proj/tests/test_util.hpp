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

#ifndef UDSOLVE_TESTS_TEST_UTIL_HPP
#define UDSOLVE_TESTS_TEST_UTIL_HPP

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "udsolve/instance.hpp"

namespace testutil {

inline udsolve::Instance single_edge(double w = 1.0, double r = 0.5) {
  return udsolve::Instance(2, {{1, 2, w, r}});
}

/// Path 1 - 2 - 3 with weights (w12, w23).
inline udsolve::Instance path3(double w12 = 1.0, double w23 = 0.6,
                               double r12 = 0.5, double r23 = 0.5) {
  return udsolve::Instance(3, {{1, 2, w12, r12}, {2, 3, w23, r23}});
}

inline udsolve::Instance triangle(double w = 1.0) {
  return udsolve::Instance(3, {{1, 2, w, 0.5}, {2, 3, w, 0.5}, {1, 3, w, 0.5}});
}

/// Bipartite 4-cycle 1 - 2 - 3 - 4 - 1, unit weights.
inline udsolve::Instance square() {
  return udsolve::Instance(
      4, {{1, 2, 1.0, 0.5}, {2, 3, 1.0, 0.5}, {3, 4, 1.0, 0.5},
          {1, 4, 1.0, 0.5}});
}

/// Arbitrary (not necessarily bipartite) random instance for property
/// tests: unit weight bound, weights in (0.05, 1], splits in [0.1, 0.9].
inline udsolve::Instance random_instance(std::mt19937_64& rng, int max_nodes,
                                         double edge_prob) {
  std::uniform_int_distribution<int> node_dist(2, max_nodes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = node_dist(rng);
  std::vector<udsolve::Edge> edges;
  for (int u = 1; u <= n; ++u) {
    for (int v = u + 1; v <= n; ++v) {
      if (unit(rng) < edge_prob) {
        const double w = 0.05 + 0.95 * unit(rng);
        const double r = 0.1 + 0.8 * unit(rng);
        edges.push_back({u, v, w, r});
      }
    }
  }
  return udsolve::Instance(n, std::move(edges), 1.0);
}

/// Random maximal matching: greedy over a shuffled edge order.
inline udsolve::Matching random_maximal_matching(const udsolve::Instance& inst,
                                                 std::mt19937_64& rng) {
  std::vector<int> order(inst.edges().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<char> used(static_cast<std::size_t>(inst.node_count()) + 1, 0);
  std::vector<std::pair<int, int>> pairs;
  for (int idx : order) {
    const udsolve::Edge& e = inst.edges()[static_cast<std::size_t>(idx)];
    if (used[static_cast<std::size_t>(e.u)] ||
        used[static_cast<std::size_t>(e.v)]) {
      continue;
    }
    used[static_cast<std::size_t>(e.u)] = 1;
    used[static_cast<std::size_t>(e.v)] = 1;
    pairs.emplace_back(e.u, e.v);
  }
  return udsolve::Matching::of(inst, std::move(pairs));
}

/// Uniformly random point of A_M: each matched edge split at a uniform
/// fraction, unmatched nodes at zero.
inline udsolve::Allocation random_allocation(const udsolve::Instance& inst,
                                             const udsolve::Matching& matching,
                                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  udsolve::Allocation gamma = udsolve::zero_allocation(inst);
  for (const auto& [u, v] : matching.pairs()) {
    const double w =
        inst.edges()[static_cast<std::size_t>(inst.find_edge(u, v))].weight;
    const double share = unit(rng) * w;
    gamma[static_cast<std::size_t>(u)] = share;
    gamma[static_cast<std::size_t>(v)] = w - share;
  }
  return gamma;
}

}  // namespace testutil

#endif  // UDSOLVE_TESTS_TEST_UTIL_HPP
