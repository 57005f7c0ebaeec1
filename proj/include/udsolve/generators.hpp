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

#ifndef UDSOLVE_GENERATORS_HPP
#define UDSOLVE_GENERATORS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "udsolve/instance.hpp"

namespace udsolve {

/// Ring instance on n = 8N nodes whose generated outcome is almost in
/// correct division everywhere yet badly unstable on one edge, so any
/// sup-norm-nonexpansive rebalancing started from it crawls.
///
/// All edges weigh W = 1 + 2/(beta - 1) with beta = (1 - r)/r. The matching
/// is {(1,2), (3,4), ...}; split fractions are r on the first quarter's
/// matched edges, mirrored with reversed orientation on the second quarter,
/// and reflected through node 8N - l + 1 onto the second half. Unmatched
/// edges get split 1/2 (their value never enters any check).
struct RingInstance {
  Instance instance;
  Outcome bad_outcome;   // eps'-correct division, unstable on bad_edge
  Outcome ud_solution;   // every node earns W/2: an exact UD solution
  std::pair<int, int> bad_edge;  // (6N, 6N+1); deficit exactly 1 in bad_outcome
  double eps_prime = 0.0;        // beta^{-(N-1)}
  double beta = 0.0;
};

/// Builds the ring for `sections` = N >= 1 and r in (0, 1/2). `pad` appends
/// floor(pad/2) disjoint single edges (weight W, split 1/2), each matched
/// and split exactly in half in both outcomes.
inline RingInstance generate_ring(int sections, double r, int pad = 0) {
  if (sections < 1) {
    throw std::invalid_argument("generate_ring: N must be >= 1");
  }
  if (!(r > 0.0) || !(r < 0.5)) {
    throw std::invalid_argument("generate_ring: r must lie in (0, 1/2)");
  }
  if (pad < 0) {
    throw std::invalid_argument("generate_ring: pad must be >= 0");
  }
  const int N = sections;
  const int n_ring = 8 * N;
  const int dummy_edges = pad / 2;
  const int n = n_ring + 2 * dummy_edges;
  const double beta = (1.0 - r) / r;
  const double W = 1.0 + 2.0 / (beta - 1.0);
  const auto reflect = [n_ring](int l) { return n_ring - l + 1; };

  // Split fraction at the lower endpoint of matched edge (2k-1, 2k).
  std::vector<double> split_at_odd(static_cast<std::size_t>(4 * N) + 1, 0.0);
  for (int k = 1; k <= N; ++k) split_at_odd[static_cast<std::size_t>(k)] = r;
  for (int k = N + 1; k <= 2 * N; ++k) {
    split_at_odd[static_cast<std::size_t>(k)] = 1.0 - r;
  }
  for (int k = 2 * N + 1; k <= 4 * N; ++k) {
    // Edge (2k-1, 2k) reflects onto (reflect(2k), reflect(2k-1)) with the
    // orientation reversed, so the split flips.
    const int mirrored_odd = reflect(2 * k);  // odd endpoint of the image
    const double mirrored = split_at_odd[static_cast<std::size_t>(
        (mirrored_odd + 1) / 2)];
    split_at_odd[static_cast<std::size_t>(k)] = 1.0 - mirrored;
  }

  std::vector<Edge> edges;
  std::vector<std::pair<int, int>> matched;
  for (int i = 1; i <= n_ring; ++i) {
    const int j = i == n_ring ? 1 : i + 1;
    const bool in_matching = i % 2 == 1 && j == i + 1;
    double split = 0.5;
    if (in_matching) {
      split = split_at_odd[static_cast<std::size_t>((i + 1) / 2)];
      matched.emplace_back(i, j);
    }
    edges.push_back({i, j, W, split});
  }

  Allocation gamma(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i <= N - 1; ++i) {
    const double value =
        W / 2.0 + 0.5 + (1.0 - std::pow(beta, -i)) / (beta - 1.0);
    gamma[static_cast<std::size_t>(2 * (N - i))] = value;
    gamma[static_cast<std::size_t>(2 * (N + i) + 1)] = value;
    gamma[static_cast<std::size_t>(2 * (N - i) - 1)] = W - value;
    gamma[static_cast<std::size_t>(2 * (N + i) + 2)] = W - value;
  }
  for (int i = 4 * N + 1; i <= 8 * N; ++i) {
    gamma[static_cast<std::size_t>(i)] =
        W - gamma[static_cast<std::size_t>(reflect(i))];
  }

  Allocation half(static_cast<std::size_t>(n) + 1, W / 2.0);
  half[0] = 0.0;

  for (int d = 0; d < dummy_edges; ++d) {
    const int u = n_ring + 2 * d + 1;
    const int v = u + 1;
    edges.push_back({u, v, W, 0.5});
    matched.emplace_back(u, v);
    gamma[static_cast<std::size_t>(u)] = W / 2.0;
    gamma[static_cast<std::size_t>(v)] = W / 2.0;
  }

  RingInstance result;
  result.instance = Instance(n, std::move(edges), W);
  Matching m = Matching::of(result.instance, matched);
  result.bad_outcome = Outcome{std::move(gamma), m};
  result.ud_solution = Outcome{std::move(half), std::move(m)};
  result.bad_edge = {6 * N, 6 * N + 1};
  result.eps_prime = std::pow(beta, -(N - 1));
  result.beta = beta;
  return result;
}

struct BipartiteConfig {
  int n_left = 1;
  int n_right = 1;
  double density = 1.0;      // per-pair edge probability, in (0, 1]
  double max_weight = 1.0;   // weights are i.i.d. in (0, max_weight]
  std::uint64_t seed = 0;
  double split_min = 0.1;    // splits are i.i.d. in [split_min, split_max]
  double split_max = 0.9;
};

namespace gen_detail {

/// splitmix64: tiny, portable, deterministic across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace gen_detail

/// Seeded bipartite instance: left nodes 1..n_left, right nodes
/// n_left+1..n_left+n_right, each pair drawn with probability `density`,
/// weights i.i.d. continuous in (0, max_weight], splits i.i.d. uniform in
/// [split_min, split_max]. Pure function of its configuration.
inline Instance generate_random_bipartite(const BipartiteConfig& cfg) {
  if (cfg.n_left < 1 || cfg.n_right < 1) {
    throw std::invalid_argument("bipartite: side sizes must be positive");
  }
  if (!(cfg.density > 0.0) || !(cfg.density <= 1.0)) {
    throw std::invalid_argument("bipartite: density must lie in (0, 1]");
  }
  if (!(cfg.max_weight > 0.0)) {
    throw std::invalid_argument("bipartite: max weight must be positive");
  }
  if (!(cfg.split_min > 0.0) || !(cfg.split_max < 1.0) ||
      cfg.split_min > cfg.split_max) {
    throw std::invalid_argument(
        "bipartite: split range must be a closed subinterval of (0, 1)");
  }
  gen_detail::SplitMix64 rng(cfg.seed);
  std::vector<Edge> edges;
  for (int i = 1; i <= cfg.n_left; ++i) {
    for (int j = 1; j <= cfg.n_right; ++j) {
      const bool present = rng.uniform() < cfg.density;
      const double w = cfg.max_weight * (1.0 - rng.uniform());
      const double s =
          cfg.split_min + rng.uniform() * (cfg.split_max - cfg.split_min);
      if (present) edges.push_back({i, cfg.n_left + j, w, s});
    }
  }
  return Instance(cfg.n_left + cfg.n_right, std::move(edges), cfg.max_weight);
}

}  // namespace udsolve

#endif  // UDSOLVE_GENERATORS_HPP
