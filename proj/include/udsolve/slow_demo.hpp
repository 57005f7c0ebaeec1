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

#ifndef UDSOLVE_SLOW_DEMO_HPP
#define UDSOLVE_SLOW_DEMO_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "udsolve/generators.hpp"
#include "udsolve/instance.hpp"
#include "udsolve/rebalance.hpp"

namespace udsolve {

/// Negative-result experiment: run the damped rebalancing iteration from
/// the ring's almost-balanced but unstable outcome, deliberately skipping
/// the stability precondition that edge_rebalancing enforces. Successive
/// iterates can move by at most eps' per step, so the badly unstable edge
/// needs at least floor(1/(4 eps')) iterations to become even (1/2)-stable.
struct SlowDemoConfig {
  int sections = 8;  // ring parameter N; the ring has 8N nodes
  double r = 1.0 / 3.0;
  double kappa = 0.5;
  long long max_iters = 1'000'000;
};

struct SlowDemoReport {
  Instance instance;
  Outcome start;
  std::pair<int, int> bad_edge;
  double eps_prime = 0.0;
  double weight_bound = 0.0;
  long long lower_bound = 0;        // floor(1 / (4 eps'))
  double initial_deficit = 0.0;     // deficit of the bad edge at t = 0
  double max_step_change = 0.0;     // max over t of ||gamma^{t+1}-gamma^t||
  long long first_half_stable = -1;  // first t with bad-edge deficit <= 1/2
  std::vector<double> deficit_trace;  // bad-edge deficit at t = 0, 1, ...
  long long iterations_run = 0;
};

inline SlowDemoReport run_slow_demo(const SlowDemoConfig& cfg) {
  if (!(cfg.kappa > 0.0) || !(cfg.kappa <= 0.5)) {
    throw std::invalid_argument("slow demo: kappa must lie in (0, 1/2]");
  }
  RingInstance ring = generate_ring(cfg.sections, cfg.r);
  SlowDemoReport report;
  report.bad_edge = ring.bad_edge;
  report.eps_prime = ring.eps_prime;
  report.weight_bound = ring.instance.weight_bound();
  report.lower_bound =
      static_cast<long long>(std::floor(1.0 / (4.0 * ring.eps_prime)));

  const Instance& inst = ring.instance;
  const Matching& matching = ring.bad_outcome.matching;
  const auto [bu, bv] = ring.bad_edge;
  const double bad_weight =
      inst.edges()[static_cast<std::size_t>(inst.find_edge(bu, bv))].weight;
  const auto bad_deficit = [&](const Allocation& gamma) {
    return bad_weight - gamma[static_cast<std::size_t>(bu)] -
           gamma[static_cast<std::size_t>(bv)];
  };

  Allocation gamma = ring.bad_outcome.gamma;
  report.initial_deficit = bad_deficit(gamma);
  report.deficit_trace.push_back(report.initial_deficit);
  if (report.initial_deficit <= 0.5) report.first_half_stable = 0;

  Allocation reb;
  long long t = 0;
  while (report.first_half_stable < 0 && t < cfg.max_iters) {
    rebalance_detail::rebalance_core(inst, matching, gamma, reb);
    rebalance_detail::threshold_core(inst, matching, reb);
    double change = 0.0;
    for (std::size_t i = 1; i < gamma.size(); ++i) {
      const double next = cfg.kappa * reb[i] + (1.0 - cfg.kappa) * gamma[i];
      change = std::max(change, std::abs(next - gamma[i]));
      gamma[i] = next;
    }
    ++t;
    report.max_step_change = std::max(report.max_step_change, change);
    const double deficit = bad_deficit(gamma);
    report.deficit_trace.push_back(deficit);
    if (deficit <= 0.5) report.first_half_stable = t;
  }
  report.iterations_run = t;
  report.instance = std::move(ring.instance);
  report.start = std::move(ring.bad_outcome);
  return report;
}

}  // namespace udsolve

#endif  // UDSOLVE_SLOW_DEMO_HPP
