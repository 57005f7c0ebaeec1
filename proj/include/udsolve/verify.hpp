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

#ifndef UDSOLVE_VERIFY_HPP
#define UDSOLVE_VERIFY_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "udsolve/instance.hpp"

namespace udsolve {

/// Best offer node `node` can get from a neighbor other than `exclude`
/// (pass 0 to exclude nobody): max over k of (w_{node,k} - gamma_k)_+.
/// Empty neighbor sets give 0.
inline double best_alternative(const Instance& inst, const Allocation& gamma,
                               int node, int exclude = 0) {
  double best = 0.0;
  for (const Incidence& inc : inst.neighbors(node)) {
    if (inc.neighbor == exclude) continue;
    const double offer =
        inst.edges()[static_cast<std::size_t>(inc.edge)].weight -
        gamma[static_cast<std::size_t>(inc.neighbor)];
    if (offer > best) best = offer;
  }
  return best;
}

/// Edge surplus: w_uv minus both endpoints' best alternatives (each endpoint
/// excluding the other). Negative values are possible for non-stable gamma.
inline double surplus(const Instance& inst, const Allocation& gamma, int u,
                      int v) {
  const int idx = inst.find_edge(u, v);
  if (idx < 0) {
    throw std::invalid_argument("surplus: edge (" + std::to_string(u) + ", " +
                                std::to_string(v) + ") not in instance");
  }
  return inst.edges()[static_cast<std::size_t>(idx)].weight -
         best_alternative(inst, gamma, u, v) -
         best_alternative(inst, gamma, v, u);
}

struct StabilityViolation {
  int u = 0;
  int v = 0;
  double deficit = 0.0;  // w_uv - gamma_u - gamma_v
};

struct UnmatchedOffer {
  int node = 0;  // unmatched node receiving the offer
  int from = 0;
  double offer = 0.0;
};

struct DivisionResidual {
  int u = 0;
  int v = 0;
  double residual = 0.0;
};

struct ViolationReport {
  std::vector<StabilityViolation> stability_violations;
  std::vector<UnmatchedOffer> offers_to_unmatched;
  std::vector<DivisionResidual> division_residuals;
  double max_deficit = 0.0;
  double max_residual = 0.0;

  bool stable() const { return stability_violations.empty(); }
};

/// Stability check: lists every unmatched edge whose endpoints sum to less
/// than the edge weight minus `tol`, and every offer above `tol` made to an
/// unmatched node.
inline ViolationReport check_stability(const Instance& inst,
                                       const Outcome& out, double tol) {
  ViolationReport report;
  for (const Edge& e : inst.edges()) {
    if (out.matching.contains(e.u, e.v)) continue;
    const double sum = out.gamma[static_cast<std::size_t>(e.u)] +
                       out.gamma[static_cast<std::size_t>(e.v)];
    const double deficit = e.weight - sum;
    if (deficit > report.max_deficit) report.max_deficit = deficit;
    if (deficit > tol) {
      report.stability_violations.push_back({e.u, e.v, deficit});
    }
    // Offers to unmatched endpoints of this (necessarily unmatched) edge.
    for (int flip = 0; flip < 2; ++flip) {
      const int receiver = flip == 0 ? e.u : e.v;
      const int sender = flip == 0 ? e.v : e.u;
      if (out.matching.partner(receiver) != 0) continue;
      const double offer =
          e.weight - out.gamma[static_cast<std::size_t>(sender)];
      if (offer > tol) {
        report.offers_to_unmatched.push_back({receiver, sender, offer});
      }
    }
  }
  return report;
}

namespace verify_detail {

/// Residual of the correct-division equation at the endpoint carrying the
/// stored split fraction; the other endpoint's residual matches up to the
/// matched-sum error, which is asserted.
inline double division_residual(const Instance& inst, const Allocation& gamma,
                                int edge_index, double tol_eq) {
  const Edge& e = inst.edges()[static_cast<std::size_t>(edge_index)];
  const double alt_u = best_alternative(inst, gamma, e.u, e.v);
  const double alt_v = best_alternative(inst, gamma, e.v, e.u);
  const double surp = e.weight - alt_u - alt_v;
  const double res_u =
      gamma[static_cast<std::size_t>(e.u)] - alt_u - e.split * surp;
  const double res_v =
      gamma[static_cast<std::size_t>(e.v)] - alt_v - (1.0 - e.split) * surp;
  if (std::abs(std::abs(res_u) - std::abs(res_v)) > 8.0 * tol_eq) {
    throw std::logic_error(
        "division residual differs between endpoints of edge (" +
        std::to_string(e.u) + ", " + std::to_string(e.v) +
        "); matched sum is off");
  }
  return std::abs(res_u);
}

}  // namespace verify_detail

/// Max over matched edges of the correct-division residual. The outcome
/// satisfies eps-correct division iff the returned value is <= eps.
inline double check_eps_correct_division(const Instance& inst,
                                         const Outcome& out,
                                         double tol_eq = kTolEq) {
  double max_res = 0.0;
  for (const auto& [u, v] : out.matching.pairs()) {
    const int idx = inst.find_edge(u, v);
    const double res =
        verify_detail::division_residual(inst, out.gamma, idx, tol_eq);
    if (res > max_res) max_res = res;
  }
  return max_res;
}

/// Full report: stability at `stability_tol` plus the division residual of
/// every matched edge.
inline ViolationReport verify_outcome(const Instance& inst, const Outcome& out,
                                      double stability_tol,
                                      double tol_eq = kTolEq) {
  ViolationReport report = check_stability(inst, out, stability_tol);
  for (const auto& [u, v] : out.matching.pairs()) {
    const int idx = inst.find_edge(u, v);
    const double res =
        verify_detail::division_residual(inst, out.gamma, idx, tol_eq);
    report.division_residuals.push_back({u, v, res});
    if (res > report.max_residual) report.max_residual = res;
  }
  return report;
}

}  // namespace udsolve

#endif  // UDSOLVE_VERIFY_HPP
