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

#ifndef UDSOLVE_REBALANCE_HPP
#define UDSOLVE_REBALANCE_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "udsolve/bp.hpp"
#include "udsolve/instance.hpp"
#include "udsolve/oracle.hpp"
#include "udsolve/verify.hpp"

namespace udsolve {

enum class Termination { residual, fixed_T };
enum class Step1Backend { oracle, bp };

struct SolveConfig {
  double kappa = 0.5;    // damping factor, in (0, 1/2]
  double epsilon = 0.0;  // division-residual target, > 0
  Termination termination = Termination::residual;
  std::optional<long long> max_iters;  // overrides the step-2 iteration cap
  Step1Backend step1_backend = Step1Backend::oracle;
  double tol_eq = kTolEq;
  double delta = 1e-12;  // BP fixed-point snap
  OracleOptions oracle;
};

namespace rebalance_detail {

inline void require_allocation(const Instance& inst, const Matching& matching,
                               const Allocation& gamma, double tol,
                               bool allow_negative) {
  if (gamma.size() != static_cast<std::size_t>(inst.node_count()) + 1) {
    throw std::invalid_argument("allocation has wrong length");
  }
  for (int i = 1; i <= inst.node_count(); ++i) {
    const double g = gamma[static_cast<std::size_t>(i)];
    if (!std::isfinite(g)) {
      throw std::invalid_argument("allocation entry not finite");
    }
    if (matching.partner(i) == 0) {
      if (std::abs(g) > tol) {
        throw std::invalid_argument("unmatched node " + std::to_string(i) +
                                    " earns nonzero");
      }
    } else if (!allow_negative && g < -tol) {
      throw std::invalid_argument("allocation entry negative at node " +
                                  std::to_string(i));
    }
  }
  for (const auto& [u, v] : matching.pairs()) {
    const int idx = inst.find_edge(u, v);
    if (idx < 0) {
      throw std::invalid_argument("matched edge not in instance");
    }
    const double w = inst.edges()[static_cast<std::size_t>(idx)].weight;
    if (std::abs(gamma[static_cast<std::size_t>(u)] +
                 gamma[static_cast<std::size_t>(v)] - w) > tol) {
      throw std::invalid_argument("matched sum differs from weight on edge (" +
                                  std::to_string(u) + ", " +
                                  std::to_string(v) + ")");
    }
  }
}

/// T^reb without input validation. The partner entry is written as the
/// complement w - out_u, so matched sums stay within one rounding of the
/// weight and never drift across iterations.
inline void rebalance_core(const Instance& inst, const Matching& matching,
                           const Allocation& gamma, Allocation& out) {
  out.assign(gamma.size(), 0.0);
  for (const auto& [u, v] : matching.pairs()) {
    const int idx = inst.find_edge(u, v);
    const Edge& e = inst.edges()[static_cast<std::size_t>(idx)];
    const double alt_u = best_alternative(inst, gamma, u, v);
    const double alt_v = best_alternative(inst, gamma, v, u);
    const double surp = e.weight - alt_u - alt_v;
    const double out_u = alt_u + e.split * surp;
    out[static_cast<std::size_t>(u)] = out_u;
    out[static_cast<std::size_t>(v)] = e.weight - out_u;
  }
}

/// T^thr in place; returns the sup-norm size of the applied correction.
inline double threshold_core(const Instance& inst, const Matching& matching,
                             Allocation& gamma) {
  double correction = 0.0;
  for (const auto& [u, v] : matching.pairs()) {
    const int idx = inst.find_edge(u, v);
    const double w = inst.edges()[static_cast<std::size_t>(idx)].weight;
    double& gu = gamma[static_cast<std::size_t>(u)];
    double& gv = gamma[static_cast<std::size_t>(v)];
    if (gu < 0.0 && gv < 0.0) {
      throw std::logic_error("threshold: both endpoints negative on edge (" +
                             std::to_string(u) + ", " + std::to_string(v) +
                             ")");
    }
    if (gu < 0.0) {
      correction = std::max(correction, -gu);
      gu = 0.0;
      gv = w;
    } else if (gv < 0.0) {
      correction = std::max(correction, -gv);
      gu = w;
      gv = 0.0;
    }
  }
  return correction;
}

}  // namespace rebalance_detail

/// Rebalancing operator T^reb: each matched endpoint gets its best
/// alternative plus its split share of the edge surplus; unmatched nodes go
/// to zero. One endpoint per matched edge may come out negative when the
/// input is not stable. Throws if `gamma` is not an allocation for `matching`.
inline Allocation rebalance_op(const Instance& inst, const Matching& matching,
                               const Allocation& gamma, double tol = kTolEq) {
  rebalance_detail::require_allocation(inst, matching, gamma, tol,
                                       /*allow_negative=*/false);
  Allocation out;
  rebalance_detail::rebalance_core(inst, matching, gamma, out);
  return out;
}

/// Thresholding operator T^thr: a negative matched endpoint is clamped to 0
/// and its partner takes the whole edge weight; everything else passes
/// through. Restores non-negativity while keeping matched sums exact.
inline Allocation threshold_op(const Instance& inst, const Matching& matching,
                               const Allocation& gamma_ext,
                               double tol = kTolEq) {
  rebalance_detail::require_allocation(inst, matching, gamma_ext, tol,
                                       /*allow_negative=*/true);
  Allocation out = gamma_ext;
  for (int i = 1; i <= inst.node_count(); ++i) {
    if (matching.partner(i) == 0) out[static_cast<std::size_t>(i)] = 0.0;
  }
  rebalance_detail::threshold_core(inst, matching, out);
  return out;
}

/// Step-2 iteration cap from the nonexpansive-iteration rate: with weights
/// rescaled to (0, 1] the damped iteration needs at most
/// ceil(1 / (pi kappa (1-kappa) (epsilon/W)^2)) iterations.
inline long long rebalance_iteration_cap(const Instance& inst,
                                         const SolveConfig& cfg) {
  const double eps_norm = cfg.epsilon / inst.weight_bound();
  const double bound = std::ceil(
      1.0 / (std::numbers::pi * cfg.kappa * (1.0 - cfg.kappa) * eps_norm *
             eps_norm));
  if (!(bound < 9.0e18)) {
    throw std::invalid_argument(
        "epsilon too small: iteration cap exceeds 2^63");
  }
  return static_cast<long long>(bound);
}

/// One damped-iteration snapshot, observed before the update is applied.
struct RebalanceStep {
  long long t = 0;
  const Allocation& gamma;  // current iterate
  const Matching& matching;
  double residual = 0.0;              // sup |T^reb gamma - gamma|
  double threshold_correction = 0.0;  // sup |T^thr T^reb g - T^reb g|
};

using IterationObserver = std::function<void(const RebalanceStep&)>;

namespace rebalance_detail {

struct LoopResult {
  Allocation gamma;
  long long iterations = 0;
  std::vector<double> trace;
  bool reached_residual = false;
};

/// Damped Mann iteration gamma <- kappa T(gamma) + (1-kappa) gamma with
/// T = T^thr after T^reb. No stability precondition is enforced here;
/// public entry points do that.
inline LoopResult damped_loop(const Instance& inst, const Matching& matching,
                              Allocation gamma, double kappa,
                              bool stop_on_residual, double eps,
                              long long cap,
                              const IterationObserver& observer) {
  LoopResult result;
  Allocation reb;
  long long t = 0;
  while (true) {
    rebalance_core(inst, matching, gamma, reb);
    double residual = 0.0;
    for (std::size_t i = 1; i < gamma.size(); ++i) {
      residual = std::max(residual, std::abs(reb[i] - gamma[i]));
    }
    const double correction = threshold_core(inst, matching, reb);
    result.trace.push_back(residual);
    if (observer) observer({t, gamma, matching, residual, correction});
    if (stop_on_residual && residual <= eps) {
      result.reached_residual = true;
      break;
    }
    if (t >= cap) break;
    for (std::size_t i = 1; i < gamma.size(); ++i) {
      gamma[i] = kappa * reb[i] + (1.0 - kappa) * gamma[i];
    }
    ++t;
  }
  result.gamma = std::move(gamma);
  result.iterations = t;
  return result;
}

inline void check_config(const SolveConfig& cfg) {
  if (!(cfg.kappa > 0.0) || !(cfg.kappa <= 0.5)) {
    throw std::invalid_argument("kappa must lie in (0, 1/2]");
  }
  if (!(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
}

inline void check_stable_start(const Instance& inst, const Outcome& start,
                               double tol) {
  validate_outcome(inst, start, tol);
  const ViolationReport report = check_stability(inst, start, tol);
  if (!report.stability_violations.empty()) {
    throw std::invalid_argument(
        "start outcome is not stable (first deficit " +
        std::to_string(report.stability_violations.front().deficit) +
        " on edge (" +
        std::to_string(report.stability_violations.front().u) + ", " +
        std::to_string(report.stability_violations.front().v) + "))");
  }
}

}  // namespace rebalance_detail

struct RebalanceResult {
  Outcome outcome;
  long long iterations = 0;
  std::vector<double> trace;  // residual at t = 0 .. iterations
};

/// Damped edge rebalancing from a stable outcome. In residual mode the loop
/// stops at the first iterate whose division residual is <= epsilon; in
/// fixed_T mode it runs for the full cap. Either way the result is stable
/// and satisfies epsilon-correct division, and the iteration count never
/// exceeds rebalance_iteration_cap (or the configured override).
inline RebalanceResult edge_rebalancing(const Instance& inst,
                                        const Outcome& start,
                                        const SolveConfig& cfg,
                                        const IterationObserver& observer = {}) {
  rebalance_detail::check_config(cfg);
  rebalance_detail::check_stable_start(inst, start, cfg.tol_eq);
  const long long cap =
      cfg.max_iters ? *cfg.max_iters : rebalance_iteration_cap(inst, cfg);
  auto loop = rebalance_detail::damped_loop(
      inst, start.matching, start.gamma, cfg.kappa,
      cfg.termination == Termination::residual, cfg.epsilon, cap, observer);
  RebalanceResult result;
  result.outcome = Outcome{std::move(loop.gamma), start.matching};
  result.iterations = loop.iterations;
  result.trace = std::move(loop.trace);
  return result;
}

struct ExactIterationResult {
  Outcome outcome;
  long long iterations = 0;
  std::vector<double> trace;
  bool reached_tol = false;  // false: max_iters hit first, best iterate kept
};

/// Runs the same damped iteration without the epsilon stop, halting at
/// residual <= tol or after max_iters. Diagnostic mode for approximating
/// the exact fixed point.
inline ExactIterationResult iterate_to_exact(const Instance& inst,
                                             const Outcome& start,
                                             double kappa, long long max_iters,
                                             double tol) {
  if (!(kappa > 0.0) || !(kappa <= 0.5)) {
    throw std::invalid_argument("kappa must lie in (0, 1/2]");
  }
  rebalance_detail::check_stable_start(inst, start, kTolEq);
  auto loop = rebalance_detail::damped_loop(inst, start.matching, start.gamma,
                                            kappa, /*stop_on_residual=*/true,
                                            tol, max_iters, {});
  ExactIterationResult result;
  result.outcome = Outcome{std::move(loop.gamma), start.matching};
  result.iterations = loop.iterations;
  result.trace = std::move(loop.trace);
  result.reached_tol = loop.reached_residual;
  return result;
}

enum class SolveStatus { solved, unstable, step1_inconclusive };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::solved:
      return "SOLVED";
    case SolveStatus::unstable:
      return "UNSTABLE";
    case SolveStatus::step1_inconclusive:
      return "STEP1_INCONCLUSIVE";
  }
  return "?";
}

struct SolveCertificates {
  double matching_weight = std::numeric_limits<double>::quiet_NaN();
  double dual_value = std::numeric_limits<double>::quiet_NaN();
  double fractional_lp_value = std::numeric_limits<double>::quiet_NaN();
  int step1_iterations = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::step1_inconclusive;
  std::optional<Outcome> outcome;  // present iff status == solved
  long long iterations_step2 = 0;
  std::vector<double> trace;
  SolveCertificates certificates;
  std::string diagnostic;
};

/// Two-step solve: find a maximum-weight matching and a dual optimum (a
/// stable outcome), then rebalance it to an epsilon-UD solution.
///
/// The oracle backend enumerates exactly and can certify UNSTABLE when the
/// fractional LP beats every matching. The bp backend runs max-product BP
/// from zero; when BP does not converge it cannot tell a fractional optimum
/// from a non-unique one and reports STEP1_INCONCLUSIVE.
///
/// Weights are handled in original units; the step-2 iteration cap uses
/// epsilon/W, which matches rescaling weights and epsilon by 1/W.
inline SolveResult solve(const Instance& inst, const SolveConfig& cfg,
                         const IterationObserver& observer = {}) {
  rebalance_detail::check_config(cfg);
  SolveResult result;
  Outcome start;
  if (cfg.step1_backend == Step1Backend::oracle) {
    const MwmResult mwm = brute_force_mwm(inst, cfg.oracle);
    const FractionalOptimum frac = fractional_lp_optimum(inst, cfg.oracle);
    result.certificates.matching_weight = mwm.weight;
    result.certificates.fractional_lp_value = frac.value;
    if (frac.value > mwm.weight + cfg.oracle.tol_eq) {
      result.status = SolveStatus::unstable;
      result.diagnostic = "fractional LP optimum " +
                          std::to_string(frac.value) +
                          " exceeds best matching weight " +
                          std::to_string(mwm.weight) +
                          "; no stable outcome exists";
      return result;
    }
    const Matching& matching = mwm.optimal.front();
    BpOptions bp_opts;
    bp_opts.delta = cfg.delta;
    bp_opts.tol_eq = cfg.tol_eq;
    const BpResult seeded = run_algorithm_a(inst, matching, bp_opts);
    if (!seeded.matching || !seeded.dual) {
      throw std::logic_error(
          "matching-seeded BP failed on an instance with an integral "
          "optimum: " +
          seeded.diagnostic);
    }
    result.certificates.step1_iterations = seeded.iterations;
    start = Outcome{*seeded.dual, *seeded.matching};
  } else {
    BpOptions bp_opts;
    bp_opts.delta = cfg.delta;
    bp_opts.tol_eq = cfg.tol_eq;
    const BpResult bp = run_bp_mwm(inst, bp_opts);
    result.certificates.step1_iterations = bp.iterations;
    if (!bp.matching || !bp.dual) {
      result.status = SolveStatus::step1_inconclusive;
      result.diagnostic = bp.diagnostic;
      return result;
    }
    start = Outcome{*bp.dual, *bp.matching};
    const ViolationReport stability =
        check_stability(inst, start, cfg.tol_eq);
    if (!stability.stability_violations.empty()) {
      result.status = SolveStatus::step1_inconclusive;
      result.diagnostic = "BP dual outcome is not stable";
      return result;
    }
    result.certificates.matching_weight = bp.matching->weight(inst);
  }
  {
    double dual_sum = 0.0;
    for (std::size_t i = 1; i < start.gamma.size(); ++i) {
      dual_sum += start.gamma[i];
    }
    result.certificates.dual_value = dual_sum;
  }
  RebalanceResult reb = edge_rebalancing(inst, start, cfg, observer);
  if (reb.trace.back() > cfg.epsilon) {
    // Only reachable when a max_iters override cuts the schedule short;
    // the default cap always suffices.
    throw std::invalid_argument(
        "max_iters override stopped rebalancing before the residual "
        "reached epsilon");
  }
  result.status = SolveStatus::solved;
  result.outcome = std::move(reb.outcome);
  result.iterations_step2 = reb.iterations;
  result.trace = std::move(reb.trace);
  return result;
}

}  // namespace udsolve

#endif  // UDSOLVE_REBALANCE_HPP
