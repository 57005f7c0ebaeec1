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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "udsolve/udsolve.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomainFailure = 1;  // UNSTABLE, failed verification, ...
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

using udsolve::io_detail::format_real;

udsolve::Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open instance file " + path);
  return udsolve::parse_instance(in);
}

udsolve::Outcome load_outcome(const std::string& path,
                              const udsolve::Instance& inst) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open outcome file " + path);
  return udsolve::parse_outcome(in, inst);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw CLI::ValidationError("cannot write file " + path);
  out << text;
}

void write_trace_csv(const std::string& path,
                     const std::vector<double>& trace) {
  std::string csv = "t,residual\n";
  for (std::size_t t = 0; t < trace.size(); ++t) {
    csv += std::to_string(t) + "," + format_real(trace[t]) + "\n";
  }
  write_file(path, csv);
}

struct SolveArgs {
  std::string instance_path;
  double epsilon = 1e-6;
  double kappa = 0.5;
  std::string backend = "oracle";
  std::string termination = "residual";
  std::optional<long long> max_iters;
  std::string trace_path;
  std::string output_path;
};

int run_solve(const SolveArgs& args) {
  udsolve::Instance inst = load_instance(args.instance_path);
  udsolve::SolveConfig cfg;
  cfg.epsilon = args.epsilon;
  cfg.kappa = args.kappa;
  cfg.step1_backend = args.backend == "bp" ? udsolve::Step1Backend::bp
                                           : udsolve::Step1Backend::oracle;
  cfg.termination = args.termination == "fixed"
                        ? udsolve::Termination::fixed_T
                        : udsolve::Termination::residual;
  cfg.max_iters = args.max_iters;
  udsolve::SolveResult result = udsolve::solve(inst, cfg);
  std::cout << "# solve status " << udsolve::to_string(result.status) << "\n";
  std::cout << "# step1-iterations " << result.certificates.step1_iterations
            << "\n";
  std::cout << "# matching-weight "
            << format_real(result.certificates.matching_weight) << "\n";
  std::cout << "# dual-value " << format_real(result.certificates.dual_value)
            << "\n";
  std::cout << "# fractional-lp "
            << format_real(result.certificates.fractional_lp_value) << "\n";
  if (!args.trace_path.empty()) write_trace_csv(args.trace_path, result.trace);
  if (result.status != udsolve::SolveStatus::solved) {
    std::cout << "# diagnostic " << result.diagnostic << "\n";
    return kExitDomainFailure;
  }
  std::cout << "# step2-iterations " << result.iterations_step2 << "\n";
  std::cout << "# residual " << format_real(result.trace.back()) << "\n";
  const std::string text = udsolve::serialize_outcome(inst, *result.outcome);
  if (!args.output_path.empty()) {
    write_file(args.output_path, text);
  }
  std::cout << text;
  return kExitOk;
}

struct VerifyArgs {
  std::string instance_path;
  std::string outcome_path;
  double epsilon = 1e-6;
  double tol = udsolve::kTolEq;
};

int run_verify(const VerifyArgs& args) {
  udsolve::Instance inst = load_instance(args.instance_path);
  udsolve::Outcome out = load_outcome(args.outcome_path, inst);
  udsolve::validate_outcome(inst, out, args.tol);
  udsolve::ViolationReport report =
      udsolve::verify_outcome(inst, out, args.tol);
  for (const auto& v : report.stability_violations) {
    std::cout << "stability-violation " << v.u << " " << v.v << " deficit "
              << format_real(v.deficit) << "\n";
  }
  for (const auto& o : report.offers_to_unmatched) {
    std::cout << "offer-to-unmatched " << o.node << " from " << o.from
              << " amount " << format_real(o.offer) << "\n";
  }
  for (const auto& d : report.division_residuals) {
    std::cout << "division-residual " << d.u << " " << d.v << " "
              << format_real(d.residual) << "\n";
  }
  std::cout << "max-deficit " << format_real(report.max_deficit) << "\n";
  std::cout << "max-residual " << format_real(report.max_residual) << "\n";
  const bool ok = report.stability_violations.empty() &&
                  report.max_residual <= args.epsilon;
  std::cout << "verdict " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kExitOk : kExitDomainFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Solver for bargaining networks with unequal bargaining powers: "
      "computes eps-UD solutions, detects UNSTABLE instances, verifies "
      "outcomes, and generates benchmark instances."};
  app.require_subcommand(1);

  // --- solve ---
  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand(
      "solve", "Compute an eps-UD solution or report UNSTABLE");
  solve->add_option("instance", solve_args.instance_path, "instance file")
      ->required();
  solve->add_option("--epsilon", solve_args.epsilon,
                    "division residual target");
  solve->add_option("--kappa", solve_args.kappa, "damping factor in (0, 1/2]");
  solve->add_option("--backend", solve_args.backend, "step-1 backend")
      ->check(CLI::IsMember({"oracle", "bp"}));
  solve->add_option("--termination", solve_args.termination,
                    "step-2 stopping rule")
      ->check(CLI::IsMember({"residual", "fixed"}));
  long long solve_max_iters = -1;
  solve->add_option("--max-iters", solve_max_iters,
                    "override the step-2 iteration cap");
  solve->add_option("--trace", solve_args.trace_path,
                    "write per-iteration residuals as CSV");
  solve->add_option("--output", solve_args.output_path,
                    "write the outcome file here as well as stdout");

  // --- verify ---
  VerifyArgs verify_args;
  CLI::App* verify =
      app.add_subcommand("verify", "Check stability and division residuals");
  verify->add_option("instance", verify_args.instance_path, "instance file")
      ->required();
  verify->add_option("outcome", verify_args.outcome_path, "outcome file")
      ->required();
  verify->add_option("--epsilon", verify_args.epsilon,
                     "largest acceptable division residual");
  verify->add_option("--tol", verify_args.tol, "stability tolerance");

  // --- generate ---
  CLI::App* generate =
      app.add_subcommand("generate", "Write benchmark instances");
  generate->require_subcommand(1);
  int ring_sections = 2;
  double ring_r = 1.0 / 3.0;
  int ring_pad = 0;
  std::string gen_instance_path;
  std::string gen_outcome_path;
  CLI::App* ring = generate->add_subcommand(
      "ring", "Ring whose bad outcome makes rebalancing crawl");
  ring->add_option("--N", ring_sections, "ring sections; 8N nodes")
      ->required();
  ring->add_option("--r", ring_r, "split fraction in (0, 1/2)")->required();
  ring->add_option("--pad", ring_pad,
                   "append floor(pad/2) dummy matched edges");
  ring->add_option("--instance", gen_instance_path,
                   "write the instance here (default stdout)");
  ring->add_option("--outcome", gen_outcome_path,
                   "write the bad outcome here");

  udsolve::BipartiteConfig bip_cfg;
  std::string bip_instance_path;
  CLI::App* bipartite = generate->add_subcommand(
      "bipartite", "Seeded random bipartite instance");
  bipartite->add_option("--left", bip_cfg.n_left, "left side size")
      ->required();
  bipartite->add_option("--right", bip_cfg.n_right, "right side size")
      ->required();
  bipartite->add_option("--density", bip_cfg.density, "edge probability");
  bipartite->add_option("--max-weight", bip_cfg.max_weight,
                        "weights drawn from (0, max]");
  std::uint64_t bip_seed = 0;
  bipartite->add_option("--seed", bip_seed, "RNG seed")->required();
  bipartite->add_option("--split-min", bip_cfg.split_min,
                        "lower end of the split range");
  bipartite->add_option("--split-max", bip_cfg.split_max,
                        "upper end of the split range");
  bipartite->add_option("--instance", bip_instance_path,
                        "write the instance here (default stdout)");

  // --- bp ---
  std::string bp_instance_path;
  std::string bp_init = "zero";
  std::string bp_matching_path;
  std::string bp_outcome_path;
  int bp_max_iters = 0;
  double bp_delta = 1e-12;
  CLI::App* bp = app.add_subcommand(
      "bp", "Max-product matching BP: fixed point, matching, dual");
  bp->add_option("instance", bp_instance_path, "instance file")->required();
  bp->add_option("--init", bp_init, "message initialization")
      ->check(CLI::IsMember({"zero", "matching"}));
  bp->add_option("--matching", bp_matching_path,
                 "matching file (required with --init matching)");
  bp->add_option("--max-iters", bp_max_iters,
                 "iteration cap for --init zero (default heuristic)");
  bp->add_option("--delta", bp_delta, "fixed-point snap tolerance");
  bp->add_option("--outcome", bp_outcome_path,
                 "write (dual, matching) as an outcome file");

  // --- gap ---
  std::string gap_instance_path;
  CLI::App* gap = app.add_subcommand(
      "gap", "LP gap between the two heaviest matching-polytope corners");
  gap->add_option("instance", gap_instance_path, "instance file")->required();

  // --- check ---
  std::string check_instance_path;
  std::string check_outcome_path;
  double check_tol = udsolve::kTolEq;
  CLI::App* check =
      app.add_subcommand("check", "Exact UD-solution check at a tolerance");
  check->add_option("instance", check_instance_path, "instance file")
      ->required();
  check->add_option("outcome", check_outcome_path, "outcome file")->required();
  check->add_option("--tol", check_tol, "tolerance");

  // --- demo-slow ---
  udsolve::SlowDemoConfig demo_cfg;
  std::string demo_trace_path;
  CLI::App* demo = app.add_subcommand(
      "demo-slow",
      "Iterate from the ring's unstable outcome and measure the crawl");
  demo->add_option("--N", demo_cfg.sections, "ring sections; 8N nodes")
      ->required();
  demo->add_option("--r", demo_cfg.r, "split fraction in (0, 1/2)")
      ->required();
  demo->add_option("--kappa", demo_cfg.kappa, "damping factor");
  demo->add_option("--max-iters", demo_cfg.max_iters, "iteration cap");
  demo->add_option("--trace", demo_trace_path,
                   "write the bad-edge deficit per iteration as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) {
      if (solve_max_iters >= 0) solve_args.max_iters = solve_max_iters;
      return run_solve(solve_args);
    }
    if (*verify) {
      return run_verify(verify_args);
    }
    if (*ring) {
      udsolve::RingInstance r =
          udsolve::generate_ring(ring_sections, ring_r, ring_pad);
      const std::string instance_text = udsolve::serialize_instance(r.instance);
      const std::string outcome_text =
          udsolve::serialize_outcome(r.instance, r.bad_outcome);
      std::cout << "# ring N " << ring_sections << " nodes "
                << r.instance.node_count() << "\n";
      std::cout << "# weight-bound "
                << format_real(r.instance.weight_bound()) << "\n";
      std::cout << "# eps-prime " << format_real(r.eps_prime) << "\n";
      std::cout << "# bad-edge " << r.bad_edge.first << " "
                << r.bad_edge.second << "\n";
      if (gen_instance_path.empty()) {
        std::cout << instance_text;
      } else {
        write_file(gen_instance_path, instance_text);
      }
      if (!gen_outcome_path.empty()) {
        write_file(gen_outcome_path, outcome_text);
      }
      return kExitOk;
    }
    if (*bipartite) {
      bip_cfg.seed = bip_seed;
      udsolve::Instance inst = udsolve::generate_random_bipartite(bip_cfg);
      const std::string text = udsolve::serialize_instance(inst);
      std::cout << "# bipartite left " << bip_cfg.n_left << " right "
                << bip_cfg.n_right << " seed " << bip_cfg.seed << " edges "
                << inst.edges().size() << "\n";
      if (bip_instance_path.empty()) {
        std::cout << text;
      } else {
        write_file(bip_instance_path, text);
      }
      return kExitOk;
    }
    if (*bp) {
      udsolve::Instance inst = load_instance(bp_instance_path);
      udsolve::BpOptions opts;
      opts.max_iters = bp_max_iters;
      opts.delta = bp_delta;
      udsolve::BpResult result;
      if (bp_init == "matching") {
        if (bp_matching_path.empty()) {
          throw CLI::ValidationError("--init matching requires --matching");
        }
        std::ifstream min(bp_matching_path);
        if (!min) {
          throw CLI::ValidationError("cannot open matching file " +
                                     bp_matching_path);
        }
        udsolve::Matching matching =
            udsolve::Matching::of(inst, udsolve::parse_matching_pairs(min));
        result = udsolve::run_algorithm_a(inst, matching, opts);
      } else {
        result = udsolve::run_bp_mwm(inst, opts);
      }
      std::cout << "# bp converged " << (result.converged ? 1 : 0)
                << " iterations " << result.iterations << "\n";
      if (!result.diagnostic.empty()) {
        std::cout << "# diagnostic " << result.diagnostic << "\n";
      }
      for (const udsolve::Edge& e : inst.edges()) {
        std::cout << "message " << e.u << " " << e.v << " "
                  << format_real(result.fixed_point.at(inst, e.u, e.v))
                  << "\n";
        std::cout << "message " << e.v << " " << e.u << " "
                  << format_real(result.fixed_point.at(inst, e.v, e.u))
                  << "\n";
      }
      if (result.matching && result.dual) {
        const udsolve::Outcome outcome{*result.dual, *result.matching};
        const std::string text = udsolve::serialize_outcome(inst, outcome);
        std::cout << text;
        if (!bp_outcome_path.empty()) write_file(bp_outcome_path, text);
        return kExitOk;
      }
      return kExitDomainFailure;
    }
    if (*gap) {
      udsolve::Instance inst = load_instance(gap_instance_path);
      udsolve::GapReport report = udsolve::lp_gap(inst);
      std::cout << "best " << format_real(report.best_matching_weight) << "\n";
      std::cout << "second-best "
                << format_real(report.second_best_corner_weight) << "\n";
      std::cout << "gap " << format_real(report.gap) << "\n";
      std::cout << "unique " << (report.tie ? "false" : "true") << "\n";
      if (report.degenerate) std::cout << "degenerate true\n";
      return kExitOk;
    }
    if (*check) {
      udsolve::Instance inst = load_instance(check_instance_path);
      udsolve::Outcome out = load_outcome(check_outcome_path, inst);
      udsolve::validate_outcome(inst, out, check_tol);
      const bool ok = udsolve::exact_ud_check(inst, out, check_tol);
      std::cout << "ud-check " << (ok ? "PASS" : "FAIL") << " tol "
                << format_real(check_tol) << "\n";
      return ok ? kExitOk : kExitDomainFailure;
    }
    if (*demo) {
      std::cerr << "WARNING: demo-slow iterates from an UNSTABLE outcome, "
                   "skipping the stability precondition on purpose to "
                   "reproduce the slow-convergence lower bound.\n";
      udsolve::SlowDemoReport report = udsolve::run_slow_demo(demo_cfg);
      std::cout << "nodes " << report.instance.node_count() << "\n";
      std::cout << "weight-bound " << format_real(report.weight_bound) << "\n";
      std::cout << "eps-prime " << format_real(report.eps_prime) << "\n";
      std::cout << "lower-bound " << report.lower_bound << "\n";
      std::cout << "bad-edge " << report.bad_edge.first << " "
                << report.bad_edge.second << "\n";
      std::cout << "initial-deficit " << format_real(report.initial_deficit)
                << "\n";
      std::cout << "max-step-change " << format_real(report.max_step_change)
                << "\n";
      std::cout << "iterations-run " << report.iterations_run << "\n";
      std::cout << "first-half-stable " << report.first_half_stable << "\n";
      if (!demo_trace_path.empty()) {
        std::string csv = "t,bad_edge_deficit\n";
        for (std::size_t t = 0; t < report.deficit_trace.size(); ++t) {
          csv += std::to_string(t) + "," +
                 format_real(report.deficit_trace[t]) + "\n";
        }
        write_file(demo_trace_path, csv);
      }
      return report.first_half_stable >= 0 ? kExitOk : kExitDomainFailure;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const udsolve::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
