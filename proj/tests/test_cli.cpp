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

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "udsolve/instance.hpp"
#include "udsolve/io.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

class Workspace {
 public:
  Workspace() {
    dir_ = fs::temp_directory_path() /
           ("udsolve_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  fs::path dir() const { return dir_; }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream f(p);
    f << text;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  CliRun run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(UDSOLVE_CLI_PATH) + " " + args +
                            " >" + out.string() + " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    CliRun r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

 private:
  fs::path dir_;
};

const std::string kPathInstance =
    "nodes 3\nedge 1 2 1.0 0.5\nedge 2 3 0.6 0.5\n";
const std::string kSingleEdgeInstance = "nodes 2\nedge 1 2 1.0 0.3\n";
const std::string kTriangleInstance =
    "nodes 3\nedge 1 2 1 0.5\nedge 2 3 1 0.5\nedge 1 3 1 0.5\n";

/// Value of the first `key <number>` line (possibly '#'-prefixed).
double parse_report_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string trimmed = line;
    if (!trimmed.empty() && trimmed[0] == '#') trimmed = trimmed.substr(1);
    while (!trimmed.empty() && trimmed.front() == ' ') {
      trimmed = trimmed.substr(1);
    }
    if (trimmed.rfind(key + " ", 0) == 0) {
      return std::stod(trimmed.substr(key.size() + 1));
    }
  }
  FAIL("report key not found: " << key);
  return 0.0;
}

}  // namespace

TEST_CASE("cli solve writes a parseable eps-UD outcome") {
  Workspace ws;
  const auto inst_path = ws.write("path.txt", kPathInstance);
  const auto out_path = ws.dir() / "outcome.txt";
  const CliRun r = ws.run("solve --epsilon 1e-4 --output " +
                          out_path.string() + " " + inst_path.string());
  REQUIRE(r.exit_code == 0);
  CHECK_THAT(r.out, ContainsSubstring("# solve status SOLVED"));

  // stdout itself parses as an outcome file (comments are skipped).
  const udsolve::Instance inst = udsolve::parse_instance_text(kPathInstance);
  const udsolve::Outcome from_stdout =
      udsolve::parse_outcome_text(r.out, inst);
  CHECK_THAT(from_stdout.gamma[1], WithinAbs(0.2, 1e-4));
  CHECK_THAT(from_stdout.gamma[2], WithinAbs(0.8, 1e-4));
  CHECK(from_stdout.matching.contains(1, 2));

  const udsolve::Outcome from_file =
      udsolve::parse_outcome_text(Workspace::slurp(out_path), inst);
  CHECK(from_file == from_stdout);
}

TEST_CASE("cli solve reports UNSTABLE with exit 1") {
  Workspace ws;
  const auto inst_path = ws.write("triangle.txt", kTriangleInstance);
  const CliRun r = ws.run("solve --epsilon 1e-4 " + inst_path.string());
  CHECK(r.exit_code == 1);
  CHECK_THAT(r.out, ContainsSubstring("UNSTABLE"));
}

TEST_CASE("cli solve writes a residual trace CSV") {
  Workspace ws;
  // r = 0.3 makes step 2 work: the dual start (0.5, 0.5) must drift to the
  // correct division (0.3, 0.7), halving the residual every iteration.
  const auto inst_path = ws.write("edge.txt", kSingleEdgeInstance);
  const auto trace_path = ws.dir() / "trace.csv";
  const CliRun r = ws.run("solve --epsilon 1e-3 --trace " +
                          trace_path.string() + " " + inst_path.string());
  REQUIRE(r.exit_code == 0);
  const std::string csv = Workspace::slurp(trace_path);
  CHECK_THAT(csv, ContainsSubstring("t,residual\n0,0.2\n"));
  // One row per iterate, residuals halving each step.
  std::istringstream rows(csv);
  std::string row;
  std::getline(rows, row);
  double prev = -1.0;
  int count = 0;
  while (std::getline(rows, row)) {
    const double value = std::stod(row.substr(row.find(',') + 1));
    if (prev >= 0.0) CHECK_THAT(value, WithinAbs(prev / 2.0, 1e-12));
    prev = value;
    ++count;
  }
  CHECK(count == 9);  // residual 0.2 * 2^-t crosses 1e-3 at t = 8
  const udsolve::Instance inst =
      udsolve::parse_instance_text(kSingleEdgeInstance);
  const udsolve::Outcome out = udsolve::parse_outcome_text(r.out, inst);
  CHECK_THAT(out.gamma[1], WithinAbs(0.3, 1e-3));
}

TEST_CASE("cli solve supports the fixed termination schedule") {
  Workspace ws;
  const auto inst_path = ws.write("edge.txt", kSingleEdgeInstance);
  const CliRun r = ws.run("solve --epsilon 0.05 --termination fixed " +
                          inst_path.string());
  REQUIRE(r.exit_code == 0);
  // ceil(1 / (pi * 1/4 * 0.05^2)) damped iterations, residual-blind.
  CHECK_THAT(r.out, ContainsSubstring("# step2-iterations 510"));
}

TEST_CASE("cli verify separates clean from violating outcomes") {
  Workspace ws;
  const auto inst_path = ws.write("path.txt", kPathInstance);
  const auto good = ws.write(
      "good.txt", "match 1 2\ngamma 1 0.2\ngamma 2 0.8\ngamma 3 0\n");
  const CliRun ok =
      ws.run("verify " + inst_path.string() + " " + good.string());
  CHECK(ok.exit_code == 0);
  CHECK_THAT(ok.out, ContainsSubstring("verdict PASS"));
  CHECK_THAT(ok.out, ContainsSubstring("max-deficit 0"));

  const auto bad = ws.write(
      "bad.txt", "match 1 2\ngamma 1 0.5\ngamma 2 0.5\ngamma 3 0\n");
  const CliRun fail =
      ws.run("verify " + inst_path.string() + " " + bad.string());
  CHECK(fail.exit_code == 1);
  CHECK_THAT(fail.out, ContainsSubstring("stability-violation 2 3"));
  CHECK_THAT(fail.out, ContainsSubstring("verdict FAIL"));
}

TEST_CASE("cli check runs the exact UD test") {
  Workspace ws;
  const auto inst_path = ws.write("path.txt", kPathInstance);
  const auto exact = ws.write(
      "e.txt", "match 1 2\ngamma 1 0.2\ngamma 2 0.8\ngamma 3 0\n");
  CHECK(ws.run("check " + inst_path.string() + " " + exact.string())
            .exit_code == 0);
  const auto off = ws.write(
      "o.txt", "match 1 2\ngamma 1 0.3\ngamma 2 0.7\ngamma 3 0\n");
  const CliRun r = ws.run("check " + inst_path.string() + " " + off.string());
  CHECK(r.exit_code == 1);
  CHECK_THAT(r.out, ContainsSubstring("ud-check FAIL"));
}

TEST_CASE("cli gap prints the corner weights") {
  Workspace ws;
  const auto inst_path = ws.write("path.txt", kPathInstance);
  const CliRun r = ws.run("gap " + inst_path.string());
  REQUIRE(r.exit_code == 0);
  CHECK_THAT(r.out, ContainsSubstring("best 1\n"));
  CHECK_THAT(r.out, ContainsSubstring("second-best 0.6\n"));
  CHECK_THAT(r.out, ContainsSubstring("gap 0.4\n"));
  CHECK_THAT(r.out, ContainsSubstring("unique true"));
}

TEST_CASE("cli bp supports both initializations") {
  Workspace ws;
  const auto inst_path = ws.write("path.txt", kPathInstance);
  const auto out_path = ws.dir() / "bp_outcome.txt";
  const CliRun zero = ws.run("bp --outcome " + out_path.string() + " " +
                             inst_path.string());
  REQUIRE(zero.exit_code == 0);
  CHECK_THAT(zero.out, ContainsSubstring("# bp converged 1 iterations 2"));
  CHECK_THAT(zero.out, ContainsSubstring("message 1 2 1\n"));
  CHECK_THAT(zero.out, ContainsSubstring("message 2 1 0.4\n"));

  const udsolve::Instance inst = udsolve::parse_instance_text(kPathInstance);
  const udsolve::Outcome out =
      udsolve::parse_outcome_text(Workspace::slurp(out_path), inst);
  CHECK_THAT(out.gamma[2], WithinAbs(0.8, 1e-12));

  const auto matching_path = ws.write("matching.txt", "match 1 2\n");
  const CliRun seeded =
      ws.run("bp --init matching --matching " + matching_path.string() + " " +
             inst_path.string());
  REQUIRE(seeded.exit_code == 0);
  CHECK_THAT(seeded.out, ContainsSubstring("gamma 2 0.8"));

  const CliRun missing =
      ws.run("bp --init matching " + inst_path.string());
  CHECK(missing.exit_code == 2);
}

TEST_CASE("cli bp flags the fractional triangle") {
  Workspace ws;
  const auto inst_path = ws.write("triangle.txt", kTriangleInstance);
  const CliRun r = ws.run("bp --max-iters 200 " + inst_path.string());
  CHECK(r.exit_code == 1);
  CHECK_THAT(r.out, ContainsSubstring("# bp converged 0"));
}

TEST_CASE("cli generate ring emits instance plus bad outcome") {
  Workspace ws;
  const auto inst_path = ws.dir() / "ring.txt";
  const auto outcome_path = ws.dir() / "ring_bad.txt";
  const CliRun r =
      ws.run("generate ring --N 2 --r 0.3333333333333333 --instance " +
             inst_path.string() + " --outcome " + outcome_path.string());
  REQUIRE(r.exit_code == 0);
  CHECK_THAT(parse_report_value(r.out, "eps-prime"), WithinAbs(0.5, 1e-12));
  CHECK_THAT(r.out, ContainsSubstring("# bad-edge 12 13"));

  const udsolve::Instance inst =
      udsolve::parse_instance_text(Workspace::slurp(inst_path));
  CHECK(inst.node_count() == 16);
  CHECK_THAT(inst.weight_bound(), WithinAbs(3.0, 1e-9));
  const udsolve::Outcome bad =
      udsolve::parse_outcome_text(Workspace::slurp(outcome_path), inst);
  CHECK_THAT(bad.gamma[12] + bad.gamma[13],
             WithinAbs(inst.weight_bound() - 1.0, 1e-9));
}

TEST_CASE("cli generate bipartite is byte-deterministic") {
  Workspace ws;
  const std::string args =
      "generate bipartite --left 4 --right 5 --density 0.7 --seed 11";
  const CliRun a = ws.run(args);
  const CliRun b = ws.run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  const CliRun c = ws.run(
      "generate bipartite --left 4 --right 5 --density 0.7 --seed 12");
  CHECK_FALSE(a.out == c.out);
}

TEST_CASE("cli solve output is byte-deterministic") {
  Workspace ws;
  const auto inst_path = ws.write("path.txt", kPathInstance);
  const std::string args = "solve --epsilon 1e-5 " + inst_path.string();
  const CliRun a = ws.run(args);
  const CliRun b = ws.run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("cli demo-slow reports the crawl statistics") {
  Workspace ws;
  const CliRun r = ws.run("demo-slow --N 2 --r 0.3333333333333333");
  REQUIRE(r.exit_code == 0);
  CHECK_THAT(r.err, ContainsSubstring("WARNING"));
  CHECK_THAT(parse_report_value(r.out, "eps-prime"), WithinAbs(0.5, 1e-12));
  CHECK_THAT(r.out, ContainsSubstring("bad-edge 12 13"));
  CHECK_THAT(parse_report_value(r.out, "initial-deficit"),
             WithinAbs(1.0, 1e-12));
  CHECK(parse_report_value(r.out, "first-half-stable") >=
        parse_report_value(r.out, "lower-bound"));
}

TEST_CASE("cli maps error classes onto exit codes") {
  Workspace ws;
  // Unknown subcommand and bad flags are usage errors.
  CHECK(ws.run("frobnicate").exit_code == 2);
  CHECK(ws.run("solve").exit_code == 2);
  // Malformed instance files are reported with their line number.
  const auto broken = ws.write("broken.txt", "nodes 2\nedge 1 2 2.0 0.5\n");
  const CliRun r = ws.run("solve " + broken.string());
  CHECK(r.exit_code == 2);
  CHECK_THAT(r.err, ContainsSubstring("line 2"));
}
