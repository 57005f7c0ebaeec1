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

#ifndef UDSOLVE_IO_HPP
#define UDSOLVE_IO_HPP

#include <charconv>
#include <cstdio>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "udsolve/instance.hpp"

namespace udsolve {

/// Parse failure carrying the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace io_detail {

inline std::vector<std::string_view> tokenize(std::string_view line) {
  // '#' starts a comment that runs to end of line.
  if (auto pos = line.find('#'); pos != std::string_view::npos) {
    line = line.substr(0, pos);
  }
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r') {
      ++i;
    }
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

inline int parse_int(std::string_view tok, int line, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("expected integer for ") + what);
  }
  return value;
}

inline double parse_real(std::string_view tok, int line, const char* what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("expected number for ") + what);
  }
  return value;
}

/// Shortest decimal form that parses back to exactly the same double.
inline std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace io_detail

/// Instance file format, one directive per line, '#' comments:
///   nodes <n>
///   bound <W>          (optional, default 1; must precede edge lines)
///   edge <u> <v> <w> <r>
/// The split fraction r belongs to the first listed endpoint.
inline Instance parse_instance(std::istream& in) {
  using namespace io_detail;
  std::optional<int> nodes;
  double bound = 1.0;
  bool bound_seen = false;
  bool edges_seen = false;
  std::vector<Edge> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    const std::string_view directive = tokens[0];
    if (directive == "nodes") {
      if (tokens.size() != 2) throw ParseError(lineno, "usage: nodes <n>");
      if (nodes) throw ParseError(lineno, "duplicate nodes directive");
      nodes = parse_int(tokens[1], lineno, "node count");
      if (*nodes < 1) throw ParseError(lineno, "node count must be positive");
    } else if (directive == "bound") {
      if (tokens.size() != 2) throw ParseError(lineno, "usage: bound <W>");
      if (bound_seen) throw ParseError(lineno, "duplicate bound directive");
      if (edges_seen) {
        throw ParseError(lineno, "bound directive must precede edge lines");
      }
      bound = parse_real(tokens[1], lineno, "weight bound");
      bound_seen = true;
      if (!(bound > 0.0)) {
        throw ParseError(lineno, "weight bound must be positive");
      }
    } else if (directive == "edge") {
      if (!nodes) {
        throw ParseError(lineno, "edge line before nodes directive");
      }
      if (tokens.size() != 5) {
        throw ParseError(lineno, "usage: edge <u> <v> <w> <r>");
      }
      edges_seen = true;
      Edge e;
      e.u = parse_int(tokens[1], lineno, "endpoint u");
      e.v = parse_int(tokens[2], lineno, "endpoint v");
      e.weight = parse_real(tokens[3], lineno, "weight");
      e.split = parse_real(tokens[4], lineno, "split fraction");
      if (e.u < 1 || e.u > *nodes || e.v < 1 || e.v > *nodes) {
        throw ParseError(lineno, "node id out of range");
      }
      if (e.u == e.v) throw ParseError(lineno, "self-loop");
      if (!(e.weight > 0.0) || !(e.weight <= bound)) {
        throw ParseError(lineno, "weight out of (0, W]");
      }
      if (!(e.split > 0.0) || !(e.split < 1.0)) {
        throw ParseError(lineno, "split fraction out of (0, 1)");
      }
      for (const Edge& prev : edges) {
        if ((prev.u == e.u && prev.v == e.v) ||
            (prev.u == e.v && prev.v == e.u)) {
          throw ParseError(lineno, "duplicate edge");
        }
      }
      edges.push_back(e);
    } else {
      throw ParseError(lineno,
                       "unknown directive '" + std::string(directive) + "'");
    }
  }
  if (!nodes) throw ParseError(lineno, "missing nodes directive");
  return Instance(*nodes, std::move(edges), bound);
}

inline Instance parse_instance_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_instance(in);
}

/// Canonical form: nodes, bound, then edges with u < v sorted by (u, v).
inline std::string serialize_instance(const Instance& inst) {
  using io_detail::format_real;
  std::string out;
  out += "nodes " + std::to_string(inst.node_count()) + "\n";
  out += "bound " + format_real(inst.weight_bound()) + "\n";
  for (const Edge& e : inst.edges()) {
    out += "edge " + std::to_string(e.u) + " " + std::to_string(e.v) + " " +
           format_real(e.weight) + " " + format_real(e.split) + "\n";
  }
  return out;
}

/// Outcome file format, '#' comments:
///   match <u> <v>        (one line per matched edge)
///   gamma <i> <value>    (exactly one line per node, i = 1..n)
inline Outcome parse_outcome(std::istream& in, const Instance& inst) {
  using namespace io_detail;
  const int n = inst.node_count();
  std::vector<std::pair<int, int>> matches;
  Allocation gamma(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "match") {
      if (tokens.size() != 3) throw ParseError(lineno, "usage: match <u> <v>");
      int u = parse_int(tokens[1], lineno, "endpoint u");
      int v = parse_int(tokens[2], lineno, "endpoint v");
      matches.emplace_back(u, v);
    } else if (tokens[0] == "gamma") {
      if (tokens.size() != 3) {
        throw ParseError(lineno, "usage: gamma <i> <value>");
      }
      int i = parse_int(tokens[1], lineno, "node id");
      if (i < 1 || i > n) throw ParseError(lineno, "node id out of range");
      if (seen[static_cast<std::size_t>(i)]) {
        throw ParseError(lineno, "duplicate gamma line for node " +
                                     std::to_string(i));
      }
      seen[static_cast<std::size_t>(i)] = true;
      gamma[static_cast<std::size_t>(i)] =
          parse_real(tokens[2], lineno, "gamma value");
    } else {
      throw ParseError(lineno,
                       "unknown directive '" + std::string(tokens[0]) + "'");
    }
  }
  for (int i = 1; i <= n; ++i) {
    if (!seen[static_cast<std::size_t>(i)]) {
      throw ParseError(lineno,
                       "missing gamma line for node " + std::to_string(i));
    }
  }
  Outcome out;
  out.gamma = std::move(gamma);
  out.matching = Matching::of(inst, std::move(matches));
  return out;
}

inline Outcome parse_outcome_text(std::string_view text,
                                  const Instance& inst) {
  std::istringstream in{std::string(text)};
  return parse_outcome(in, inst);
}

/// Matching-only input: reads `match` lines, ignores `gamma` lines so that
/// a full outcome file is accepted wherever a matching is expected.
inline std::vector<std::pair<int, int>> parse_matching_pairs(
    std::istream& in) {
  using namespace io_detail;
  std::vector<std::pair<int, int>> matches;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "match") {
      if (tokens.size() != 3) throw ParseError(lineno, "usage: match <u> <v>");
      matches.emplace_back(parse_int(tokens[1], lineno, "endpoint u"),
                           parse_int(tokens[2], lineno, "endpoint v"));
    } else if (tokens[0] == "gamma") {
      continue;
    } else {
      throw ParseError(lineno,
                       "unknown directive '" + std::string(tokens[0]) + "'");
    }
  }
  return matches;
}

inline std::string serialize_outcome(const Instance& inst,
                                     const Outcome& out) {
  using io_detail::format_real;
  std::string text;
  for (const auto& [u, v] : out.matching.pairs()) {
    text += "match " + std::to_string(u) + " " + std::to_string(v) + "\n";
  }
  for (int i = 1; i <= inst.node_count(); ++i) {
    text += "gamma " + std::to_string(i) + " " +
            format_real(out.gamma[static_cast<std::size_t>(i)]) + "\n";
  }
  return text;
}

}  // namespace udsolve

#endif  // UDSOLVE_IO_HPP
