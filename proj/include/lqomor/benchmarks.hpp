// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lqomor/lqo_system.hpp"
#include "lqomor/optimizer.hpp"

namespace lqomor {

/// Seedable generator with a fully specified output stream: raw
/// std::mt19937_64 words mapped to 53-bit uniforms, normals via Box-Muller.
/// Identical across platforms, unlike std::*_distribution.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/u53";

  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);
  double normal();

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// A = A_sym + A_skew with A_sym = O diag(uniform(-2,-0.1)) O' negative
/// definite, so A + A' < 0 and the system is stable by construction.
/// B and C are all ones, M = I.
LqoSystem gen_synthetic(Index n, std::uint64_t seed);

/// Semi-discretized 1-D heat diffusion on (0,1) with zero boundary values:
/// A = (n+1)^2 tridiag(1,-2,1), spatially uniform forcing (B all ones),
/// output at the midpoint node, M = I/n (tr M = 1).
LqoSystem gen_heat(Index n);

struct SimulationSpec {
  std::string input = "exp(sin(2*t))";
  double t_end = 10.0;
  int steps = 1000;
};

struct PodSpec {
  std::string input;  // empty: reuse the simulation input
  double t_end = 3.0;
  int samples = 100;
};

struct BenchmarkSpec {
  std::string kind = "synthetic";  // or "heat"
  Index n = 30;
  std::uint64_t seed = 0;
  std::vector<Index> orders = {2, 6, 10};
  std::vector<std::string> methods = {"krylov", "pod", "bt", "srcg", "prcg"};
  std::string init = "";  // srcg/prcg initial basis; default per kind
  OptimizerConfig optimizer;
  SolverBackend solver;
  SimulationSpec simulation;
  PodSpec pod;
  std::vector<double> rational_shifts;  // empty: 4, 8, ..., 4r

  void validate() const;
  static BenchmarkSpec from_json_file(const std::string& path);
  static BenchmarkSpec from_json(const std::string& text);
  std::string to_json() const;
};

struct ResultCell {
  std::string method;
  Index r = 0;
  bool ok = false;
  double rel_error = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  std::string message;  // failure reason when !ok
};

struct ResultTable {
  std::vector<ResultCell> cells;
  // Columns: method,r,rel_h2_error,iterations,wall_ms,status
  void write_csv(const std::string& path) const;
};

/// Runs every (method, r) cell of the spec, persisting the system, reduced
/// models, traces, the result table and output trajectories under out_dir.
/// Cell failures are recorded and do not stop the remaining cells.
ResultTable run_benchmark(const BenchmarkSpec& spec, const std::string& out_dir);

}  // namespace lqomor
