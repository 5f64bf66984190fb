// SPDX-License-Identifier: Apache-2.0
//
// lqo-mor: generate, reduce, compare and simulate linear systems with
// quadratic outputs.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "lqomor/baselines.hpp"
#include "lqomor/benchmarks.hpp"
#include "lqomor/expr.hpp"
#include "lqomor/matrix_market.hpp"
#include "lqomor/optimizer.hpp"

using json = nlohmann::json;
using namespace lqomor;

namespace {

struct ReduceOptions {
  std::string sys_dir;
  std::string method;
  Index r = 0;
  std::string config_path;
  std::string out_dir;
};

// Shared reduce configuration: optimizer, solver, init, shifts, pod.
struct ReduceConfig {
  OptimizerConfig optimizer;
  SolverBackend solver;
  std::string init = "krylov";
  std::vector<double> shifts;
  PodSpec pod;
  std::string pod_input = "exp(sin(2*t))";
};

ReduceConfig load_reduce_config(const std::string& path) {
  ReduceConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw shape_error("cannot open config " + path);
  const json j = json::parse(in);
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    cfg.optimizer.omega = o.value("omega", cfg.optimizer.omega);
    cfg.optimizer.gamma = o.value("gamma", cfg.optimizer.gamma);
    cfg.optimizer.c1 = o.value("c1", cfg.optimizer.c1);
    cfg.optimizer.c2 = o.value("c2", cfg.optimizer.c2);
    cfg.optimizer.epsilon = o.value("epsilon", cfg.optimizer.epsilon);
    cfg.optimizer.max_iters = o.value("max_iters", cfg.optimizer.max_iters);
    cfg.optimizer.max_ls_trials =
        o.value("max_ls_trials", cfg.optimizer.max_ls_trials);
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    const std::string mode = s.value("mode", "exact");
    cfg.solver.mode = mode == "laguerre" ? SolverBackend::Mode::laguerre
                                         : SolverBackend::Mode::exact;
    cfg.solver.alpha = s.value("alpha", cfg.solver.alpha);
    cfg.solver.terms = s.value("terms", cfg.solver.terms);
  }
  cfg.init = j.value("init", cfg.init);
  if (j.contains("rational_shifts")) {
    cfg.shifts = j["rational_shifts"].get<std::vector<double>>();
  }
  if (j.contains("pod")) {
    const json& p = j["pod"];
    cfg.pod_input = p.value("input", cfg.pod_input);
    cfg.pod.t_end = p.value("t_end", cfg.pod.t_end);
    cfg.pod.samples = p.value("samples", cfg.pod.samples);
  }
  return cfg;
}

std::vector<double> default_shifts(Index r) {
  std::vector<double> shifts(static_cast<size_t>(r));
  for (Index i = 0; i < r; ++i) shifts[static_cast<size_t>(i)] = 4.0 * (i + 1);
  return shifts;
}

StiefelPoint initial_basis(const LqoSystem& sys, const ReduceConfig& cfg,
                           Index r) {
  if (cfg.init == "krylov") return arnoldi_basis(sys.A, sys.B, r);
  if (cfg.init == "rational-krylov") {
    std::vector<double> shifts = cfg.shifts.empty() ? default_shifts(r) : cfg.shifts;
    if (static_cast<Index>(shifts.size()) < r) {
      throw shape_error("reduce: fewer shifts than reduced order");
    }
    shifts.resize(static_cast<size_t>(r));
    return rational_krylov_basis(sys.A, sys.B, shifts);
  }
  if (cfg.init == "pod") {
    const SnapshotSet snap =
        collect_snapshots(sys, parse_input_expression(cfg.pod_input),
                          cfg.pod.t_end, cfg.pod.samples, cfg.pod_input);
    return pod_basis(snap, r);
  }
  throw shape_error("reduce: unknown init '" + cfg.init + "'");
}

int run_reduce(const ReduceOptions& opt) {
  const LqoSystem sys = load_system(opt.sys_dir);
  const ReduceConfig cfg = load_reduce_config(opt.config_path);
  LqoSystem reduced(Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Zero(1, 1),
                    Matrix::Zero(1, 1));
  if (opt.method == "krylov") {
    reduced = galerkin_reduce(sys, arnoldi_basis(sys.A, sys.B, opt.r));
  } else if (opt.method == "rational-krylov") {
    std::vector<double> shifts =
        cfg.shifts.empty() ? default_shifts(opt.r) : cfg.shifts;
    if (static_cast<Index>(shifts.size()) < opt.r) {
      throw shape_error("reduce: fewer shifts than reduced order");
    }
    shifts.resize(static_cast<size_t>(opt.r));
    reduced = galerkin_reduce(sys, rational_krylov_basis(sys.A, sys.B, shifts));
  } else if (opt.method == "pod") {
    const SnapshotSet snap =
        collect_snapshots(sys, parse_input_expression(cfg.pod_input),
                          cfg.pod.t_end, cfg.pod.samples, cfg.pod_input);
    reduced = galerkin_reduce(sys, pod_basis(snap, opt.r));
  } else if (opt.method == "bt") {
    BtInfo info;
    reduced = bt_reduce(sys, opt.r, &info);
    if (info.effective < info.requested) {
      std::cerr << "warning: Hankel values below cutoff, order truncated to "
                << info.effective << "\n";
    }
  } else if (opt.method == "srcg") {
    SrcgResult res =
        srcg(sys, initial_basis(sys, cfg, opt.r), cfg.optimizer, cfg.solver);
    res.trace.write_csv(opt.out_dir + "/trace.csv");
    std::cout << "srcg: " << to_string(res.trace.reason) << " after "
              << res.trace.iterations() << " iterations\n";
    reduced = std::move(res.reduced);
  } else if (opt.method == "prcg") {
    PrcgResult res =
        prcg(sys, initial_basis(sys, cfg, opt.r), cfg.optimizer, cfg.solver);
    res.trace.write_csv(opt.out_dir + "/trace.csv");
    std::cout << "prcg: " << to_string(res.trace.reason) << " after "
              << res.trace.iterations() << " iterations\n";
    reduced = std::move(res.reduced);
  } else {
    throw shape_error("reduce: unknown method '" + opt.method + "'");
  }
  save_system(reduced, opt.out_dir, opt.method + "_r" + std::to_string(opt.r));
  std::cout << "relative H2 error: " << fmt17(relative_h2_error(sys, reduced))
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"H2-optimal model reduction of linear systems with quadratic outputs"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a benchmark system");
  gen->require_subcommand(1);
  Index gen_n = 30;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen_syn = gen->add_subcommand("synthetic", "random stable system, A+A' < 0");
  gen_syn->add_option("--n", gen_n, "state dimension")->required();
  gen_syn->add_option("--seed", gen_seed, "random seed");
  gen_syn->add_option("--out", gen_out, "output directory")->required();
  auto* gen_heat_cmd = gen->add_subcommand("heat", "1-D heat diffusion benchmark");
  gen_heat_cmd->add_option("--n", gen_n, "state dimension")->required();
  gen_heat_cmd->add_option("--out", gen_out, "output directory")->required();

  // reduce
  ReduceOptions reduce_opt;
  auto* reduce = app.add_subcommand("reduce", "compute a reduced model");
  reduce->add_option("--sys", reduce_opt.sys_dir, "system directory")->required();
  reduce->add_option("--method", reduce_opt.method,
                     "krylov|rational-krylov|pod|bt|srcg|prcg")->required();
  reduce->add_option("--r", reduce_opt.r, "reduced order")->required();
  reduce->add_option("--config", reduce_opt.config_path, "JSON config file");
  reduce->add_option("--out", reduce_opt.out_dir, "output directory")->required();

  // h2err
  std::string h2_full, h2_reduced;
  auto* h2err = app.add_subcommand("h2err", "relative H2 error between two systems");
  h2err->add_option("--full", h2_full, "full system directory")->required();
  h2err->add_option("--reduced", h2_reduced, "reduced system directory")->required();

  // simulate
  std::string sim_sys, sim_input = "exp(sin(2*t))", sim_out;
  double sim_t_end = 10.0;
  int sim_steps = 1000;
  auto* sim = app.add_subcommand("simulate", "integrate the output response");
  sim->add_option("--sys", sim_sys, "system directory")->required();
  sim->add_option("--input", sim_input, "input expression in t");
  sim->add_option("--t-end", sim_t_end, "end time");
  sim->add_option("--steps", sim_steps, "RK4 steps");
  sim->add_option("--out", sim_out, "output CSV path")->required();

  // bench
  std::string bench_spec, bench_out;
  auto* bench = app.add_subcommand("bench", "run a full benchmark spec");
  bench->add_option("--spec", bench_spec, "benchmark spec JSON")->required();
  bench->add_option("--out", bench_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (gen_syn->parsed()) {
      const LqoSystem sys = gen_synthetic(gen_n, gen_seed);
      json meta = {{"kind", "synthetic"},
                   {"n", gen_n},
                   {"seed", gen_seed},
                   {"rng", Rng::kAlgorithm}};
      save_system(sys, gen_out, "synthetic", meta.dump());
      std::cout << "wrote synthetic system (n=" << gen_n << ") to " << gen_out
                << "\n";
    } else if (gen_heat_cmd->parsed()) {
      const LqoSystem sys = gen_heat(gen_n);
      json meta = {{"kind", "heat"},
                   {"n", gen_n},
                   {"b", "ones"},
                   {"c", "midpoint-indicator"},
                   {"diffusion", 1.0}};
      save_system(sys, gen_out, "heat", meta.dump());
      std::cout << "wrote heat system (n=" << gen_n << ") to " << gen_out << "\n";
    } else if (reduce->parsed()) {
      return run_reduce(reduce_opt);
    } else if (h2err->parsed()) {
      const LqoSystem full = load_system(h2_full);
      const LqoSystem red = load_system(h2_reduced);
      std::cout << fmt17(relative_h2_error(full, red)) << "\n";
    } else if (sim->parsed()) {
      const LqoSystem sys = load_system(sim_sys);
      const Trajectory traj = simulate(sys, parse_input_expression(sim_input),
                                       sim_t_end, sim_steps);
      std::ofstream out(sim_out);
      if (!out) throw shape_error("simulate: cannot open " + sim_out);
      out << "t,y\n";
      for (Index k = 0; k < traj.times.size(); ++k) {
        out << fmt17(traj.times(k)) << ',' << fmt17(traj.output(k)) << '\n';
      }
      std::cout << "wrote " << traj.times.size() << " samples to " << sim_out
                << "\n";
    } else if (bench->parsed()) {
      const BenchmarkSpec spec = BenchmarkSpec::from_json_file(bench_spec);
      const ResultTable table = run_benchmark(spec, bench_out);
      int failures = 0;
      for (const ResultCell& cell : table.cells) {
        if (!cell.ok) {
          ++failures;
          std::cerr << "cell (" << cell.method << ", r=" << cell.r
                    << ") failed: " << cell.message << "\n";
        }
      }
      std::cout << "wrote " << table.cells.size() << " cells to " << bench_out
                << "/table.csv\n";
      if (failures > 0) return 3;
    }
  } catch (const shape_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
