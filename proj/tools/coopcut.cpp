// coopcut: instance generation, single solves, benchmarks, reports, self test.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "coopcut/acceptance.hpp"
#include "coopcut/bench.hpp"
#include "coopcut/solvers.hpp"

using namespace coopcut;

namespace {

struct GenArgs {
  std::string graph_class = "grid_i";
  std::string params = R"({"rows": 5, "cols": 5})";
  std::string family = "labels_i";
  std::uint64_t seed = 1;
};

void add_gen_options(CLI::App* cmd, GenArgs& g, const std::string& seed_flag = "--seed") {
  cmd->add_option("--class", g.graph_class, "graph class: grid_i, grid_ii, grid_iii, clustered");
  cmd->add_option("--params", g.params, "graph or construction parameters as a JSON object");
  cmd->add_option("--family", g.family, "cost family or special construction");
  cmd->add_option(seed_flag, g.seed, "instance seed");
}

Instance generate_from(const GenArgs& g) {
  if (g.family.rfind("random_", 0) == 0 || g.family == "random")
    return gen_random_small(g.seed);
  if (g.family == "convolution_example") return gen_convolution_example();
  return generate({g.graph_class, json::parse(g.params), g.family, g.seed});
}

json report_json(const Instance& I, const SolverReport& r) {
  return {{"instance", I.id},
          {"solver", r.solution.solver},
          {"cost", r.solution.cost},
          {"arcs", r.solution.arcs},
          {"elements", I.graph.elements_of(r.solution.arcs)},
          {"s", r.solution.s},
          {"t", r.solution.t},
          {"valid", valid_solution(I, r.solution)},
          {"iterations", r.iterations},
          {"oracle_calls", r.oracle_calls},
          {"wall_ms", r.wall_ms},
          {"surrogate", std::isnan(r.surrogate_value) ? json(nullptr) : json(r.surrogate_value)},
          {"extra", r.extra}};
}

std::string parent_join(const std::string& base, const std::string& name) {
  if (name.empty() || std::filesystem::path(name).is_absolute()) return name;
  return (std::filesystem::path(base) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative cut solvers and benchmark harness"};
  app.require_subcommand(1);

  GenArgs gen_args;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "write an instance file");
  add_gen_options(gen, gen_args);
  gen->add_option("-o,--out", gen_out, "output path (default: stdout)");

  GenArgs solve_args;
  std::string instance_path, solver = "MC", mode;
  std::uint64_t solve_seed = 0;
  int iters = 0, s_node = -1, t_node = -1;
  bool exact = false, trace = false;
  auto* solve = app.add_subcommand("solve", "run one solver on one instance");
  solve->add_option("--instance", instance_path, "instance file (otherwise generated from flags)");
  add_gen_options(solve, solve_args, "--instance-seed");
  solve->add_option("--solver", solver, "MC MB QU EA SG RI MI PF CR DB GM GA GH");
  solve->add_option("--mode", mode, "st or global (default: the instance's own mode)")
      ->check(CLI::IsMember({"st", "global"}));
  solve->add_option("--seed", solve_seed, "solver seed");
  solve->add_option("--iters", iters, "iteration budget (0 = solver default)");
  solve->add_option("--s", s_node, "source for st mode");
  solve->add_option("--t", t_node, "sink for st mode");
  solve->add_flag("--exact", exact, "solve the relaxation exactly (CR, DB)");
  solve->add_flag("--trace", trace, "include the path-cover trace (GM, GA, GH; st mode)");

  std::string config_path, out_dir;
  int threads = -1;
  auto* bench = app.add_subcommand("bench", "run a solver x instance matrix");
  bench->add_option("--config", config_path, "JSON config; 'desk' selects the built-in desk config")
      ->required();
  bench->add_option("--out-dir", out_dir, "directory for relative output paths");
  bench->add_option("--threads", threads, "worker threads (COOPCUT_THREADS overrides)");

  std::string results_path, csv_path, svg_path;
  auto* report = app.add_subcommand("report", "summarize a results file");
  report->add_option("--results", results_path, "results JSON lines")->required();
  report->add_option("--csv", csv_path, "summary CSV path (default: stdout)");
  report->add_option("--svg", svg_path, "bar chart path");

  AcceptanceOptions acc;
  std::vector<int> only;
  bool list_only = false;
  auto* selftest = app.add_subcommand("selftest", "run the acceptance criteria");
  selftest->add_option("--only", only, "criterion ids, comma separated")->delimiter(',');
  selftest->add_option("--out", acc.out_dir, "directory for benchmark outputs");
  selftest->add_flag("--inject-fault", acc.inject_fault,
                     "corrupt generated costs so the hygiene check must fail");
  selftest->add_flag("--list", list_only, "list the criteria and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto j = instance_to_json(generate_from(gen_args));
      if (gen_out.empty()) {
        std::cout << j.dump(1) << "\n";
      } else {
        write_text(gen_out, j.dump(1) + "\n");
      }
      return 0;
    }

    if (*solve) {
      Instance I = instance_path.empty() ? generate_from(solve_args) : load_instance(instance_path);
      if (!known_solver(solver)) throw std::invalid_argument("unknown solver: " + solver);
      SolverParams p;
      p.seed = solve_seed;
      p.max_iters = iters;
      p.exact_relaxation = exact;
      const bool global = mode.empty() ? I.global() : mode == "global";
      if (!applicable(I, solver) && !(global && solver == "QU" && I.graph.is_undirected()))
        throw std::invalid_argument(solver + " does not apply to this instance");
      SolverReport r;
      GreedyTrace tr;
      if (global) {
        r = run_global(I, solver, p);
      } else {
        int s = s_node >= 0 ? s_node : (I.s >= 0 ? I.s : 0);
        int t = t_node >= 0 ? t_node : (I.t >= 0 ? I.t : I.graph.n() - 1);
        if (trace && solver == "GH") r = solve_greedy_det(I, s, t, &tr);
        else if (trace && (solver == "GM" || solver == "GA"))
          r = solve_greedy_random(I, s, t, solver == "GM" ? BetaMode::max : BetaMode::almost, p.seed, &tr);
        else r = solve_st(I, solver, s, t, p);
      }
      auto j = report_json(I, r);
      if (trace && !tr.steps.empty()) j["trace"] = to_json(tr);
      std::cout << j.dump(1) << "\n";
      return 0;
    }

    if (*bench) {
      BenchConfig cfg = config_path == "desk" ? bench_config_from_json(desk_config())
                                              : load_bench_config(config_path);
      if (threads >= 0) cfg.threads = threads;
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        cfg.results = parent_join(out_dir, cfg.results);
        cfg.summary = parent_join(out_dir, cfg.summary);
        cfg.svg = parent_join(out_dir, cfg.svg);
      }
      auto br = run_bench(cfg);
      write_text(cfg.results, results_jsonl(br, cfg.timing));
      write_text(cfg.summary, summary_csv(br.summary));
      if (!cfg.svg.empty()) write_text(cfg.svg, summary_svg(br.summary));
      std::cerr << br.rows.size() << " rows, " << br.invalid << " invalid, " << br.bound_violations
                << " bound violations, config " << br.config_hash << "\n";
      std::cout << summary_csv(br.summary);
      return br.invalid || br.bound_violations ? 2 : 0;
    }

    if (*report) {
      auto rows = read_results(results_path);
      auto summary = summarize(rows);
      if (csv_path.empty()) std::cout << summary_csv(summary);
      else write_text(csv_path, summary_csv(summary));
      if (!svg_path.empty()) write_text(svg_path, summary_svg(summary));
      return 0;
    }

    if (*selftest) {
      if (list_only) {
        for (auto& c : acceptance_criteria())
          std::cout << c.id << "\t" << c.name << (c.budget > 0 ? "\t< " + accept::num(c.budget) + " s" : "")
                    << "\n";
        return 0;
      }
      auto res = run_acceptance(acc, only, &std::cout);
      int failed = 0;
      for (auto& r : res) failed += !r.pass;
      std::cout << (failed ? "selftest FAILED " : "selftest passed ") << res.size() - failed << "/"
                << res.size() << "\n";
      return failed ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
