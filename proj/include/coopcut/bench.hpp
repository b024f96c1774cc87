#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "coopcut/instances.hpp"
#include "coopcut/polyflow.hpp"
#include "coopcut/solvers.hpp"

namespace coopcut {

inline constexpr int kResultSchemaVersion = 1;

struct InstanceGroup {
  std::string graph_class;
  json params = json::object();
  std::vector<std::string> families;
  std::vector<std::uint64_t> seeds;
};

struct BenchConfig {
  std::vector<InstanceGroup> groups;
  std::vector<std::string> solvers;
  SolverParams params;
  int threads = 0;  // 0 = hardware concurrency; COOPCUT_THREADS overrides
  bool timing = true;
  int enumerate_below = 10;  // enumeration joins the best-known cost when n <= this
  double tolerance = 1e-9;
  std::string results = "results.jsonl";
  std::string summary = "summary.csv";
  std::string svg;
  json raw;
};

inline BenchConfig bench_config_from_json(const json& j) {
  BenchConfig c;
  c.raw = j;
  if (j.value("version", 1) != 1) throw std::invalid_argument("unsupported config version");
  if (j.value("mode", std::string("global")) != "global")
    throw std::invalid_argument("benchmark instances are global; mode must be \"global\"");
  for (auto& g : j.at("instances")) {
    InstanceGroup ig;
    ig.graph_class = g.at("graph_class");
    ig.params = g.value("params", json::object());
    const auto& fam = g.at("families");
    if (fam.is_string() && fam == "all") ig.families = cost_families();
    else ig.families = fam.get<std::vector<std::string>>();
    for (auto& f : ig.families)
      if (!known_family(f)) throw std::invalid_argument("unknown family: " + f);
    ig.seeds = g.at("seeds").get<std::vector<std::uint64_t>>();
    c.groups.push_back(std::move(ig));
  }
  const auto& sv = j.at("solvers");
  if (sv.is_string() && sv == "all") c.solvers = solver_names();
  else c.solvers = sv.get<std::vector<std::string>>();
  for (auto& s : c.solvers)
    if (!known_solver(s)) throw std::invalid_argument("unknown solver: " + s);
  if (j.contains("solver_params")) {
    auto& p = j.at("solver_params");
    c.params.seed = p.value("seed", std::uint64_t{0});
    c.params.max_iters = p.value("max_iters", 0);
    c.params.exact_relaxation = p.value("exact_relaxation", false);
  }
  c.threads = j.value("threads", 0);
  c.timing = j.value("timing", true);
  c.enumerate_below = j.value("enumerate_below", 10);
  c.tolerance = j.value("tolerance", 1e-9);
  if (j.contains("output")) {
    auto& o = j.at("output");
    c.results = o.value("results", c.results);
    c.summary = o.value("summary", c.summary);
    c.svg = o.value("svg", std::string());
  }
  return c;
}

inline BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return bench_config_from_json(json::parse(in));
}

inline int worker_count(int configured) {
  if (const char* env = std::getenv("COOPCUT_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  if (configured > 0) return configured;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n) on a pool; results are written by index.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    for (;;) {
      std::size_t i = next++;
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  for (int i = 1; i < k; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// Approximation bound against any cut C, evaluated at the best known cut.
inline std::optional<double> theoretical_bound(const Instance& I, const std::string& solver,
                                               const CutSolution& best, const SolverReport& r) {
  const double k = static_cast<double>(I.graph.elements_of(best.arcs).size());
  if (solver == "MC" || solver == "MB") return k;
  if (solver == "EA") return std::sqrt(static_cast<double>(I.cost->size()) * k);
  if (solver == "SG") {
    double kappa = curvature(*I.cost);
    return k / ((k - 1) * (1 - kappa) + 1);
  }
  if (solver == "PF") {
    auto [ds, dt] = cut_width(I.graph, best.arcs);
    return static_cast<double>(std::min(ds, dt));
  }
  if (solver == "CR" || solver == "DB" || solver == "GM" || solver == "GA")
    return static_cast<double>(I.graph.n() - 1);
  if (solver == "GH") {
    if (r.extra.contains("certificate_max")) return r.extra["certificate_max"].get<double>();
    if (r.extra.contains("certificate")) return r.extra["certificate"].get<double>();
  }
  return std::nullopt;
}

// Best cut over an enumeration of all minimal cuts, for small graphs.
inline std::optional<CutSolution> enumerated_optimum(const Instance& I, int max_n) {
  if (I.graph.n() > max_n) return std::nullopt;
  CutSolution best;
  if (I.global()) {
    for (auto& c : enumerate_global_cuts(I.graph))
      for (int t = 1; t < I.graph.n(); ++t)
        if (is_minimal_cut(I.graph, c.arcs, 0, t)) {
          auto s = make_solution(I, c.arcs, 0, t, "enum");
          if (better(s, best)) best = s;
          break;
        }
  } else {
    for (auto& c : enumerate_st_cuts(I.graph, I.s, I.t)) {
      auto s = make_solution(I, c.arcs, I.s, I.t, "enum");
      if (better(s, best)) best = s;
    }
  }
  if (best.s < 0) return std::nullopt;
  return best;
}

struct ResultRow {
  std::string instance, graph_class, family, solver;
  double cost = 0, best_known = 0, factor = 0;
  std::optional<double> bound;
  std::uint64_t oracle_calls = 0;
  double time_ms = 0;
  int iterations = 0;
  std::vector<int> arcs;
  int s = -1, t = -1;
  bool valid = false;
  bool within_bound = true;
};

inline json row_to_json(const ResultRow& r, bool timing, const std::string& config_hash) {
  json j = {{"schema", kResultSchemaVersion},
            {"config_hash", config_hash},
            {"instance", r.instance},
            {"graph_class", r.graph_class},
            {"family", r.family},
            {"solver", r.solver},
            {"cost", r.cost},
            {"best_known", r.best_known},
            {"factor", r.factor},
            {"bound", r.bound ? json(*r.bound) : json(nullptr)},
            {"within_bound", r.within_bound},
            {"oracle_calls", r.oracle_calls},
            {"iterations", r.iterations},
            {"arcs", r.arcs},
            {"s", r.s},
            {"t", r.t},
            {"valid", r.valid}};
  if (timing) j["time_ms"] = r.time_ms;
  return j;
}

inline ResultRow row_from_json(const json& j) {
  ResultRow r;
  r.instance = j.at("instance");
  r.graph_class = j.at("graph_class");
  r.family = j.at("family");
  r.solver = j.at("solver");
  r.cost = j.at("cost");
  r.best_known = j.at("best_known");
  r.factor = j.at("factor");
  if (!j.at("bound").is_null()) r.bound = j.at("bound").get<double>();
  r.within_bound = j.value("within_bound", true);
  r.oracle_calls = j.at("oracle_calls");
  r.iterations = j.at("iterations");
  r.time_ms = j.value("time_ms", 0.0);
  r.arcs = j.at("arcs").get<std::vector<int>>();
  r.s = j.at("s");
  r.t = j.at("t");
  r.valid = j.at("valid");
  return r;
}

struct SummaryRow {
  std::string family, solver;
  double mean_factor = 0, max_factor = 0, mean_calls = 0, mean_time_ms = 0;
  int count = 0;
};

inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, std::string>, SummaryRow> acc;
  for (auto& r : rows) {
    auto& s = acc[{r.graph_class + ":" + r.family, r.solver}];
    s.family = r.graph_class + ":" + r.family;
    s.solver = r.solver;
    s.mean_factor += r.factor;
    s.max_factor = std::max(s.max_factor, r.factor);
    s.mean_calls += static_cast<double>(r.oracle_calls);
    s.mean_time_ms += r.time_ms;
    ++s.count;
  }
  std::vector<SummaryRow> out;
  for (auto& [k, s] : acc) {
    s.mean_factor /= s.count;
    s.mean_calls /= s.count;
    s.mean_time_ms /= s.count;
    out.push_back(s);
  }
  return out;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "family,solver,mean_factor,max_factor,mean_calls,mean_time_ms\n";
  os.precision(10);
  for (auto& r : rows)
    os << r.family << ',' << r.solver << ',' << r.mean_factor << ',' << r.max_factor << ','
       << r.mean_calls << ',' << r.mean_time_ms << '\n';
  return os.str();
}

// Grouped bar chart of mean factors, one group per family.
inline std::string summary_svg(const std::vector<SummaryRow>& rows) {
  std::vector<std::string> fams, solvers;
  for (auto& r : rows) {
    if (std::find(fams.begin(), fams.end(), r.family) == fams.end()) fams.push_back(r.family);
    if (std::find(solvers.begin(), solvers.end(), r.solver) == solvers.end())
      solvers.push_back(r.solver);
  }
  double ymax = 1;
  for (auto& r : rows) ymax = std::max(ymax, r.mean_factor);
  const double bar = 8, gap = 16, plot_h = 300, left = 50, top = 20;
  const double group_w = bar * solvers.size() + gap;
  const double width = left + group_w * fams.size() + 20, height = top + plot_h + 140;
  static const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
                                  "#1f77b4", "#2ca02c", "#d62728"};
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << width - 10
     << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double v = 1 + (ymax - 1) * k / 4.0;
    double y = top + plot_h - plot_h * (v / ymax);
    os << "<text x=\"4\" y=\"" << y + 3 << "\">" << v << "</text>\n";
  }
  for (std::size_t fi = 0; fi < fams.size(); ++fi) {
    double x0 = left + fi * group_w;
    for (auto& r : rows) {
      if (r.family != fams[fi]) continue;
      auto si = std::find(solvers.begin(), solvers.end(), r.solver) - solvers.begin();
      double h = plot_h * r.mean_factor / ymax;
      os << "<rect x=\"" << x0 + si * bar << "\" y=\"" << top + plot_h - h << "\" width=\""
         << bar - 1 << "\" height=\"" << h << "\" fill=\"" << palette[si % 13] << "\"><title>"
         << r.family << ' ' << r.solver << ' ' << r.mean_factor << "</title></rect>\n";
    }
    os << "<text transform=\"translate(" << x0 + 4 << ',' << top + plot_h + 10
       << ") rotate(60)\">" << fams[fi] << "</text>\n";
  }
  for (std::size_t si = 0; si < solvers.size(); ++si)
    os << "<rect x=\"" << left + si * 40 << "\" y=\"" << height - 14
       << "\" width=\"8\" height=\"8\" fill=\"" << palette[si % 13] << "\"/><text x=\""
       << left + si * 40 + 10 << "\" y=\"" << height - 6 << "\">" << solvers[si] << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

struct BenchResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
  std::string config_hash;
  int invalid = 0, bound_violations = 0;
};

inline BenchResult run_bench(const BenchConfig& cfg) {
  std::vector<InstanceSpec> specs;
  for (auto& g : cfg.groups)
    for (auto& fam : g.families)
      for (auto seed : g.seeds) specs.push_back({g.graph_class, g.params, fam, seed});
  const int threads = worker_count(cfg.threads);
  std::vector<Instance> insts(specs.size());
  parallel_for(specs.size(), threads, [&](std::size_t i) { insts[i] = generate(specs[i]); });

  struct Task {
    std::size_t inst;
    std::string solver;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < insts.size(); ++i)
    for (auto& s : cfg.solvers)
      if (applicable(insts[i], s)) tasks.push_back({i, s});
  std::vector<SolverReport> reports(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t k) {
    SolverParams p = cfg.params;
    p.seed = derive_seed(derive_seed(cfg.params.seed, insts[tasks[k].inst].seed),
                         fnv1a(tasks[k].solver));
    reports[k] = run_solver(insts[tasks[k].inst], tasks[k].solver, p);
  });

  // Best known cut per instance: every solver in the run, the stored optimum,
  // and enumeration on small graphs.
  std::vector<CutSolution> best(insts.size());
  for (std::size_t k = 0; k < tasks.size(); ++k)
    if (better(reports[k].solution, best[tasks[k].inst])) best[tasks[k].inst] = reports[k].solution;
  parallel_for(insts.size(), threads, [&](std::size_t i) {
    if (auto e = enumerated_optimum(insts[i], cfg.enumerate_below))
      if (better(*e, best[i])) best[i] = *e;
  });
  for (std::size_t i = 0; i < insts.size(); ++i) {
    if (!insts[i].known) continue;
    auto& kn = *insts[i].known;
    if (kn.value < best[i].cost) {
      CutSolution c;
      c.arcs = kn.arcs;
      c.cost = insts[i].f(kn.arcs);
      c.solver = "known";
      if (insts[i].global()) {
        auto side = reachable(insts[i].graph, 0, arc_mask(insts[i].graph, kn.arcs));
        for (int t = 1; t < insts[i].graph.n() && c.t < 0; ++t)
          if (!side[t]) c.s = 0, c.t = t;
      } else {
        c.s = insts[i].s, c.t = insts[i].t;
      }
      best[i] = c;
    }
  }

  BenchResult out;
  out.config_hash = hex64(fnv1a(cfg.raw.dump()));
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const Instance& I = insts[tasks[k].inst];
    const SolverReport& r = reports[k];
    ResultRow row;
    row.instance = I.id;
    row.graph_class = I.graph_class;
    row.family = I.family;
    row.solver = tasks[k].solver;
    row.cost = r.solution.cost;
    row.best_known = best[tasks[k].inst].cost;
    row.factor = row.best_known > 0 ? row.cost / row.best_known : (row.cost > 0 ? INFINITY : 1.0);
    row.bound = theoretical_bound(I, row.solver, best[tasks[k].inst], r);
    row.within_bound = !row.bound || row.factor <= *row.bound * (1 + cfg.tolerance) + cfg.tolerance;
    row.oracle_calls = r.oracle_calls;
    row.time_ms = r.wall_ms;
    row.iterations = r.iterations;
    row.arcs = r.solution.arcs;
    row.s = r.solution.s, row.t = r.solution.t;
    row.valid = valid_solution(I, r.solution);
    if (!row.valid) ++out.invalid;
    if (!row.within_bound) ++out.bound_violations;
    out.rows.push_back(std::move(row));
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.instance, a.solver) < std::tie(b.instance, b.solver);
  });
  out.summary = summarize(out.rows);
  return out;
}

inline std::string results_jsonl(const BenchResult& br, bool timing) {
  std::string s;
  for (auto& r : br.rows) s += row_to_json(r, timing, br.config_hash).dump() + "\n";
  return s;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline std::vector<ResultRow> read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results: " + path);
  std::vector<ResultRow> rows;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(row_from_json(json::parse(line)));
  return rows;
}

// Default desk benchmark: 5x5 grids of all three types and four 5-cliques.
inline json desk_config() {
  return {{"version", 1},
          {"mode", "global"},
          {"instances",
           json::array({{{"graph_class", "grid_i"}, {"params", {{"rows", 5}, {"cols", 5}}},
                         {"families", "all"}, {"seeds", {1}}},
                        {{"graph_class", "grid_ii"}, {"params", {{"rows", 5}, {"cols", 5}}},
                         {"families", "all"}, {"seeds", {1}}},
                        {{"graph_class", "grid_iii"}, {"params", {{"rows", 5}, {"cols", 5}}},
                         {"families", "all"}, {"seeds", {1}}},
                        {{"graph_class", "clustered"},
                         {"params", {{"k", 4}, {"size", 5}, {"inter", 6}}},
                         {"families", "all"}, {"seeds", {1}}}})},
          {"solvers", "all"},
          {"solver_params", {{"seed", 7}}},
          {"timing", true},
          {"output", {{"results", "results.jsonl"}, {"summary", "summary.csv"}, {"svg", "summary.svg"}}}};
}

}  // namespace coopcut
