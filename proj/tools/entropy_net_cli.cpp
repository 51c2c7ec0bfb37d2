#include <CLI11.hpp>

#include <cstdio>
#include <sstream>
#include <filesystem>
#include <iostream>

#include "entnet/artifacts.hpp"
#include "entnet/config.hpp"
#include "entnet/cpwl.hpp"
#include "entnet/metrics.hpp"
#include "entnet/parallel.hpp"
#include "entnet/plot.hpp"
#include "entnet/train.hpp"

namespace fs = std::filesystem;
using namespace entnet;

namespace {

int run_train(const std::string& config_path, std::uint64_t seed_override,
              const std::string& out_override, int retry_seeds) {
  RunConfig cfg = load_config(config_path);
  if (seed_override != 0) {
    cfg.train.init_seed = seed_override;
    cfg.train.pert_seed = seed_override;
  }
  if (!out_override.empty()) cfg.output_dir = out_override;
  fs::create_directories(cfg.output_dir);

  // Divergent runs abort; --retry-seeds opts into restarting with fresh seeds.
  TrainResult result = [&] {
    for (int attempt = 0;; ++attempt) {
      try {
        return train(cfg.train);
      } catch (const TrainDivergence& e) {
        if (attempt >= retry_seeds) throw;
        std::fprintf(stderr, "%s; retrying with seed %llu\n", e.what(),
                     static_cast<unsigned long long>(cfg.train.init_seed + 1));
        cfg.train.init_seed += 1;
        cfg.train.pert_seed += 1;
      }
    }
  }();
  // Embed the seeds the successful run actually used.
  const nlohmann::json resolved = resolved_config_json(cfg);
  for (std::size_t k = 0; k < result.strips.size(); ++k) {
    const std::string base = cfg.output_dir + "/";
    write_history_csv(base + "history_strip" + std::to_string(k) + ".csv", resolved,
                      result.strips[k]);
    save_network(result.strips[k].best_net,
                 base + "checkpoint_strip" + std::to_string(k) + ".json");
  }
  if (result.metrics) {
    write_report_json(cfg.output_dir + "/report.json", resolved, *result.metrics, &result);
    std::printf("e_r_final=%s e_r_spacetime=%s\n",
                format_double(result.metrics->e_r_final).c_str(),
                format_double(result.metrics->e_r_spacetime).c_str());
  }
  std::printf("wall_seconds=%.2f\n", result.wall_seconds);
  return 0;
}

int run_eval(const std::string& config_path, const std::string& checkpoint_dir,
             const std::string& out_path) {
  RunConfig cfg = load_config(config_path);
  const BenchmarkProblem problem = make_problem(cfg.train.benchmark);
  TrainResult result;
  result.clip_c = cfg.train.clip_c > 0.0 ? cfg.train.clip_c : problem.default_clip();
  const double slab = problem.t_final / cfg.train.n_strips;
  for (int k = 0; k < cfg.train.n_strips; ++k) {
    const std::string path = checkpoint_dir + "/checkpoint_strip" + std::to_string(k) + ".json";
    StripResult strip{load_network(path), 0, {}, {}, slab * k,
                      k + 1 == cfg.train.n_strips ? problem.t_final : slab * (k + 1)};
    result.strips.push_back(std::move(strip));
  }
  const ErrorReport report = evaluate_result(result, cfg.train, problem);
  write_report_json(out_path, resolved_config_json(cfg), report, nullptr);
  std::printf("e_r_final=%s e_r_spacetime=%s\n", format_double(report.e_r_final).c_str(),
              format_double(report.e_r_spacetime).c_str());
  return 0;
}

int run_reference(const std::string& benchmark, int cells, double cfl,
                  std::vector<double> times, const std::string& out_dir) {
  const BenchmarkProblem problem = make_problem(benchmark);
  if (times.empty()) times = {problem.t_final};
  fs::create_directories(out_dir);
  nlohmann::json cfg = {{"benchmark", benchmark}, {"cells", cells}, {"cfl", cfl}};
  if (problem.has_exact) {
    for (double t : times) {
      const std::string path = out_dir + "/reference_" + benchmark + "_t" +
                               format_double(t) + ".csv";
      write_exact_csv(path, cfg, problem, cells, t);
      std::printf("wrote %s (exact)\n", path.c_str());
    }
    return 0;
  }
  const RefSolution sol = solve_reference(problem, cells, cfl, times);
  for (std::size_t i = 1; i < sol.snapshots.size(); ++i) {
    const FvState& s = sol.snapshots[i];
    const std::string path = out_dir + "/reference_" + benchmark + "_t" +
                             format_double(s.time) + ".csv";
    write_reference_csv(path, cfg, s);
    std::printf("wrote %s (weno)\n", path.c_str());
  }
  return 0;
}

int run_convergence(const std::string& config_path, const std::string& out_override,
                    bool plot_flag) {
  RunConfig cfg = load_config(config_path);
  if (cfg.levels.size() < 2)
    throw ConfigError("config.levels: convergence needs >= 2 levels");
  if (!out_override.empty()) cfg.output_dir = out_override;
  fs::create_directories(cfg.output_dir);
  const nlohmann::json resolved = resolved_config_json(cfg);

  std::vector<double> hs, ef, es;
  std::vector<std::string> failures;
  for (const LevelCfg& lvl : cfg.levels) {
    TrainConfig t = cfg.train;
    t.n_cells_x = lvl.n_cells_x;
    t.n_cells_t = lvl.n_cells_t;
    if (!lvl.widths.empty()) t.widths = lvl.widths;
    if (lvl.n_train > 0) t.n_train = lvl.n_train;
    const BenchmarkProblem problem = make_problem(t.benchmark);
    const QuadGrid grid(problem.lo, problem.hi, problem.t_final, t.n_cells_x, t.n_cells_t);
    try {
      const TrainResult r = train(t);
      hs.push_back(grid.h());
      ef.push_back(r.metrics->e_r_final);
      es.push_back(r.metrics->e_r_spacetime);
      std::printf("level h=%s: e_r_T=%s e_r=%s\n", format_double(grid.h()).c_str(),
                  format_double(r.metrics->e_r_final).c_str(),
                  format_double(r.metrics->e_r_spacetime).c_str());
    } catch (const TrainDivergence& e) {
      failures.push_back(e.what());
      std::fprintf(stderr, "level h=%s failed: %s\n", format_double(grid.h()).c_str(),
                   e.what());
    }
  }
  if (hs.size() < 2) throw std::runtime_error("convergence: fewer than 2 levels succeeded");
  const double slope_f = fit_loglog_slope(hs, ef);
  const double slope_s = fit_loglog_slope(hs, es);
  {
    CsvWriter csv(cfg.output_dir + "/convergence.csv", resolved,
                  {"h", "e_r_T", "e_r", "slope"});
    for (std::size_t i = 0; i < hs.size(); ++i) csv.row({hs[i], ef[i], es[i], slope_f});
  }
  if (plot_flag || cfg.plot) {
    PlotSeries sf{hs, ef, 30, 60, 180};
    PlotSeries ss{hs, es, 180, 60, 30};
    write_loglog_png(cfg.output_dir + "/convergence.png", {sf, ss});
  }
  std::printf("slope e_r_T=%s slope e_r=%s\n", format_double(slope_f).c_str(),
              format_double(slope_s).c_str());
  return failures.empty() ? 0 : 2;
}

int run_cpwl_verify(const std::string& case_name, std::vector<double> hs, double tol,
                    const std::string& out_dir) {
  fs::create_directories(out_dir);
  nlohmann::json cfg = {{"case", case_name}, {"h", hs}, {"tol", tol}};

  // Smoothing trace of the canonical middle hat on {0, 1/2, 1}.
  {
    const double breaks[3] = {0.0, 0.5, 1.0};
    auto mesh = std::make_shared<SimplicialMesh>(
        make_interval_mesh(std::span<const double>(breaks, 3)));
    CpwlFunction hat(mesh, {0.0, 1.0, 0.0});
    const CompiledCpwl res = compile_cpwl_to_net(hat, tol);
    write_trace_csv(out_dir + "/hat_trace.csv", cfg, res.trace);
    std::ostringstream widths;
    for (int w : res.net.widths()) widths << " " << w;
    std::printf("hat trace: %zu rows, tau_final=%s, net widths%s (%ld params)\n",
                res.trace.size(), format_double(res.tau_final).c_str(),
                widths.str().c_str(), res.net.param_count());
  }

  const BenchmarkProblem problem = make_problem(case_name);
  if (hs.empty()) hs = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  CsvWriter csv(out_dir + "/competitor.csv", cfg,
                {"h", "L_total", "j_ent_star", "l_reg", "l_ibc_initial",
                 "l_ibc_boundary", "argmax_norm"});
  std::vector<double> ls;
  for (double h : hs) {
    const CpwlFunction comp = build_shock_competitor(problem, h);
    const int nx = static_cast<int>(std::lround((problem.hi[0] - problem.lo[0]) / h));
    const int nt = static_cast<int>(std::lround(problem.t_final / h));
    auto grid = std::make_shared<const QuadGrid>(problem.lo, problem.hi,
                                                 problem.t_final, std::vector<int>{nx},
                                                 std::max(1, nt));
    PertConfig pert;
    pert.n_pert = 512;
    pert.seed = 1;
    pert.clip_c = problem.default_clip();
    CpwlField field(comp);
    const LossBreakdown b =
        total_loss(field, problem.flux, problem, pert, grid, 1);
    csv.row({h, b.total, b.j_ent_star, b.l_reg, b.l_ibc_initial, b.l_ibc_boundary,
             b.argmax_norm});
    ls.push_back(b.total);
    std::printf("h=%s: L_total=%s\n", format_double(h).c_str(),
                format_double(b.total).c_str());
  }
  if (hs.size() >= 2)
    std::printf("slope=%s\n", format_double(fit_loglog_slope(hs, ls)).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-residual neural network training for scalar conservation laws"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: physical cores)");

  std::string config_path, out_dir, checkpoint_dir, benchmark, case_name = "standing_shock";
  std::uint64_t seed = 0;
  int cells = 1024;
  double cfl = 0.4, tol = 1e-3;
  std::vector<double> times, hs;
  bool plot_flag = false;
  int retry_seeds = 0;

  CLI::App* trainc = app.add_subcommand("train", "Train on a benchmark (Algorithm 1)");
  trainc->add_option("--config", config_path, "JSON config")->required();
  trainc->add_option("--seed", seed, "Override init and perturbation seeds");
  trainc->add_option("--out", out_dir, "Output directory override");
  trainc->add_option("--retry-seeds", retry_seeds,
                     "Retries with fresh seeds after a divergent run (default 0)");

  CLI::App* evalc = app.add_subcommand("eval", "Evaluate checkpoints against the reference");
  evalc->add_option("--config", config_path, "JSON config")->required();
  evalc->add_option("--checkpoint-dir", checkpoint_dir, "Directory with checkpoints")
      ->required();
  evalc->add_option("--out", out_dir, "Report path (default report.json)");

  CLI::App* refc = app.add_subcommand("reference", "Emit exact/WENO reference snapshots");
  refc->add_option("--benchmark", benchmark, "Benchmark name")->required();
  refc->add_option("--cells", cells, "Cells (default 1024)");
  refc->add_option("--cfl", cfl, "CFL number (default 0.4)");
  refc->add_option("--times", times, "Snapshot times")->delimiter(',');
  refc->add_option("--out", out_dir, "Output directory");

  CLI::App* convc = app.add_subcommand("convergence", "Mesh refinement study");
  convc->add_option("--config", config_path, "JSON config with levels")->required();
  convc->add_option("--out", out_dir, "Output directory override");
  convc->add_flag("--plot", plot_flag, "Write a log-log PNG");

  CLI::App* cpwlc = app.add_subcommand("cpwl-verify",
                                       "Smoothing traces and shock-competitor losses");
  cpwlc->set_help_flag("--help", "Print help");  // frees -h for the mesh-size flag
  cpwlc->add_option("--case", case_name, "Benchmark (standing_shock | moving_shock)");
  cpwlc->add_option("--h", hs, "Competitor mesh sizes")->delimiter(',');
  cpwlc->add_option("--tol", tol, "Hat compile tolerance (default 1e-3)");
  cpwlc->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (threads > 0) ThreadPool::global().set_threads(threads);
  if (out_dir.empty()) out_dir = "out";

  try {
    if (trainc->parsed())
      return run_train(config_path, seed, trainc->count("--out") ? out_dir : "",
                       retry_seeds);
    if (evalc->parsed())
      return run_eval(config_path, checkpoint_dir,
                      evalc->count("--out") ? out_dir : "report.json");
    if (refc->parsed()) return run_reference(benchmark, cells, cfl, times, out_dir);
    if (convc->parsed())
      return run_convergence(config_path, convc->count("--out") ? out_dir : "", plot_flag);
    if (cpwlc->parsed()) return run_cpwl_verify(case_name, hs, tol, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
