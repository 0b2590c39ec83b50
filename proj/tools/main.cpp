#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsefw/config.hpp"
#include "sparsefw/csv.hpp"
#include "sparsefw/experiments.hpp"

namespace {

using sparsefw::harness::ExperimentConfig;
using sparsefw::harness::ExperimentKind;

int default_workers() {
  const char* s = std::getenv("SPARSEFW_WORKERS");
  if (s == nullptr || *s == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || v < 1)
    throw std::invalid_argument("config: SPARSEFW_WORKERS must be a positive integer");
  return static_cast<int>(v);
}

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  int trials = 0;
  std::string out;
  int workers = 0;
  CLI::Option* config_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
};

void report(const sparsefw::harness::RunResult& r, const std::string& out_dir) {
  if (!r.message.empty()) std::cerr << "sparsefw: " << r.message << "\n";
  for (const auto& f : r.files) std::cout << out_dir << "/" << f << "\n";
}

void print_aligned(const std::string& csv_path) {
  const sparsefw::csvio::CsvTable table = sparsefw::csvio::read_csv(csv_path);
  std::vector<std::size_t> width(table.header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  };
  widen(table.header);
  for (const auto& row : table.rows) widen(row);
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i)
      std::cout << (i ? "  " : "") << row[i] << std::string(width[i] - row[i].size(), ' ');
    std::cout << "\n";
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
}

// Registers the shared flags on `cmd` and wires a callback that materializes
// the config (built-in defaults, then --config, then flag overrides) and runs
// the experiment.
void attach_experiment(CLI::App* cmd, ExperimentKind kind, int& exit_code,
                       std::function<void(ExperimentConfig&)> defaults = {},
                       bool print_table = false) {
  auto fl = std::make_shared<CommonFlags>();
  fl->config_opt = cmd->add_option("--config", fl->config_path, "experiment config (JSON)");
  fl->seed_opt = cmd->add_option("--seed", fl->seed, "master seed override");
  fl->trials_opt = cmd->add_option("--trials", fl->trials, "number of trials");
  fl->out_opt = cmd->add_option("--out", fl->out, "output directory");
  fl->workers_opt =
      cmd->add_option("--workers", fl->workers, "worker threads (default: $SPARSEFW_WORKERS or 1)");

  cmd->callback([fl, kind, &exit_code, defaults = std::move(defaults), print_table] {
    try {
      ExperimentConfig cfg;
      cfg.kind = kind;
      if (defaults) defaults(cfg);
      if (fl->config_opt->count() > 0) {
        cfg = sparsefw::harness::load_config(fl->config_path);
        if (cfg.kind != kind)
          throw std::invalid_argument(std::string("config: kind '") +
                                      sparsefw::harness::kind_name(cfg.kind) +
                                      "' does not match subcommand '" +
                                      sparsefw::harness::kind_name(kind) + "'");
      }
      if (fl->seed_opt->count() > 0) cfg.master_seed = fl->seed;
      if (fl->trials_opt->count() > 0) {
        if (fl->trials < 1) throw std::invalid_argument("config: trials must be >= 1");
        cfg.n_trials = fl->trials;
      }
      if (fl->out_opt->count() > 0) cfg.out_dir = fl->out;
      int workers = fl->workers_opt->count() > 0 ? fl->workers : default_workers();
      if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");

      const auto r = sparsefw::harness::run_experiment(cfg, workers);
      report(r, cfg.out_dir);
      if (print_table && r.exit_code == 0) print_aligned(cfg.out_dir + "/data.csv");
      exit_code = r.exit_code;
    } catch (const std::invalid_argument& e) {
      std::cerr << "sparsefw: " << e.what() << "\n";
      exit_code = sparsefw::harness::kExitConfig;
    } catch (const std::exception& e) {
      std::cerr << "sparsefw: " << e.what() << "\n";
      exit_code = sparsefw::harness::kExitViolation;
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse Frank-Wolfe laboratory"};
  app.require_subcommand(1);
  int exit_code = 0;

  auto* fw = app.add_subcommand("fw", "Frank-Wolfe runs on standard domains");
  fw->require_subcommand(1);
  attach_experiment(fw->add_subcommand("run", "trace per-iterate error, gap, and sparsity"),
                    ExperimentKind::fw_run, exit_code);
  attach_experiment(
      fw->add_subcommand("compress", "measured sparsity needed per accuracy level"),
      ExperimentKind::compressibility, exit_code, [](ExperimentConfig& c) {
        c.eps_grid = {0.5, 0.25, 0.125, 0.0625};
        c.steps = 200;
      });

  auto* bounds = app.add_subcommand("bounds", "sparsity lower-bound tables");
  bounds->require_subcommand(1);
  attach_experiment(
      bounds->add_subcommand("table", "tabulate lower bounds over grids"),
      ExperimentKind::bounds_table, exit_code,
      [](ExperimentConfig& c) {
        c.domain = "l1";
        c.d_grid = {8, 16, 32, 64, 128};
        c.delta_grid = {0.015625};
      },
      /*print_table=*/true);

  auto* randpoly = app.add_subcommand("randpoly", "random polytope studies");
  randpoly->require_subcommand(1);
  attach_experiment(
      randpoly->add_subcommand("study", "average-case bound pipeline per trial"),
      ExperimentKind::randpoly_study, exit_code, [](ExperimentConfig& c) {
        c.dim = 6;
        c.n_vertices = 200;
      });
  attach_experiment(randpoly->add_subcommand("cap", "spherical cap measures and bounds"),
                    ExperimentKind::cap_study, exit_code,
                    [](ExperimentConfig& c) { c.d_grid = {6, 50, 200}; });

  auto* stat = app.add_subcommand("stat", "statistical aggregation studies");
  stat->require_subcommand(1);
  attach_experiment(
      stat->add_subcommand("aggregate", "risk diagnostics along one aggregation path"),
      ExperimentKind::aggregation, exit_code, [](ExperimentConfig& c) {
        c.dim = 16;
        c.m = 16;
        c.steps = 64;
      });
  attach_experiment(
      stat->add_subcommand("fastrate", "early-stopped excess-risk scaling in n"),
      ExperimentKind::fast_rate, exit_code, [](ExperimentConfig& c) {
        c.n_grid = {256, 512, 1024, 2048};
        c.n_trials = 20;
      });
  attach_experiment(
      stat->add_subcommand("linrate", "interior linear-rate envelope check"),
      ExperimentKind::linear_rate, exit_code, [](ExperimentConfig& c) {
        c.domain = "simplex";
        c.dim = 20;
        c.r_grid = {0.0, 0.02, 0.04};
        c.steps = 400;
        c.n_trials = 10;
      });

  auto* plot = app.add_subcommand("plot", "reduce a result CSV to plot-ready medians");
  {
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>("plot.txt");
    auto spec = std::make_shared<sparsefw::harness::PlotSpec>();
    auto linear_x = std::make_shared<bool>(false);
    auto linear_y = std::make_shared<bool>(false);
    auto no_fit = std::make_shared<bool>(false);
    plot->add_option("--in", *in, "input CSV")->required();
    plot->add_option("--x", spec->x, "x column")->required();
    plot->add_option("--y", spec->y, "y column (per-x median)")->required();
    plot->add_option("--group", spec->group_by, "optional grouping column");
    plot->add_option("--out", *out, "output path");
    plot->add_flag("--linear-x", *linear_x, "keep x linear (default: log)");
    plot->add_flag("--linear-y", *linear_y, "keep y linear (default: log)");
    plot->add_flag("--no-fit", *no_fit, "skip the least-squares slope");
    plot->callback([in, out, spec, linear_x, linear_y, no_fit, &exit_code] {
      spec->log_x = !*linear_x;
      spec->log_y = !*linear_y;
      spec->fit_slope = !*no_fit;
      const auto r = sparsefw::harness::emit_plot_data(*in, *spec, *out);
      if (!r.message.empty()) std::cerr << "sparsefw: " << r.message << "\n";
      for (const auto& f : r.files) std::cout << f << "\n";
      exit_code = r.exit_code;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sparsefw::harness::kExitConfig;
  }
  return exit_code;
}
