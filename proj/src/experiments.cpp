#include "sparsefw/experiments.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <Eigen/Core>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sparsefw/bounds.hpp"
#include "sparsefw/csv.hpp"
#include "sparsefw/domain.hpp"
#include "sparsefw/fw.hpp"
#include "sparsefw/randpoly.hpp"
#include "sparsefw/rng.hpp"
#include "sparsefw/statlab.hpp"

namespace sparsefw::harness {

namespace {

using csvio::CsvWriter;
using csvio::format_real;

// Advisory lock on <out_dir>/.sparsefw.lock; released on destruction. A
// second concurrent run against the same directory fails fast instead of
// interleaving output files.
class DirLock {
 public:
  explicit DirLock(const std::string& path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) return;
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      return;
    }
    locked_ = true;
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;
  ~DirLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  bool ok() const { return locked_; }

 private:
  int fd_ = -1;
  bool locked_ = false;
};

geometry::DomainSpec make_domain(const ExperimentConfig& cfg) {
  if (cfg.domain == "simplex") return geometry::DomainSpec::simplex(cfg.dim);
  if (cfg.domain == "l1") return geometry::DomainSpec::l1_ball(cfg.dim);
  if (cfg.domain == "cube") return geometry::DomainSpec::cube_normalized(cfg.dim);
  if (cfg.domain == "ball") return geometry::DomainSpec::euclidean_ball(cfg.dim);
  if (cfg.domain == "nuclear") {
    if (cfg.rows < 1 || cfg.cols < 1)
      throw std::invalid_argument("config: nuclear domain requires positive rows and cols");
    return geometry::DomainSpec::nuclear_ball(cfg.rows, cfg.cols);
  }
  throw std::invalid_argument("config: unknown domain '" + cfg.domain + "'");
}

fw::Algo algo_from_name(const std::string& name) {
  if (name == "vanilla") return fw::Algo::vanilla;
  if (name == "away") return fw::Algo::away;
  if (name == "fully_corrective") return fw::Algo::fully_corrective;
  throw std::invalid_argument("config: unknown algo '" + name + "'");
}

fw::StepRule rule_from_name(const std::string& name) {
  if (name == "harmonic") return fw::StepRule::harmonic;
  if (name == "line_search") return fw::StepRule::line_search;
  throw std::invalid_argument("config: unknown step_rule '" + name + "'");
}

std::string bool_field(bool b) { return b ? "1" : "0"; }

// Uniform-ish draw from the domain interior; compressibility measurements
// require targets inside the hull.
Eigen::VectorXd interior_target(const geometry::DomainSpec& dom, CounterRng& rng) {
  using K = geometry::DomainSpec::Kind;
  switch (dom.kind) {
    case K::simplex:
      return rng.simplex_uniform(dom.dim);
    case K::l1_ball:
      return rng.l1_interior(dom.dim);
    case K::cube_normalized: {
      const double h = 1.0 / std::sqrt(static_cast<double>(dom.dim));
      Eigen::VectorXd x(dom.dim);
      for (int i = 0; i < dom.dim; ++i) x[i] = rng.uniform(-h, h);
      return x;
    }
    case K::euclidean_ball:
      return rng.unit_vector(dom.dim) *
             std::pow(rng.uniform01(), 1.0 / static_cast<double>(dom.dim));
    case K::nuclear_ball: {
      // convex combination of a few rank-one atoms, flattened row-major
      const int k0 = 3;
      const Eigen::VectorXd w = rng.simplex_uniform(k0);
      Eigen::VectorXd x = Eigen::VectorXd::Zero(dom.dim);
      for (int a = 0; a < k0; ++a) {
        const Eigen::VectorXd u = rng.unit_vector(dom.rows);
        const Eigen::VectorXd v = rng.unit_vector(dom.cols);
        for (int i = 0; i < dom.rows; ++i)
          for (int j = 0; j < dom.cols; ++j) x[i * dom.cols + j] += w[a] * u[i] * v[j];
      }
      return x;
    }
    case K::finite_polytope: {
      const Eigen::VectorXd w = rng.simplex_uniform(static_cast<int>(dom.vertices.size()));
      Eigen::VectorXd x = Eigen::VectorXd::Zero(dom.dim);
      for (int i = 0; i < w.size(); ++i) x += w[i] * dom.vertices[i];
      return x;
    }
  }
  throw std::logic_error("unreachable domain kind");
}

// A derived sub-seed for library calls that take a flat seed instead of a
// (seed, trial, tag) triple. Pure function of its inputs, so reruns and
// worker counts cannot change it.
std::uint64_t sub_seed(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t tag) {
  return CounterRng(master_seed, trial, tag)();
}

struct KindOutput {
  // name -> body, in the order they should be written
  std::vector<std::pair<std::string, std::string>> files;
  int exit_code = kExitOk;
  std::string message;
};

// Runs one job per trial on the pool, collects per-trial row blocks in trial
// order, and appends error rows for trials that threw. Fails the experiment
// when the success fraction drops below the configured floor.
KindOutput collect_trials(const ExperimentConfig& cfg, int workers, CsvWriter& data,
                          std::vector<std::vector<std::vector<std::string>>>& blocks,
                          const std::function<void(int)>& job) {
  KindOutput out;
  const std::vector<std::string> errors = run_indexed_jobs(cfg.n_trials, workers, job);

  int failed = 0;
  CsvWriter err_csv({"trial", "message"});
  for (int t = 0; t < cfg.n_trials; ++t) {
    if (errors[t].empty()) {
      for (auto& row : blocks[t]) data.add_row(std::move(row));
    } else {
      ++failed;
      err_csv.add_row({std::to_string(t), errors[t]});
    }
  }

  out.files.emplace_back("data.csv", data.str());
  if (failed > 0) out.files.emplace_back("errors.csv", err_csv.str());

  const double success = static_cast<double>(cfg.n_trials - failed) / cfg.n_trials;
  if (success < cfg.min_success_fraction) {
    out.exit_code = kExitViolation;
    std::ostringstream msg;
    msg << "only " << (cfg.n_trials - failed) << " of " << cfg.n_trials
        << " trials succeeded (required fraction " << cfg.min_success_fraction << ")";
    out.message = msg.str();
  }
  return out;
}

KindOutput run_fw_run(const ExperimentConfig& cfg, int workers) {
  const geometry::DomainSpec domain = make_domain(cfg);
  const fw::Algo algo = algo_from_name(cfg.algo);
  const fw::StepRule rule = rule_from_name(cfg.step_rule);
  const std::string hash = std::to_string(config_hash(cfg));
  const std::string seed = std::to_string(cfg.master_seed);

  CsvWriter data({"config_hash", "seed", "trial", "iter", "f", "gap", "sparsity", "gamma",
                  "step_kind"});
  std::vector<std::vector<std::vector<std::string>>> blocks(cfg.n_trials);

  auto job = [&](int t) {
    CounterRng tgen(cfg.master_seed, static_cast<std::uint64_t>(t), stream::kTarget);
    CounterRng lmo_rng(cfg.master_seed, static_cast<std::uint64_t>(t), stream::kLmoStart);
    fw::QuadraticObjective obj{tgen.gaussian_vector(domain.dim) * cfg.target_scale};
    fw::RunOptions opts;
    opts.steps = cfg.steps;
    opts.rule = rule;
    opts.rng = &lmo_rng;
    const fw::RunTrace trace = fw::run_algo(algo, domain, obj, opts);
    for (const auto& row : trace.rows) {
      blocks[t].push_back({hash, seed, std::to_string(t), std::to_string(row.iter),
                           format_real(row.f), format_real(row.gap),
                           std::to_string(row.sparsity), format_real(row.gamma),
                           fw::step_kind_name(row.kind)});
    }
  };
  return collect_trials(cfg, workers, data, blocks, job);
}

KindOutput run_compressibility(const ExperimentConfig& cfg, int workers) {
  if (cfg.eps_grid.empty())
    throw std::invalid_argument("config: compressibility requires eps_grid");
  const geometry::DomainSpec domain = make_domain(cfg);
  const fw::Algo algo = algo_from_name(cfg.algo);
  const std::string hash = std::to_string(config_hash(cfg));
  const std::string seed = std::to_string(cfg.master_seed);

  CsvWriter data({"config_hash", "seed", "trial", "eps", "target_index", "k", "saturated",
                  "error", "lmo_calls"});
  std::vector<std::vector<std::vector<std::string>>> blocks(cfg.n_trials);

  auto job = [&](int t) {
    CounterRng tgen(cfg.master_seed, static_cast<std::uint64_t>(t), stream::kTarget);
    const Eigen::VectorXd target = interior_target(domain, tgen);
    for (double eps : cfg.eps_grid) {
      CounterRng lmo_rng(cfg.master_seed, static_cast<std::uint64_t>(t), stream::kLmoStart);
      const fw::MinSparsityResult res =
          fw::min_sparsity_to_tolerance(domain, {target}, eps, algo, cfg.steps, &lmo_rng);
      for (const auto& rec : res.records) {
        blocks[t].push_back({hash, seed, std::to_string(t), format_real(eps),
                             std::to_string(t), std::to_string(rec.k),
                             bool_field(rec.saturated), format_real(rec.error),
                             std::to_string(rec.lmo_calls)});
      }
    }
  };
  return collect_trials(cfg, workers, data, blocks, job);
}

KindOutput run_bounds_table(const ExperimentConfig& cfg) {
  if (cfg.d_grid.empty()) throw std::invalid_argument("config: bounds_table requires d_grid");

  std::vector<bounds::BoundReport> reports;
  if (cfg.domain == "l1") {
    if (cfg.delta_grid.empty())
      throw std::invalid_argument("config: bounds_table on l1 requires delta_grid");
    for (int d : cfg.d_grid)
      for (double delta : cfg.delta_grid) reports.push_back(bounds::lower_bound_l1(d, delta));
  } else if (cfg.domain == "cube") {
    if (cfg.eps_grid.empty())
      throw std::invalid_argument("config: bounds_table on cube requires eps_grid");
    for (int d : cfg.d_grid)
      for (double eps : cfg.eps_grid) reports.push_back(bounds::lower_bound_cube(d, eps));
  } else if (cfg.domain == "nuclear") {
    if (cfg.delta_grid.empty())
      throw std::invalid_argument("config: bounds_table on nuclear requires delta_grid");
    for (int d : cfg.d_grid)
      for (double delta : cfg.delta_grid)
        reports.push_back(bounds::lower_bound_nuclear_delta(d, d, delta));
  } else {
    throw std::invalid_argument("config: bounds_table supports domains l1, cube, nuclear");
  }

  const std::string hash = std::to_string(config_hash(cfg));
  const std::string seed = std::to_string(cfg.master_seed);

  // reuse the report's own CSV serialization and prepend run identity
  std::vector<std::string> header = {"config_hash", "seed"};
  {
    const csvio::CsvTable probe =
        csvio::read_csv_text(bounds::BoundReport::csv_header() + "\n");
    header.insert(header.end(), probe.header.begin(), probe.header.end());
  }
  CsvWriter data(header);
  for (const auto& rep : reports) {
    const csvio::CsvTable row =
        csvio::read_csv_text(bounds::BoundReport::csv_header() + "\n" + rep.csv_row() + "\n");
    std::vector<std::string> fields = {hash, seed};
    fields.insert(fields.end(), row.rows.at(0).begin(), row.rows.at(0).end());
    data.add_row(std::move(fields));
  }

  KindOutput out;
  out.files.emplace_back("data.csv", data.str());
  return out;
}

KindOutput run_randpoly_study(const ExperimentConfig& cfg, int workers) {
  const randpoly::PolytopeKind kind = cfg.polytope == "gaussian"
                                          ? randpoly::PolytopeKind::gaussian
                                          : randpoly::PolytopeKind::spherical;
  const std::string hash = std::to_string(config_hash(cfg));

  CsvWriter data({"config_hash", "trial", "d", "m", "kind", "seed", "r", "n_dirs", "result",
                  "bound_value", "delta", "varv_root", "normalization", "tail_exponent"});
  std::vector<std::vector<std::vector<std::string>>> blocks(cfg.n_trials);

  // trials run on the pool, so each pipeline call gets a single worker
  const int inner_workers = cfg.n_trials == 1 ? std::max(1, workers) : 1;
  auto job = [&](int t) {
    const std::uint64_t trial_seed =
        sub_seed(cfg.master_seed, static_cast<std::uint64_t>(t), stream::kVertices);
    const bounds::BoundReport rep = randpoly::randpoly_bound_pipeline(
        kind, cfg.dim, cfg.n_vertices, cfg.delta, trial_seed, cfg.n_dirs, inner_workers);
    // containment is tested at 1/(2 sqrt(d)) for spherical samples and at 1
    // on the raw gaussian sample before rescaling
    const double r_tested = kind == randpoly::PolytopeKind::spherical
                                ? 1.0 / (2.0 * std::sqrt(static_cast<double>(cfg.dim)))
                                : 1.0;
    blocks[t].push_back({hash, std::to_string(t), std::to_string(rep.d),
                         std::to_string(cfg.n_vertices), cfg.polytope,
                         std::to_string(trial_seed), format_real(r_tested),
                         std::to_string(cfg.n_dirs),
                         rep.containment_refuted ? "violated" : "no_violation_found",
                         format_real(rep.value), format_real(cfg.delta),
                         format_real(rep.varv_root), format_real(rep.normalization),
                         format_real(rep.tail_exponent)});
  };
  return collect_trials(cfg, workers, data, blocks, job);
}

KindOutput run_cap_study(const ExperimentConfig& cfg) {
  if (cfg.d_grid.empty()) throw std::invalid_argument("config: cap_study requires d_grid");
  const std::string hash = std::to_string(config_hash(cfg));
  const std::string seed = std::to_string(cfg.master_seed);

  CsvWriter data({"config_hash", "seed", "d", "r", "exact", "mc", "mc_se", "b2", "samples"});
  std::uint64_t row_index = 0;
  for (int d : cfg.d_grid) {
    std::vector<double> radii = cfg.r_grid;
    if (radii.empty()) radii.push_back(1.0 / (2.0 * std::sqrt(static_cast<double>(d))));
    for (double r : radii) {
      const double exact = randpoly::cap_measure_exact(r, d);
      const double mc = randpoly::cap_measure_mc(
          r, d, cfg.mc_samples, sub_seed(cfg.master_seed, row_index, stream::kDirection));
      const double se =
          std::sqrt(std::max(0.0, mc * (1.0 - mc) / static_cast<double>(cfg.mc_samples)));
      // coupling bound certified for mu(r) with eps = 2r, t = 1
      const double b2 = randpoly::cap_lower_bound_gaussian(2.0 * r, 1.0, d);
      data.add_row({hash, seed, std::to_string(d), format_real(r), format_real(exact),
                    format_real(mc), format_real(se), format_real(b2),
                    std::to_string(cfg.mc_samples)});
      ++row_index;
    }
  }

  KindOutput out;
  out.files.emplace_back("data.csv", data.str());
  return out;
}

KindOutput run_aggregation_kind(const ExperimentConfig& cfg, int workers) {
  const fw::Algo algo = algo_from_name(cfg.algo);
  const std::string hash = std::to_string(config_hash(cfg));
  const std::string seed = std::to_string(cfg.master_seed);

  CsvWriter data({"config_hash", "seed", "trial", "n", "m", "k", "opt_err", "excess_risk",
                  "term_sparse", "term_deviation", "envelope_excess"});
  std::vector<std::vector<std::vector<std::string>>> blocks(cfg.n_trials);

  auto job = [&](int t) {
    CounterRng dict_rng(cfg.master_seed, static_cast<std::uint64_t>(t), stream::kDictionary);
    std::vector<Eigen::VectorXd> dictionary;
    dictionary.reserve(cfg.m);
    for (int i = 0; i < cfg.m; ++i) dictionary.push_back(dict_rng.unit_vector(cfg.dim));

    Eigen::VectorXd mu_star = Eigen::VectorXd::Zero(cfg.dim);
    if (cfg.mu_star_mode == "hull") {
      CounterRng place(cfg.master_seed, static_cast<std::uint64_t>(t), stream::kPlacement);
      const Eigen::VectorXd w = place.simplex_uniform(cfg.m);
      for (int i = 0; i < cfg.m; ++i) mu_star += w[i] * dictionary[i];
    }

    const statlab::SequenceModelInstance inst = statlab::make_instance(
        mu_star, dictionary, cfg.n_samples, cfg.master_seed, static_cast<std::uint64_t>(t));
    const statlab::AggregationRun run = statlab::run_aggregation(inst, cfg.steps, algo, cfg.eta);
    for (const auto& rec : run.records) {
      blocks[t].push_back({hash, seed, std::to_string(t), std::to_string(cfg.n_samples),
                           std::to_string(cfg.m), std::to_string(rec.k),
                           format_real(rec.opt_err), format_real(rec.excess_risk),
                           format_real(rec.term_sparse), format_real(rec.term_deviation),
                           format_real(rec.envelope_excess)});
    }
  };
  return collect_trials(cfg, workers, data, blocks, job);
}

KindOutput run_fast_rate(const ExperimentConfig& cfg) {
  if (cfg.n_grid.empty()) throw std::invalid_argument("config: fast_rate requires n_grid");
  const std::string hash = std::to_string(config_hash(cfg));
  const std::string seed = std::to_string(cfg.master_seed);

  const statlab::FastRateStudy study =
      cfg.placement == "boundary"
          ? statlab::exterior_control_study(cfg.n_grid, cfg.eta, cfg.master_seed, cfg.n_trials)
          : statlab::interior_fast_rate_study(cfg.alpha, cfg.c, cfg.n_grid, cfg.m, cfg.eta,
                                              cfg.master_seed, cfg.n_trials);

  CsvWriter data({"config_hash", "n", "m", "alpha", "c", "k", "seed", "opt_err", "excess_risk",
                  "bound_value", "rho", "erm_interior_radius"});
  for (const auto& row : study.rows) {
    data.add_row({hash, std::to_string(row.n), std::to_string(row.m), format_real(row.alpha),
                  format_real(row.c), std::to_string(row.k), std::to_string(row.seed_index),
                  format_real(row.opt_err), format_real(row.excess_risk),
                  format_real(row.bound_value), format_real(row.rho),
                  format_real(row.erm_interior_radius)});
  }

  CsvWriter slope({"config_hash", "seed", "n", "k", "rho", "median_excess", "slope"});
  for (std::size_t i = 0; i < study.n_grid.size(); ++i) {
    slope.add_row({hash, seed, std::to_string(study.n_grid[i]),
                   std::to_string(study.k_of_n[i]), format_real(study.rho_of_n[i]),
                   format_real(study.median_excess[i]), format_real(study.slope)});
  }

  KindOutput out;
  out.files.emplace_back("data.csv", data.str());
  out.files.emplace_back("slope.csv", slope.str());
  return out;
}

KindOutput run_linear_rate(const ExperimentConfig& cfg) {
  if (cfg.r_grid.empty()) throw std::invalid_argument("config: linear_rate requires r_grid");
  const geometry::DomainSpec domain = make_domain(cfg);
  const std::string hash = std::to_string(config_hash(cfg));
  const std::string seed = std::to_string(cfg.master_seed);

  const statlab::LinearRateResult res =
      statlab::linear_rate_check(domain, cfg.r_grid, cfg.steps, cfg.n_trials, cfg.master_seed);

  CsvWriter data({"config_hash", "seed", "r", "seed_index", "eps0", "k_checked",
                  "worst_margin", "satisfied", "contraction"});
  for (const auto& row : res.rows) {
    data.add_row({hash, seed, format_real(row.r), std::to_string(row.seed_index),
                  format_real(row.eps0), std::to_string(row.k_checked),
                  format_real(row.worst_margin), bool_field(row.satisfied),
                  format_real(row.contraction)});
  }

  KindOutput out;
  out.files.emplace_back("data.csv", data.str());
  if (!res.all_satisfied) {
    out.exit_code = kExitViolation;
    out.message = "linear-rate envelope violated for at least one (r, seed)";
  }
  return out;
}

std::string manifest_text(const ExperimentConfig& cfg, const KindOutput& out, int workers,
                          double wall_seconds) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(serialize_config(cfg));
  j["config_hash"] = std::to_string(config_hash(cfg));
  j["master_seed"] = cfg.master_seed;
  j["workers"] = workers;
  j["wall_time_seconds"] = wall_seconds;
  std::vector<std::string> names;
  for (const auto& [name, body] : out.files) {
    (void)body;
    names.push_back(name);
  }
  j["files"] = names;
  j["versions"] = {
      {"sparsefw", kVersion},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION)},
      {"compiler", __VERSION__},
      {"cplusplus", static_cast<long>(__cplusplus)},
  };
  return j.dump(2) + "\n";
}

}  // namespace

std::vector<std::string> run_indexed_jobs(int n_jobs, int workers,
                                          const std::function<void(int)>& job) {
  std::vector<std::string> errors(static_cast<std::size_t>(std::max(0, n_jobs)));
  if (n_jobs <= 0) return errors;

  std::atomic<int> next{0};
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n_jobs) break;
      try {
        job(i);
      } catch (const std::exception& e) {
        errors[i] = e.what()[0] ? e.what() : "error";
      } catch (...) {
        errors[i] = "unknown error";
      }
    }
  };

  const int n_threads = std::max(1, std::min(workers, n_jobs));
  if (n_threads == 1) {
    worker();
    return errors;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return errors;
}

RunResult run_experiment(const ExperimentConfig& cfg, int workers) {
  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) {
    res.exit_code = kExitConfig;
    res.message = "cannot create output directory '" + cfg.out_dir + "': " + ec.message();
    return res;
  }

  DirLock lock(cfg.out_dir + "/.sparsefw.lock");
  if (!lock.ok()) {
    res.exit_code = kExitConfig;
    res.message = "output directory '" + cfg.out_dir + "' is locked by another run";
    return res;
  }

  KindOutput out;
  try {
    switch (cfg.kind) {
      case ExperimentKind::fw_run: out = run_fw_run(cfg, workers); break;
      case ExperimentKind::compressibility: out = run_compressibility(cfg, workers); break;
      case ExperimentKind::bounds_table: out = run_bounds_table(cfg); break;
      case ExperimentKind::randpoly_study: out = run_randpoly_study(cfg, workers); break;
      case ExperimentKind::cap_study: out = run_cap_study(cfg); break;
      case ExperimentKind::aggregation: out = run_aggregation_kind(cfg, workers); break;
      case ExperimentKind::fast_rate: out = run_fast_rate(cfg); break;
      case ExperimentKind::linear_rate: out = run_linear_rate(cfg); break;
    }
  } catch (const std::invalid_argument& e) {
    res.exit_code = kExitConfig;
    res.message = e.what();
    return res;
  } catch (const std::exception& e) {
    res.exit_code = kExitViolation;
    res.message = e.what();
    return res;
  }

  for (const auto& [name, body] : out.files) {
    std::ofstream f(std::filesystem::path(cfg.out_dir) / name, std::ios::binary);
    if (!f) {
      res.exit_code = kExitConfig;
      res.message = "cannot write '" + name + "' in '" + cfg.out_dir + "'";
      return res;
    }
    f << body;
    res.files.push_back(name);
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    std::ofstream f(std::filesystem::path(cfg.out_dir) / "manifest", std::ios::binary);
    if (!f) {
      res.exit_code = kExitConfig;
      res.message = "cannot write manifest in '" + cfg.out_dir + "'";
      return res;
    }
    f << manifest_text(cfg, out, workers, wall);
    res.files.push_back("manifest");
  }

  res.exit_code = out.exit_code;
  res.message = out.message;
  return res;
}

RunResult emit_plot_data(const std::string& csv_in, const PlotSpec& spec,
                         const std::string& out_path) {
  RunResult res;
  csvio::CsvTable table;
  try {
    table = csvio::read_csv(csv_in);
  } catch (const std::exception& e) {
    res.exit_code = kExitConfig;
    res.message = e.what();
    return res;
  }

  auto column_or_fail = [&](const std::string& name) {
    const int idx = table.column(name);
    if (idx < 0) {
      std::ostringstream msg;
      msg << "column '" << name << "' not found; available columns:";
      for (const auto& h : table.header) msg << " " << h;
      throw std::invalid_argument(msg.str());
    }
    return idx;
  };

  int xi = 0, yi = 0, gi = -1;
  try {
    xi = column_or_fail(spec.x);
    yi = column_or_fail(spec.y);
    if (!spec.group_by.empty()) gi = column_or_fail(spec.group_by);
  } catch (const std::exception& e) {
    res.exit_code = kExitConfig;
    res.message = e.what();
    return res;
  }

  auto parse_num = [](const std::string& s, double& v) {
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end != s.c_str() && *end == '\0' && std::isfinite(v);
  };

  // group -> x -> samples; map keys give a deterministic output order
  std::map<std::string, std::map<double, std::vector<double>>> groups;
  for (const auto& row : table.rows) {
    double x = 0.0, y = 0.0;
    if (!parse_num(row[xi], x) || !parse_num(row[yi], y)) continue;
    if (spec.log_x && x <= 0.0) continue;
    if (spec.log_y && y <= 0.0) continue;
    groups[gi < 0 ? std::string() : row[gi]][x].push_back(y);
  }

  std::ostringstream body;
  bool first = true;
  for (auto& [group, by_x] : groups) {
    if (!first) body << "\n";
    first = false;
    body << "# group: " << (group.empty() ? "all" : group) << "\n";
    std::vector<double> xs, meds;
    for (auto& [x, ys] : by_x) {
      const double med = statlab::median_of(ys);
      body << format_real(x) << " " << format_real(med) << "\n";
      xs.push_back(spec.log_x ? std::log(x) : x);
      meds.push_back(spec.log_y ? std::log(med) : med);
    }
    if (spec.fit_slope && xs.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double n = static_cast<double>(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += meds[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * meds[i];
      }
      const double denom = n * sxx - sx * sx;
      if (denom > 0) body << "# slope: " << format_real((n * sxy - sx * sy) / denom) << "\n";
    }
  }

  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    res.exit_code = kExitConfig;
    res.message = "cannot write '" + out_path + "'";
    return res;
  }
  f << body.str();
  res.files.push_back(out_path);
  return res;
}

}  // namespace sparsefw::harness
