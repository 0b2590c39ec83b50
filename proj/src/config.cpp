#include "sparsefw/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sparsefw::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument("config field '" + field + "': " + what);
}

double get_real(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

long get_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<long>();
}

std::uint64_t get_u64(const json& v, const std::string& field) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    fail(field, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string get_str(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

template <typename T, typename F>
std::vector<T> get_array(const json& v, const std::string& field, F elem) {
  if (!v.is_array()) fail(field, "expected an array");
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(elem(e, field));
  return out;
}

const std::set<std::string>& known_string_values(const std::string& field) {
  static const std::set<std::string> domains{"simplex", "l1", "cube", "nuclear", "ball"};
  static const std::set<std::string> algos{"vanilla", "away", "fully_corrective"};
  static const std::set<std::string> rules{"line_search", "harmonic"};
  static const std::set<std::string> placements{"interior", "boundary"};
  static const std::set<std::string> modes{"hull", "zero"};
  static const std::set<std::string> polytopes{"spherical", "gaussian"};
  if (field == "domain") return domains;
  if (field == "algo") return algos;
  if (field == "step_rule") return rules;
  if (field == "placement") return placements;
  if (field == "mu_star_mode") return modes;
  return polytopes;
}

std::string checked_choice(const json& v, const std::string& field) {
  const std::string s = get_str(v, field);
  const auto& allowed = known_string_values(field);
  if (!allowed.count(s)) {
    std::string msg = "unknown value '" + s + "'; allowed:";
    for (const auto& a : allowed) msg += " " + a;
    fail(field, msg);
  }
  return s;
}

void validate(const ExperimentConfig& c) {
  auto positive = [](double v, const char* f) {
    if (!(v > 0)) fail(f, "must be positive");
  };
  if (c.dim < 1) fail("dim", "must be at least 1");
  if (c.domain == "nuclear") {
    if (c.rows < 1 || c.cols < 1) fail("rows", "nuclear domain needs positive rows and cols");
  }
  if (c.steps < 1) fail("steps", "must be at least 1");
  positive(c.target_scale, "target_scale");
  if (!(c.alpha > 0.5 && c.alpha <= 1.0)) fail("alpha", "must lie in (1/2, 1]");
  positive(c.c, "c");
  if (c.m < 2) fail("m", "must be at least 2");
  if (!(c.eta > 0.0 && c.eta <= 1.0)) fail("eta", "must lie in (0, 1]");
  if (c.n_samples < 1) fail("n_samples", "must be at least 1");
  for (long n : c.n_grid)
    if (n < 2) fail("n_grid", "entries must be at least 2");
  for (double e : c.eps_grid)
    if (!(e > 0)) fail("eps_grid", "entries must be positive");
  for (double d : c.delta_grid)
    if (!(d > 0)) fail("delta_grid", "entries must be positive");
  for (double r : c.r_grid)
    if (r < 0) fail("r_grid", "entries must be nonnegative");
  for (int d : c.d_grid)
    if (d < 1) fail("d_grid", "entries must be at least 1");
  if (c.n_vertices < 2) fail("n_vertices", "must be at least 2");
  if (!(c.delta > 0 && c.delta < 1)) fail("delta", "must lie in (0, 1)");
  if (c.n_dirs < 1) fail("n_dirs", "must be at least 1");
  if (c.mc_samples < 1) fail("mc_samples", "must be at least 1");
  if (c.n_trials < 1) fail("n_trials", "must be at least 1");
  if (!(c.min_success_fraction > 0.0 && c.min_success_fraction <= 1.0))
    fail("min_success_fraction", "must lie in (0, 1]");
  if (c.out_dir.empty()) fail("out_dir", "must be nonempty");
}

}  // namespace

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::fw_run: return "fw_run";
    case ExperimentKind::compressibility: return "compressibility";
    case ExperimentKind::bounds_table: return "bounds_table";
    case ExperimentKind::randpoly_study: return "randpoly_study";
    case ExperimentKind::cap_study: return "cap_study";
    case ExperimentKind::aggregation: return "aggregation";
    case ExperimentKind::fast_rate: return "fast_rate";
    case ExperimentKind::linear_rate: return "linear_rate";
  }
  return "?";
}

ExperimentKind kind_from_name(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(ExperimentKind::linear_rate); ++k) {
    const auto kind = static_cast<ExperimentKind>(k);
    if (name == kind_name(kind)) return kind;
  }
  fail("kind", "unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_config_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

  ExperimentConfig c;
  bool saw_kind = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      c.kind = kind_from_name(get_str(value, key));
      saw_kind = true;
    } else if (key == "domain") {
      c.domain = checked_choice(value, key);
    } else if (key == "dim") {
      c.dim = static_cast<int>(get_int(value, key));
    } else if (key == "rows") {
      c.rows = static_cast<int>(get_int(value, key));
    } else if (key == "cols") {
      c.cols = static_cast<int>(get_int(value, key));
    } else if (key == "algo") {
      c.algo = checked_choice(value, key);
    } else if (key == "step_rule") {
      c.step_rule = checked_choice(value, key);
    } else if (key == "steps") {
      c.steps = static_cast<int>(get_int(value, key));
    } else if (key == "target_scale") {
      c.target_scale = get_real(value, key);
    } else if (key == "alpha") {
      c.alpha = get_real(value, key);
    } else if (key == "c") {
      c.c = get_real(value, key);
    } else if (key == "m") {
      c.m = static_cast<int>(get_int(value, key));
    } else if (key == "eta") {
      c.eta = get_real(value, key);
    } else if (key == "placement") {
      c.placement = checked_choice(value, key);
    } else if (key == "mu_star_mode") {
      c.mu_star_mode = checked_choice(value, key);
    } else if (key == "n_samples") {
      c.n_samples = get_int(value, key);
    } else if (key == "n_grid") {
      c.n_grid = get_array<long>(value, key, get_int);
    } else if (key == "eps_grid") {
      c.eps_grid = get_array<double>(value, key, get_real);
    } else if (key == "delta_grid") {
      c.delta_grid = get_array<double>(value, key, get_real);
    } else if (key == "r_grid") {
      c.r_grid = get_array<double>(value, key, get_real);
    } else if (key == "d_grid") {
      c.d_grid = get_array<int>(value, key, [](const json& v, const std::string& f) {
        return static_cast<int>(get_int(v, f));
      });
    } else if (key == "polytope") {
      c.polytope = checked_choice(value, key);
    } else if (key == "n_vertices") {
      c.n_vertices = static_cast<int>(get_int(value, key));
    } else if (key == "delta") {
      c.delta = get_real(value, key);
    } else if (key == "n_dirs") {
      c.n_dirs = static_cast<int>(get_int(value, key));
    } else if (key == "mc_samples") {
      c.mc_samples = get_int(value, key);
    } else if (key == "master_seed") {
      c.master_seed = get_u64(value, key);
    } else if (key == "n_trials") {
      c.n_trials = static_cast<int>(get_int(value, key));
    } else if (key == "min_success_fraction") {
      c.min_success_fraction = get_real(value, key);
    } else if (key == "out_dir") {
      c.out_dir = get_str(value, key);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (!saw_kind) fail("kind", "missing");
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["kind"] = kind_name(c.kind);
  j["domain"] = c.domain;
  j["dim"] = c.dim;
  j["rows"] = c.rows;
  j["cols"] = c.cols;
  j["algo"] = c.algo;
  j["step_rule"] = c.step_rule;
  j["steps"] = c.steps;
  j["target_scale"] = c.target_scale;
  j["alpha"] = c.alpha;
  j["c"] = c.c;
  j["m"] = c.m;
  j["eta"] = c.eta;
  j["placement"] = c.placement;
  j["mu_star_mode"] = c.mu_star_mode;
  j["n_samples"] = c.n_samples;
  j["n_grid"] = c.n_grid;
  j["eps_grid"] = c.eps_grid;
  j["delta_grid"] = c.delta_grid;
  j["r_grid"] = c.r_grid;
  j["d_grid"] = c.d_grid;
  j["polytope"] = c.polytope;
  j["n_vertices"] = c.n_vertices;
  j["delta"] = c.delta;
  j["n_dirs"] = c.n_dirs;
  j["mc_samples"] = c.mc_samples;
  j["master_seed"] = c.master_seed;
  j["n_trials"] = c.n_trials;
  j["min_success_fraction"] = c.min_success_fraction;
  j["out_dir"] = c.out_dir;
  return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  // the output location is not part of the experiment's identity: the same
  // study run into two directories must carry the same hash in its data rows
  ExperimentConfig keyed = cfg;
  keyed.out_dir.clear();
  const std::string text = serialize_config(keyed);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace sparsefw::harness
