#include "shearlab/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace shearlab {

namespace {

using nlohmann::json;

const std::set<std::string> kExperiments{"ed-sweep", "toy-model", "suppression", "contraction", "gliding", "checks"};
const std::set<std::string> kFlows{"none", "stationary", "log_shift", "rewound"};
const std::set<std::string> kDiagnostics{"norms", "regions", "z_norm", "functional"};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw std::invalid_argument("unknown config key '" + where + key + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument("config key '" + where + key + "': " + e.what());
  }
}

void positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw std::invalid_argument("config key '" + key + "' must be positive");
}

}  // namespace

json RunConfig::to_json() const {
  return {
      {"experiment", experiment},
      {"seed", seed},
      {"grid", grid},
      {"flows", flows},
      {"profile", profile},
      {"amplitudes", amplitudes},
      {"alpha", alpha},
      {"gamma", gamma},
      {"n_shear", n_shear},
      {"dt_scale", dt_scale},
      {"pks",
       {{"dt_init", pks.dt_init},
        {"dt_max", pks.dt_max},
        {"dt_min", pks.dt_min},
        {"tol", pks.tol},
        {"linf_factor", pks.linf_factor},
        {"highk_fraction", pks.highk_fraction}}},
      {"initial",
       {{"recipe", initial.recipe}, {"mass", initial.mass}, {"width", initial.width}, {"center", initial.center}}},
      {"suppression",
       {{"A_low", suppression.A_low},
        {"A_high", suppression.A_high},
        {"bisections", suppression.bisections},
        {"zeta", suppression.zeta},
        {"M", suppression.M},
        {"G", suppression.G},
        {"baseline_factor", suppression.baseline_factor},
        {"samples_per_phase", suppression.samples_per_phase}}},
      {"contraction",
       {{"A", contraction.A},
        {"windows", contraction.windows},
        {"n_shear", contraction.n_shear},
        {"steps_per_window", contraction.steps_per_window},
        {"high_alpha", contraction.high_alpha},
        {"high_n_shear", contraction.high_n_shear}}},
      {"gliding", {{"M", gliding.M}, {"G", gliding.G}}},
      {"checks",
       {{"trials", checks.trials},
        {"operator_trials", checks.operator_trials},
        {"profiles", checks.profiles},
        {"flows", checks.flows}}},
      {"diagnostics", diagnostics},
      {"output_dir", output_dir},
      {"threads", threads},
  };
}

RunConfig RunConfig::from_json(const json& j) {
  reject_unknown(j,
                 {"experiment", "seed", "grid", "flows", "profile", "amplitudes", "alpha", "gamma", "n_shear",
                  "dt_scale", "pks", "initial", "suppression", "contraction", "gliding", "checks", "diagnostics",
                  "output_dir", "threads"},
                 "");
  RunConfig c;
  if (j.contains("experiment")) c = preset(j.at("experiment").get<std::string>());
  read(j, "seed", c.seed, "");
  read(j, "grid", c.grid, "");
  read(j, "flows", c.flows, "");
  read(j, "profile", c.profile, "");
  read(j, "amplitudes", c.amplitudes, "");
  read(j, "alpha", c.alpha, "");
  read(j, "gamma", c.gamma, "");
  read(j, "n_shear", c.n_shear, "");
  read(j, "dt_scale", c.dt_scale, "");
  read(j, "diagnostics", c.diagnostics, "");
  read(j, "output_dir", c.output_dir, "");
  read(j, "threads", c.threads, "");
  if (j.contains("pks")) {
    const auto& p = j.at("pks");
    reject_unknown(p, {"dt_init", "dt_max", "dt_min", "tol", "linf_factor", "highk_fraction"}, "pks.");
    read(p, "dt_init", c.pks.dt_init, "pks.");
    read(p, "dt_max", c.pks.dt_max, "pks.");
    read(p, "dt_min", c.pks.dt_min, "pks.");
    read(p, "tol", c.pks.tol, "pks.");
    read(p, "linf_factor", c.pks.linf_factor, "pks.");
    read(p, "highk_fraction", c.pks.highk_fraction, "pks.");
  }
  if (j.contains("initial")) {
    const auto& p = j.at("initial");
    reject_unknown(p, {"recipe", "mass", "width", "center"}, "initial.");
    read(p, "recipe", c.initial.recipe, "initial.");
    read(p, "mass", c.initial.mass, "initial.");
    read(p, "width", c.initial.width, "initial.");
    read(p, "center", c.initial.center, "initial.");
  }
  if (j.contains("suppression")) {
    const auto& p = j.at("suppression");
    reject_unknown(p, {"A_low", "A_high", "bisections", "zeta", "M", "G", "baseline_factor", "samples_per_phase"},
                   "suppression.");
    read(p, "A_low", c.suppression.A_low, "suppression.");
    read(p, "A_high", c.suppression.A_high, "suppression.");
    read(p, "bisections", c.suppression.bisections, "suppression.");
    read(p, "zeta", c.suppression.zeta, "suppression.");
    read(p, "M", c.suppression.M, "suppression.");
    read(p, "G", c.suppression.G, "suppression.");
    read(p, "baseline_factor", c.suppression.baseline_factor, "suppression.");
    read(p, "samples_per_phase", c.suppression.samples_per_phase, "suppression.");
  }
  if (j.contains("contraction")) {
    const auto& p = j.at("contraction");
    reject_unknown(p, {"A", "windows", "n_shear", "steps_per_window", "high_alpha", "high_n_shear"}, "contraction.");
    read(p, "A", c.contraction.A, "contraction.");
    read(p, "windows", c.contraction.windows, "contraction.");
    read(p, "n_shear", c.contraction.n_shear, "contraction.");
    read(p, "steps_per_window", c.contraction.steps_per_window, "contraction.");
    read(p, "high_alpha", c.contraction.high_alpha, "contraction.");
    read(p, "high_n_shear", c.contraction.high_n_shear, "contraction.");
  }
  if (j.contains("gliding")) {
    const auto& p = j.at("gliding");
    reject_unknown(p, {"M", "G"}, "gliding.");
    read(p, "M", c.gliding.M, "gliding.");
    read(p, "G", c.gliding.G, "gliding.");
  }
  if (j.contains("checks")) {
    const auto& p = j.at("checks");
    reject_unknown(p, {"trials", "operator_trials", "profiles", "flows"}, "checks.");
    read(p, "trials", c.checks.trials, "checks.");
    read(p, "operator_trials", c.checks.operator_trials, "checks.");
    read(p, "profiles", c.checks.profiles, "checks.");
    read(p, "flows", c.checks.flows, "checks.");
  }
  validate(c);
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

RunConfig RunConfig::preset(const std::string& experiment) {
  if (!kExperiments.count(experiment)) throw std::invalid_argument("unknown experiment '" + experiment + "'");
  RunConfig c;
  c.experiment = experiment;
  if (experiment == "toy-model") c.flows = {"none", "stationary", "rewound"};
  if (experiment == "gliding") c.flows = {"rewound"};
  if (experiment == "checks") c.grid = {16, 64, 8};
  return c;
}

void validate(const RunConfig& c) {
  if (!kExperiments.count(c.experiment)) throw std::invalid_argument("config key 'experiment': unknown '" + c.experiment + "'");
  for (int n : c.grid)
    if (n < 1) throw std::invalid_argument("config key 'grid' must hold positive extents");
  for (const auto& f : c.flows)
    if (!kFlows.count(f)) throw std::invalid_argument("config key 'flows': unknown flow '" + f + "'");
  for (const auto& d : c.diagnostics)
    if (!kDiagnostics.count(d)) throw std::invalid_argument("config key 'diagnostics': unknown '" + d + "'");
  for (double A : c.amplitudes) positive(A, "amplitudes");
  if (c.alpha == 0) throw std::invalid_argument("config key 'alpha' must be nonzero");
  if (c.n_shear < 4) throw std::invalid_argument("config key 'n_shear' must be at least 4");
  positive(c.dt_scale, "dt_scale");
  positive(c.pks.dt_init, "pks.dt_init");
  positive(c.pks.dt_max, "pks.dt_max");
  positive(c.pks.dt_min, "pks.dt_min");
  positive(c.pks.tol, "pks.tol");
  positive(c.pks.linf_factor, "pks.linf_factor");
  positive(c.pks.highk_fraction, "pks.highk_fraction");
  if (c.initial.recipe != "gaussian") throw std::invalid_argument("config key 'initial.recipe': only 'gaussian'");
  positive(c.initial.mass, "initial.mass");
  positive(c.initial.width, "initial.width");
  positive(c.suppression.A_low, "suppression.A_low");
  if (!(c.suppression.A_high > c.suppression.A_low))
    throw std::invalid_argument("config key 'suppression.A_high' must exceed A_low");
  if (c.suppression.bisections < 0) throw std::invalid_argument("config key 'suppression.bisections' is negative");
  positive(c.suppression.zeta, "suppression.zeta");
  if (c.suppression.M < 0) throw std::invalid_argument("config key 'suppression.M' is negative");
  positive(c.suppression.G, "suppression.G");
  positive(c.suppression.baseline_factor, "suppression.baseline_factor");
  positive(c.suppression.samples_per_phase, "suppression.samples_per_phase");
  positive(c.contraction.A, "contraction.A");
  positive(c.contraction.windows, "contraction.windows");
  positive(c.contraction.steps_per_window, "contraction.steps_per_window");
  if (c.gliding.M < 0) throw std::invalid_argument("config key 'gliding.M' is negative");
  positive(c.gliding.G, "gliding.G");
  positive(c.checks.trials, "checks.trials");
  positive(c.checks.operator_trials, "checks.operator_trials");
  if (c.threads < 0) throw std::invalid_argument("config key 'threads' is negative");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string RunConfig::hash() const {
  json j = to_json();
  j.erase("output_dir");
  j.erase("threads");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

}  // namespace shearlab
