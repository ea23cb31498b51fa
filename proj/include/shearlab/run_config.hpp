#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace shearlab {

inline constexpr const char* kVersion = "0.4.0";

struct PksControls {
  double dt_init = 1e-3;
  double dt_max = 0.25;
  double dt_min = 1e-9;
  double tol = 1e-4;
  double linf_factor = 1e3;
  double highk_fraction = 0.1;
};

struct InitialData {
  std::string recipe = "gaussian";  ///< n = 1 + mass * normalized Gaussian; c from -Lap c = n - mean n
  double mass = 100.0;
  double width = 0.4;
  std::array<double, 3> center{1.0, 1.0, 1.0};
};

struct SuppressionControls {
  double A_low = 30.0;
  double A_high = 300.0;
  int bisections = 3;
  double zeta = 1.0 / 756.0;        ///< zeta(5)
  int M = 3;
  double G = 1.0;
  double baseline_factor = 4.0;     ///< the baseline may run to this many horizons
  int samples_per_phase = 12;       ///< diagnostic rows per flow phase of the reported run
};

struct ContractionControls {
  double A = 1e4;
  int windows = 8;
  int n_shear = 256;
  int steps_per_window = 400;
  int high_alpha = 100;
  int high_n_shear = 512;
};

struct GlidingControls {
  int M = 3;
  double G = 1.0;
};

struct CheckControls {
  int trials = 100;
  int operator_trials = 4;  ///< per (profile, flow, time) combination
  std::vector<std::string> profiles{"cos", "sin", "cos_mix"};
  std::vector<std::string> flows{"stationary", "log_shift", "rewound"};
};

/// Declarative run description. Unknown keys are rejected when parsing.
struct RunConfig {
  std::string experiment;  ///< ed-sweep, toy-model, suppression, contraction, gliding, checks
  std::uint64_t seed = 7;
  std::array<int, 3> grid{48, 48, 48};
  std::vector<std::string> flows{"none", "stationary", "rewound"};
  std::string profile = "cos";
  std::vector<double> amplitudes{1e3, 3162.2776601683795, 1e4, 31622.776601683792, 1e5};
  int alpha = 1;
  int gamma = 0;
  int n_shear = 256;
  double dt_scale = 0.02;
  PksControls pks;
  InitialData initial;
  SuppressionControls suppression;
  ContractionControls contraction;
  GlidingControls gliding;
  CheckControls checks;
  std::vector<std::string> diagnostics{"norms", "regions", "z_norm", "functional"};
  std::string output_dir = "out";
  int threads = 0;  ///< 0 keeps the OpenMP default

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  /// Defaults for one experiment name.
  static RunConfig preset(const std::string& experiment);
  /// FNV-1a (64 bit) of the canonical JSON without output_dir and threads,
  /// as 16 hex digits.
  std::string hash() const;
};

/// Throws std::invalid_argument with the offending key path.
void validate(const RunConfig& c);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace shearlab
