#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shearlab/flow_schedule.hpp"

namespace shearlab {

struct DecayFit {
  double lambda = 0.0;  ///< fitted decay rate, minus the slope of log ||f||
  double window_start = 0.0;
  double window_end = 0.0;
  double r2 = 0.0;
  bool detected = false;
};

struct DecayWindow {
  double upper = -2.0;   ///< log drop where the window opens
  double lower = -12.0;  ///< log drop where it closes
  double r2_min = 0.995;
  int min_samples = 16;
};

/// Fits log||f(t)|| - log||f(0)|| (given as `drop`) linearly over the samples
/// inside [lower, upper]. When the fit is not linear enough, the window start
/// is moved later in 10% increments while at least 30% of it remains.
DecayFit fit_decay_window(const std::vector<double>& t, const std::vector<double>& drop,
                          const DecayWindow& w = {});

struct RateStudyOptions {
  int n_shear = 256;
  std::uint64_t seed = 7;
  /// Step for flowing runs: dt_scale * A^{1/3}. Quiescent runs use A / 100.
  double dt_scale = 0.02;
  /// Stop once the log drop passes this value.
  double stop_drop = -12.5;
  long max_steps = 4'000'000;
  DecayWindow window;
};

struct RateRecord {
  double A = 0.0;
  double dt = 0.0;
  long steps = 0;
  DecayFit fit;
};

/// Runs the (alpha, gamma) mode from sin(x) times a random mean-zero
/// profile (cutoff n/4) and fits its decay rate.
RateRecord measure_decay_rate(const FlowSchedule& schedule, int alpha, int gamma,
                              const RateStudyOptions& opts = {});

struct ExponentFit {
  double exponent = 0.0;   ///< slope of log lambda against log A
  double intercept = 0.0;
  double residual = 0.0;   ///< RMS residual of the regression
  bool all_detected = true;
  std::vector<RateRecord> records;
};

/// Ordinary least squares y = intercept + slope x, with RMS residual and R^2.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
  double r2 = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Measures lambda(A) for every amplitude and regresses log lambda on log A.
/// Needs at least 4 amplitudes spanning 2 decades (std::invalid_argument);
/// throws std::runtime_error when fewer than 2 decay windows are found.
ExponentFit fit_ed_exponent(const std::function<FlowSchedule(double)>& family,
                            const std::vector<double>& amplitudes, int alpha, int gamma,
                            const RateStudyOptions& opts = {});

/// Named one-parameter families: "none", "stationary", "log_shift", "rewound".
std::function<FlowSchedule(double)> schedule_family(const std::string& name, const ShearProfile& p);

}  // namespace shearlab
