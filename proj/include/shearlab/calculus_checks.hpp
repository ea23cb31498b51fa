#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "shearlab/field.hpp"
#include "shearlab/flow_schedule.hpp"
#include "shearlab/gamma_context.hpp"

namespace shearlab {

struct CheckReport {
  std::string id;
  int j = 0;  ///< outer order (power of Gamma, or the p index for averages)
  int m = 0;  ///< inner order (1 for d_y, 2 for d_yy)
  double residual_max = 0.0;
  double tolerance = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Setup shared by the operator checks: trial grid, flow and the times at
/// which the context is evaluated. A time of 0 means t = t_r (B = 0).
struct CheckSetup {
  int nx = 16, ny = 64, nz = 8;
  std::string flow = "stationary";  ///< "stationary", "log_shift" or "rewound"
  std::string profile = "cos";
  double A = 1e4;
  std::vector<double> times{0.0, 0.7, 1.9};
  std::uint64_t seed = 20240611;
  double tolerance = 1e-8;
};

/// Real field with independent normal coefficients on |k_a| <= N_a / 4 and
/// zero mean.
SpectralField random_band_limited(const Grid& g, std::uint64_t seed);

/// Schedule for the setup (flow along x, sheared in y) and its context at t.
FlowSchedule check_schedule(const CheckSetup& s);
GammaContext context_at(const FlowSchedule& schedule, double t, int n_shear);

/// ||a - b|| / max(||a||, ||b||, scale, 1e-14). `scale` is the size of the
/// terms whose difference forms a (a commutator vanishes at t = t_r while
/// its two products do not).
double relative_residual(const SpectralField& a, const SpectralField& b, double scale = 0.0);

/// [Gamma^n, B] applied directly versus sum_l C(n,l) ad_Gamma^{n-l}(B) Gamma^l,
/// where ad is evaluated by repeated operator application. B = d_y^m, m in {1, 2}.
CheckReport check_ad_expansion(int n, int m, int trials, const CheckSetup& setup = {});

/// [Gamma^j, d_y^m] applied directly versus the closed forms written with
/// B^{(k)} and d_y^k (B^{(1)})^2, m in {1, 2}.
CheckReport check_gamma_commutators(int j, int m, int trials, const CheckSetup& setup = {});

/// Residual of (d_t + u d_x)(Gamma f) = 0 along an inviscid transport
/// trajectory, with d_t taken by centered differences of step dt.
double gamma_transport_residual(const CheckSetup& setup, double t, double dt, std::uint64_t seed);
/// Ratios residual(dt) / residual(dt / 2) for dt, dt/2, dt/4, ...
struct TransportOrderReport {
  std::vector<double> dts;
  std::vector<double> residuals;
  double min_ratio = 0.0;
  bool pass = false;
  nlohmann::json to_json() const;
};
TransportOrderReport check_gamma_transport(const CheckSetup& setup, double t, double dt0, int halvings,
                                           double min_ratio = 3.5);

/// Largest value of ||grad e^{tau Lap} f|| tau^{1/2} / ||f|| over random
/// mean-zero fields and tau on a log grid, compared with (2e)^{-1/2}; and the
/// Duhamel form ||grad^{m+1} c(tau)|| <= sqrt(2/e) tau^{1/2} ||grad^m g|| +
/// ||grad^{m+1} c_in|| for d_tau c = Lap c + g with constant mean-zero g.
struct HeatReport {
  double kernel_ratio_max = 0.0;
  double kernel_bound = 0.0;
  double duhamel_ratio_max = 0.0;  ///< lhs / rhs
  int trials = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};
HeatReport check_heat_bounds(int trials, std::uint64_t seed = 20240611, int n = 16, int taus = 50);

/// Average along one axis, computed from the samples.
RealField average_along(const RealField& f, Axis a);

/// ||<<f>>||_p <= ||<f>||_p <= ||f||_p for p in {1, 2, inf} and every axis
/// pair, with 1e-12 relative slack.
struct AverageReport {
  int trials = 0;
  long comparisons = 0;
  long violations = 0;
  double worst_excess = 0.0;  ///< largest (lhs - rhs) / rhs seen
  std::uint64_t seed = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};
AverageReport check_average_contraction(int trials, std::uint64_t seed = 20240611, int n = 16);

}  // namespace shearlab
