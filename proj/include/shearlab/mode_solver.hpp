#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "shearlab/field.hpp"
#include "shearlab/flow_schedule.hpp"

namespace shearlab {

/// Raised when a step increases the L2 norm by more than 1e-6 relative.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One Fourier mode (alpha along the flow axis, gamma along the spectator
/// axis) of a passive scalar, as a complex profile on the shear axis.
/// A = +infinity gives the inviscid problem.
struct ModeState {
  int alpha = 1;
  int gamma = 0;
  std::vector<Complex> profile;
  double t = 0.0;
  double A = 1.0;
};

/// Strang step: half exact diffusion, exact shear phase exp(-i alpha int u),
/// half exact diffusion. [t, t + dt] must lie inside one schedule phase.
ModeState step_mode(const ModeState& state, const FlowSchedule& schedule, double dt);

/// Norm on the shear circle, (2pi/N sum |f_j|^2)^{1/2}.
double mode_norm(const std::vector<Complex>& profile);

/// Advances to t_end with steps of at most dt, splitting at phase boundaries.
/// `on_step` (may be empty) is called after every step.
ModeState advance_mode(ModeState s, const FlowSchedule& schedule, double t_end, double dt,
                       const std::function<void(const ModeState&)>& on_step = {});

/// Next step end from t: min(t + dt, t_end, next phase boundary), snapping
/// to t_end when the remainder would be a sliver.
double next_step_end(const FlowSchedule& schedule, double t, double t_end, double dt);

/// Mean-zero real profile with random Fourier coefficients on 1 <= |k| <= cutoff.
std::vector<double> random_profile(int n, int cutoff, std::uint64_t seed);

/// Periodized Gaussian bump of width `width` centered at `center`.
std::vector<double> bump_profile(int n, double center, double width);

struct ContractionOptions {
  double t0 = 0.0;          ///< start of the window
  int n_shear = 256;
  double dt = 0.0;          ///< 0 selects window / 400
  int random_profiles = 4;  ///< seeded band-limited profiles (cutoff n/8)
  bool bump_at_critical_points = true;
  double bump_width = 0.15;
  std::uint64_t seed = 1;
};

/// Worst case of ||f(t0 + window)|| / ||f(t0)|| over the profile set.
/// window <= 0 selects |alpha|^{-2/3} A^{1/3}.
double measure_contraction(const FlowSchedule& schedule, int alpha, int gamma, double A, double window,
                           const ContractionOptions& opts = {});

/// Largest singular value of the mode propagator over [t0, t0 + window] on
/// n_shear points, i.e. the contraction factor for the worst data. The
/// propagator is assembled column by column from unit profiles.
double window_operator_norm(const FlowSchedule& schedule, int alpha, int gamma, double A, double t0,
                            double window, int n_shear, double dt);

}  // namespace shearlab
