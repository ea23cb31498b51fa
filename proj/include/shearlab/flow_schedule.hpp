#pragma once

#include <limits>
#include <string>
#include <vector>

#include "shearlab/field.hpp"
#include "shearlab/grid.hpp"
#include "shearlab/shear_profile.hpp"
#include "shearlab/shift_law.hpp"

namespace shearlab {

/// Which velocity component is active and which coordinate it depends on.
enum class ShearDirection {
  x_in_y,  ///< u = (U(y), 0, 0)
  z_in_x,  ///< u = (0, 0, U(x))
  y_in_z,  ///< u = (0, U(z), 0)
};

Axis flow_axis(ShearDirection d);
Axis shear_axis(ShearDirection d);
/// The coordinate that neither carries the flow nor the profile.
Axis spectator_axis(ShearDirection d);
std::string direction_label(ShearDirection d);
ShearDirection direction_from_label(const std::string& s);

struct FlowPhase {
  ShearDirection direction;
  ShearProfile profile;
  ShiftLaw shift;
  double duration;  ///< may be +infinity for a single open-ended phase
};

struct ShearSample {
  bool active = false;  ///< false for the quiescent schedule (u = 0)
  ShearDirection direction = ShearDirection::x_in_y;
  RealField profile;  ///< u(t, .) on the 1-D line of the shear axis
};

/// Piecewise-in-time shear flow u(t) = U(s + phi(t - phase start)).
class FlowSchedule {
 public:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();
  /// Simpson sub-panel width used for every time integral of the flow.
  static constexpr double kQuadraturePanel = 1.0 / 64.0;

  FlowSchedule(double amplitude, std::vector<FlowPhase> phases, bool cycling, double zeta = 0.0);

  static FlowSchedule quiescent(double amplitude);
  static FlowSchedule stationary(double amplitude, const ShearProfile& p,
                                 ShearDirection d = ShearDirection::x_in_y);
  static FlowSchedule log_shifted(double amplitude, const ShearProfile& p,
                                  ShearDirection d = ShearDirection::x_in_y);
  /// Rewound flow with period 2 A^{1/3}.
  static FlowSchedule rewound(double amplitude, const ShearProfile& p,
                              ShearDirection d = ShearDirection::x_in_y);
  /// Three stationary phases x_in_y, z_in_x, y_in_z of length A^{1/3+zeta}, cycling.
  static FlowSchedule alternating(double amplitude, const ShearProfile& p, double zeta);
  /// zeta(M) = 1 / (108 (2 + M)).
  static double zeta_for_order(int M);

  double amplitude() const { return amplitude_; }
  double zeta() const { return zeta_; }
  bool cycling() const { return cycling_; }
  bool is_quiescent() const { return phases_.empty(); }
  const std::vector<FlowPhase>& phases() const { return phases_; }
  /// End of the last phase, infinite when cycling or open-ended.
  double horizon() const;

  struct Location {
    std::size_t index = 0;  ///< into phases()
    long cycle = 0;
    double start = 0.0;
    double end = kInfinity;
  };
  /// Phase containing t (phase intervals are [start, end)).
  /// Throws std::out_of_range beyond the horizon, std::logic_error if quiescent.
  Location locate(double t) const;
  /// First phase boundary strictly after t (infinity if none).
  double next_boundary(double t) const;

  ShearSample evaluate_shear(double t, const Grid& grid) const;

  /// E_k = int_{t0}^{t1} e^{i k phi(s - start)} ds for k = 1..K of the phase
  /// containing [t0, t1]. Throws if the interval crosses a phase boundary.
  std::vector<Complex> shift_moments(double t0, double t1) const;

  /// int_{t0}^{t1} u(s, y_j) ds on the n_shear points of the shear axis.
  /// Returns an empty vector for the quiescent schedule.
  std::vector<double> step_integral(double t0, double t1, int n_shear) const;

 private:
  Location locate_interval(double t0, double t1) const;

  double amplitude_;
  std::vector<FlowPhase> phases_;
  bool cycling_;
  double zeta_;
  double cycle_length_ = 0.0;
};

/// Moment form of a profile sample: sum_k 2 Re(c_k (ik)^m e^{iks} E_k) plus
/// the mean times `span` when m == 0.
std::vector<double> synthesize_from_moments(const ShearProfile& p, const std::vector<Complex>& moments,
                                            double span, int m, int n_points);

}  // namespace shearlab
