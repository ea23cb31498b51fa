#pragma once

#include <string>
#include <vector>

#include "shearlab/field.hpp"

namespace shearlab {

/// Smooth 2pi-periodic real profile U(s) = c_0 + 2 Re sum_{k=1..K} c_k e^{iks}.
///
/// Only the non-negative modes are stored, which makes U real by
/// construction. Profiles are rescaled on construction so that
/// sup |U| <= 1.
class ShearProfile {
 public:
  /// Throws std::invalid_argument if every nonzero mode is below 1e-12
  /// (the profile would be constant).
  ShearProfile(double mean, std::vector<Complex> positive_modes);

  static ShearProfile cosine();
  /// Named presets: "cos", "sin", "cos_mix" (cos s + 0.5 sin 2s, normalized).
  static ShearProfile preset(const std::string& name);

  int max_mode() const { return static_cast<int>(modes_.size()); }
  double mean() const { return mean_; }
  /// c_k for k >= 1.
  Complex mode(int k) const { return modes_.at(static_cast<std::size_t>(k - 1)); }

  /// m-th derivative U^{(m)}(s).
  double value(double s, int m = 0) const;

  /// sup_s |U(s)| (after normalization, at most 1).
  double sup_norm() const { return sup_; }

  /// Zeros of U' on [0, 2pi), located by sampling plus bisection.
  std::vector<double> critical_points() const;

 private:
  double raw_sup() const;

  double mean_;
  std::vector<Complex> modes_;
  double sup_ = 0.0;
};

}  // namespace shearlab
