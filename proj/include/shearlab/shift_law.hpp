#pragma once

#include <string>

namespace shearlab {

/// Time shift phi(t) applied to the profile argument: u = U(s + phi(t)).
class ShiftLaw {
 public:
  enum class Kind { none, log_shift, rewound };

  ShiftLaw() = default;
  static ShiftLaw none() { return {}; }
  static ShiftLaw log_shift();
  /// Rewound logarithmic shift with period 2 * half_period.
  static ShiftLaw rewound(double half_period);

  Kind kind() const { return kind_; }
  std::string name() const;
  double half_period() const { return half_; }
  /// Period of phi; 0 when the law is not periodic.
  double period() const { return kind_ == Kind::rewound ? 2.0 * half_ : 0.0; }

  double phi(double t) const;
  /// Cutoff chi_J(t) of the rewound law (always 1 for J = 0 otherwise).
  double chi(int J, double t) const;

  /// s -> 6s^5 - 15s^4 + 10s^3 on [0,1], clamped outside.
  static double smoothstep(double s);
  /// Sign-symmetric logarithm sign(s) log(1 + |s|).
  static double signed_log(double s);

 private:
  Kind kind_ = Kind::none;
  double half_ = 0.0;
};

}  // namespace shearlab
