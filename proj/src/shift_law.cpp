#include "shearlab/shift_law.hpp"

#include <cmath>
#include <stdexcept>

namespace shearlab {

ShiftLaw ShiftLaw::log_shift() {
  ShiftLaw s;
  s.kind_ = Kind::log_shift;
  return s;
}

ShiftLaw ShiftLaw::rewound(double half_period) {
  if (!(half_period > 0.0) || !std::isfinite(half_period))
    throw std::invalid_argument("ShiftLaw::rewound: half period must be positive");
  ShiftLaw s;
  s.kind_ = Kind::rewound;
  s.half_ = half_period;
  return s;
}

std::string ShiftLaw::name() const {
  switch (kind_) {
    case Kind::none:
      return "none";
    case Kind::log_shift:
      return "log_shift";
    case Kind::rewound:
      return "rewound";
  }
  return "?";
}

double ShiftLaw::smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

double ShiftLaw::signed_log(double s) { return std::copysign(std::log1p(std::abs(s)), s); }

double ShiftLaw::chi(int J, double t) const {
  if (kind_ != Kind::rewound) return J == 0 ? 1.0 : 0.0;
  const double T = half_;
  const double on = 2.0 * J * T, off = (2.0 * J + 1.0) * T;
  if (t >= on && t <= off) return 1.0;
  if (t >= on - T && t < on) return smoothstep((t - (on - T)) / T);
  if (t > off && t <= off + T) return smoothstep((off + T - t) / T);
  return 0.0;
}

double ShiftLaw::phi(double t) const {
  switch (kind_) {
    case Kind::none:
      return 0.0;
    case Kind::log_shift:
      return std::log1p(t);
    case Kind::rewound: {
      // Reduce to one period so the law is periodic by construction; only
      // chi_0 and chi_1 are nonzero on [0, 2T).
      const double P = 2.0 * half_;
      const double s = t - std::floor(t / P) * P;
      return chi(0, s) * signed_log(s) + chi(1, s) * signed_log(s - P);
    }
  }
  return 0.0;
}

}  // namespace shearlab
