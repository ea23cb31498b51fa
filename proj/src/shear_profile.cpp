#include "shearlab/shear_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shearlab {

ShearProfile::ShearProfile(double mean, std::vector<Complex> positive_modes)
    : mean_(mean), modes_(std::move(positive_modes)) {
  bool varies = false;
  for (const auto& c : modes_) varies = varies || std::abs(c) > 1e-12;
  if (!varies) throw std::invalid_argument("ShearProfile: profile is constant (U' vanishes identically)");
  while (!modes_.empty() && std::abs(modes_.back()) == 0.0) modes_.pop_back();
  const double s = raw_sup();
  if (s > 1.0) {
    mean_ /= s;
    for (auto& c : modes_) c /= s;
  }
  sup_ = raw_sup();
}

ShearProfile ShearProfile::cosine() { return ShearProfile(0.0, {Complex(0.5, 0.0)}); }

ShearProfile ShearProfile::preset(const std::string& name) {
  if (name == "cos") return cosine();
  if (name == "sin") return ShearProfile(0.0, {Complex(0.0, -0.5)});
  if (name == "cos_mix") return ShearProfile(0.0, {Complex(0.5, 0.0), Complex(0.0, -0.25)});
  throw std::invalid_argument("unknown shear profile preset '" + name + "'");
}

double ShearProfile::value(double s, int m) const {
  double v = m == 0 ? mean_ : 0.0;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    Complex f = modes_[i] * std::polar(1.0, k * s);
    for (int o = 0; o < m; ++o) f *= Complex(0.0, k);
    v += 2.0 * f.real();
  }
  return v;
}

double ShearProfile::raw_sup() const {
  // Dense sampling, then golden-section polish around the best sample.
  const int samples = 4096 * std::max(1, max_mode());
  const double h = 2.0 * std::numbers::pi / samples;
  int best = 0;
  double best_v = -1.0;
  for (int i = 0; i < samples; ++i) {
    const double v = std::abs(value(i * h));
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = (best - 1) * h, b = (best + 1) * h;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (std::abs(value(c)) > std::abs(value(d))) {
      b = d;
    } else {
      a = c;
    }
  }
  return std::max(best_v, std::abs(value(0.5 * (a + b))));
}

std::vector<double> ShearProfile::critical_points() const {
  std::vector<double> out;
  const int samples = 1024 * std::max(1, max_mode());
  const double h = 2.0 * std::numbers::pi / samples;
  for (int i = 0; i < samples; ++i) {
    double a = i * h, b = (i + 1) * h;
    double fa = value(a, 1), fb = value(b, 1);
    if (fa == 0.0) {
      out.push_back(a);
      continue;
    }
    if (fa * fb > 0.0 || fb == 0.0) continue;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = value(m, 1);
      if (fa * fm <= 0.0) {
        b = m;
      } else {
        a = m;
        fa = fm;
      }
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

}  // namespace shearlab
