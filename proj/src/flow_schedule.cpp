#include "shearlab/flow_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shearlab {

Axis flow_axis(ShearDirection d) {
  switch (d) {
    case ShearDirection::x_in_y:
      return Axis::x;
    case ShearDirection::z_in_x:
      return Axis::z;
    case ShearDirection::y_in_z:
      return Axis::y;
  }
  return Axis::x;
}

Axis shear_axis(ShearDirection d) {
  switch (d) {
    case ShearDirection::x_in_y:
      return Axis::y;
    case ShearDirection::z_in_x:
      return Axis::x;
    case ShearDirection::y_in_z:
      return Axis::z;
  }
  return Axis::y;
}

Axis spectator_axis(ShearDirection d) {
  switch (d) {
    case ShearDirection::x_in_y:
      return Axis::z;
    case ShearDirection::z_in_x:
      return Axis::y;
    case ShearDirection::y_in_z:
      return Axis::x;
  }
  return Axis::z;
}

std::string direction_label(ShearDirection d) {
  return std::string(1, axis_label(flow_axis(d))) + "_in_" + axis_label(shear_axis(d));
}

ShearDirection direction_from_label(const std::string& s) {
  for (auto d : {ShearDirection::x_in_y, ShearDirection::z_in_x, ShearDirection::y_in_z})
    if (direction_label(d) == s) return d;
  throw std::invalid_argument("unknown shear direction '" + s + "'");
}

FlowSchedule::FlowSchedule(double amplitude, std::vector<FlowPhase> phases, bool cycling, double zeta)
    : amplitude_(amplitude), phases_(std::move(phases)), cycling_(cycling), zeta_(zeta) {
  if (!(amplitude_ > 0.0)) throw std::invalid_argument("FlowSchedule: amplitude must be positive");
  for (std::size_t i = 0; i < phases_.size(); ++i) {
    const double d = phases_[i].duration;
    if (!(d > 0.0)) throw std::invalid_argument("FlowSchedule: phase durations must be positive");
    if (std::isinf(d) && (i + 1 != phases_.size() || cycling_))
      throw std::invalid_argument("FlowSchedule: only a final non-cycling phase may be open-ended");
    cycle_length_ += d;
  }
  if (cycling_ && phases_.empty()) throw std::invalid_argument("FlowSchedule: cycling needs phases");
}

FlowSchedule FlowSchedule::quiescent(double amplitude) { return FlowSchedule(amplitude, {}, false); }

FlowSchedule FlowSchedule::stationary(double amplitude, const ShearProfile& p, ShearDirection d) {
  return FlowSchedule(amplitude, {FlowPhase{d, p, ShiftLaw::none(), kInfinity}}, false);
}

FlowSchedule FlowSchedule::log_shifted(double amplitude, const ShearProfile& p, ShearDirection d) {
  return FlowSchedule(amplitude, {FlowPhase{d, p, ShiftLaw::log_shift(), kInfinity}}, false);
}

FlowSchedule FlowSchedule::rewound(double amplitude, const ShearProfile& p, ShearDirection d) {
  return FlowSchedule(amplitude, {FlowPhase{d, p, ShiftLaw::rewound(std::cbrt(amplitude)), kInfinity}},
                      false);
}

FlowSchedule FlowSchedule::alternating(double amplitude, const ShearProfile& p, double zeta) {
  const double len = std::pow(amplitude, 1.0 / 3.0 + zeta);
  std::vector<FlowPhase> ph;
  for (auto d : {ShearDirection::x_in_y, ShearDirection::z_in_x, ShearDirection::y_in_z})
    ph.push_back(FlowPhase{d, p, ShiftLaw::none(), len});
  return FlowSchedule(amplitude, std::move(ph), true, zeta);
}

double FlowSchedule::zeta_for_order(int M) { return 1.0 / (108.0 * (2.0 + M)); }

double FlowSchedule::horizon() const {
  if (phases_.empty() || cycling_) return kInfinity;
  return cycle_length_;
}

FlowSchedule::Location FlowSchedule::locate(double t) const {
  if (phases_.empty()) throw std::logic_error("FlowSchedule::locate: quiescent schedule has no phases");
  if (!(t >= 0.0)) throw std::out_of_range("FlowSchedule: negative time");
  // Phase ends are sums of durations and drift by a few ulps from one cycle
  // to the next; t within `slack` of an end belongs to the following phase.
  const double slack = 1e-13 * std::max(1.0, t);
  Location loc;
  double base = 0.0;
  if (cycling_) {
    loc.cycle = static_cast<long>(std::floor((t + slack) / cycle_length_));
    base = static_cast<double>(loc.cycle) * cycle_length_;
    if (t + slack < base) {
      --loc.cycle;
      base -= cycle_length_;
    }
  } else if (t >= cycle_length_) {
    throw std::out_of_range("FlowSchedule: time beyond schedule horizon");
  }
  double start = base;
  for (std::size_t i = 0; i < phases_.size(); ++i) {
    const double end = start + phases_[i].duration;
    if (t + slack < end || i + 1 == phases_.size()) {
      loc.index = i;
      loc.start = start;
      loc.end = end;
      break;
    }
    start = end;
  }
  if (cycling_ && t + slack >= loc.end) {
    ++loc.cycle;
    loc.index = 0;
    loc.start = static_cast<double>(loc.cycle) * cycle_length_;
    loc.end = loc.start + phases_[0].duration;
  }
  return loc;
}

double FlowSchedule::next_boundary(double t) const {
  if (phases_.empty()) return kInfinity;
  return locate(t).end;
}

FlowSchedule::Location FlowSchedule::locate_interval(double t0, double t1) const {
  if (t1 < t0) throw std::invalid_argument("FlowSchedule: interval end before start");
  const Location loc = locate(t0);
  const double slack = 1e-12 * std::max(1.0, std::abs(loc.end));
  if (t1 > loc.end + slack) throw std::invalid_argument("FlowSchedule: interval crosses a phase boundary");
  return loc;
}

ShearSample FlowSchedule::evaluate_shear(double t, const Grid& grid) const {
  ShearSample out;
  if (phases_.empty()) {
    out.profile = RealField(Grid::line(Axis::y, grid.n(Axis::y)));
    return out;
  }
  const Location loc = locate(t);
  const FlowPhase& ph = phases_[loc.index];
  const Axis s = shear_axis(ph.direction);
  out.active = true;
  out.direction = ph.direction;
  Grid line = Grid::line(s, grid.n(s));
  out.profile = RealField(line);
  const double shift = ph.shift.phi(t - loc.start);
  for (int j = 0; j < grid.n(s); ++j)
    out.profile.values()[static_cast<std::size_t>(j)] = ph.profile.value(grid.coordinate(s, j) + shift);
  return out;
}

std::vector<Complex> FlowSchedule::shift_moments(double t0, double t1) const {
  const Location loc = locate_interval(t0, t1);
  const FlowPhase& ph = phases_[loc.index];
  const int K = ph.profile.max_mode();
  std::vector<Complex> E(static_cast<std::size_t>(K), Complex(0.0, 0.0));
  if (t1 == t0) return E;
  if (ph.shift.kind() == ShiftLaw::Kind::none) {
    for (auto& e : E) e = Complex(t1 - t0, 0.0);
    return E;
  }
  const int panels = std::max(1, static_cast<int>(std::ceil((t1 - t0) / kQuadraturePanel)));
  const double h = (t1 - t0) / panels;
  auto add = [&](double t, double w) {
    const double phi = ph.shift.phi(t - loc.start);
    const Complex base = std::polar(1.0, phi);
    Complex z = base;
    for (int k = 0; k < K; ++k) {
      E[static_cast<std::size_t>(k)] += w * z;
      z *= base;
    }
  };
  for (int p = 0; p < panels; ++p) {
    const double a = t0 + p * h;
    add(a, h / 6.0);
    add(a + 0.5 * h, 4.0 * h / 6.0);
    add(p + 1 == panels ? t1 : a + h, h / 6.0);
  }
  return E;
}

std::vector<double> synthesize_from_moments(const ShearProfile& p, const std::vector<Complex>& moments,
                                            double span, int m, int n_points) {
  const double h = Grid::kLength / n_points;
  std::vector<double> out(static_cast<std::size_t>(n_points), m == 0 ? p.mean() * span : 0.0);
  for (int k = 1; k <= p.max_mode(); ++k) {
    Complex w = p.mode(k) * moments[static_cast<std::size_t>(k - 1)];
    for (int o = 0; o < m; ++o) w *= Complex(0.0, k);
    for (int j = 0; j < n_points; ++j)
      out[static_cast<std::size_t>(j)] += 2.0 * (w * std::polar(1.0, k * j * h)).real();
  }
  return out;
}

std::vector<double> FlowSchedule::step_integral(double t0, double t1, int n_shear) const {
  if (phases_.empty()) return {};
  const Location loc = locate_interval(t0, t1);
  return synthesize_from_moments(phases_[loc.index].profile, shift_moments(t0, t1), t1 - t0, 0, n_shear);
}

}  // namespace shearlab
