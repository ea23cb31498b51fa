#include "shearlab/scalar_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "shearlab/fft.hpp"
#include "shearlab/kernels.hpp"

namespace shearlab {

namespace {

template <bool Serial>
void strang(ScalarState& s, const FlowSchedule& schedule, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("step_scalar: negative time step");
  const Grid& g = s.f.grid();
  const double half = std::isinf(s.A) ? 0.0 : 0.5 * dt / s.A;
  auto data = s.f.coeffs();
  auto heat = [&] {
    if (half == 0.0) return;
    if constexpr (Serial) {
      kernels::heat_factor_serial(g, half, data);
    } else {
      kernels::heat_factor(g, half, data);
    }
  };
  heat();
  if (!schedule.is_quiescent()) {
    const auto& ph = schedule.phases()[schedule.locate(s.t).index];
    const Axis sa = shear_axis(ph.direction);
    const auto I = schedule.step_integral(s.t, s.t + dt, g.n(sa));
    if constexpr (Serial) {
      kernels::shear_phase_sweep_serial(g, flow_axis(ph.direction), sa, I, data);
    } else {
      kernels::shear_phase_sweep(g, flow_axis(ph.direction), sa, I, data);
    }
  }
  heat();
  s.t += dt;
}

}  // namespace

void step_scalar_inplace(ScalarState& state, const FlowSchedule& schedule, double dt) {
  strang<false>(state, schedule, dt);
}

void step_scalar_serial(ScalarState& state, const FlowSchedule& schedule, double dt) {
  strang<true>(state, schedule, dt);
}

ScalarState step_scalar(const ScalarState& state, const FlowSchedule& schedule, double dt) {
  ScalarState out = state;
  step_scalar_inplace(out, schedule, dt);
  return out;
}

void advance_scalar(ScalarState& state, const FlowSchedule& schedule, double t_end, double dt,
                    const std::function<void(const ScalarState&)>& on_step) {
  while (state.t < t_end) {
    const double target = next_step_end(schedule, state.t, t_end, dt);
    step_scalar_inplace(state, schedule, target - state.t);
    state.t = target;
    if (on_step) on_step(state);
  }
}

ModeState extract_mode(const SpectralField& F, ShearDirection d, int alpha, int gamma, double t, double A) {
  const Grid& g = F.grid();
  const Axis fa = flow_axis(d), sa = shear_axis(d), oa = spectator_axis(d);
  auto slot = [&](Axis a, int k) {
    const int n = g.n(a);
    if (std::abs(k) > n / 2 || (n == 1 && k != 0)) throw std::out_of_range("extract_mode: wavenumber off grid");
    return k >= 0 ? k : k + n;
  };
  const int ia = slot(fa, alpha), io = slot(oa, gamma);
  const int n = g.n(sa);
  std::vector<Complex> line(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    int idx[3];
    idx[index_of(fa)] = ia;
    idx[index_of(oa)] = io;
    idx[index_of(sa)] = j;
    line[static_cast<std::size_t>(j)] = F.at(idx[0], idx[1], idx[2]);
  }
  fft::transform_line(n, line, fft::Direction::backward);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : line) c *= scale;
  ModeState m;
  m.alpha = alpha;
  m.gamma = gamma;
  m.profile = std::move(line);
  m.t = t;
  m.A = A;
  return m;
}

}  // namespace shearlab
