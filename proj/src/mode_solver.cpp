#include "shearlab/mode_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SVD>

#include "shearlab/fft.hpp"

namespace shearlab {

namespace {

void heat_half(std::vector<Complex>& F, double rate, double h) {
  const int n = static_cast<int>(F.size());
  for (int j = 0; j < n; ++j) {
    const int b = j <= n / 2 ? j : j - n;
    F[static_cast<std::size_t>(j)] *= std::exp(-(rate + double(b) * b) * h);
  }
}

}  // namespace

double mode_norm(const std::vector<Complex>& profile) {
  double s = 0.0;
  for (const auto& c : profile) s += std::norm(c);
  return std::sqrt(s * 2.0 * std::numbers::pi / static_cast<double>(profile.size()));
}

ModeState step_mode(const ModeState& state, const FlowSchedule& schedule, double dt) {
  if (state.alpha == 0) throw std::invalid_argument("step_mode: alpha must be nonzero");
  if (!(dt >= 0.0)) throw std::invalid_argument("step_mode: negative time step");
  const int n = static_cast<int>(state.profile.size());
  fft::LineTransform line(n);
  const double inv_A = std::isinf(state.A) ? 0.0 : 1.0 / state.A;
  const double rate = double(state.alpha) * state.alpha + double(state.gamma) * state.gamma;
  const double before = mode_norm(state.profile);

  ModeState out = state;
  auto& p = out.profile;
  const auto I = schedule.step_integral(state.t, state.t + dt, n);
  if (inv_A != 0.0) {
    line.forward(p);
    heat_half(p, rate, 0.5 * dt * inv_A);
    line.backward(p);
    for (auto& c : p) c /= n;
  }
  if (!I.empty())
    for (int j = 0; j < n; ++j)
      p[static_cast<std::size_t>(j)] *= std::polar(1.0, -state.alpha * I[static_cast<std::size_t>(j)]);
  if (inv_A != 0.0) {
    line.forward(p);
    heat_half(p, rate, 0.5 * dt * inv_A);
    line.backward(p);
    for (auto& c : p) c /= n;
  }
  out.t = state.t + dt;
  const double after = mode_norm(p);
  if (!std::isfinite(after) || after > before * (1.0 + 1e-6))
    throw InstabilityError("step_mode: L2 norm grew beyond the per-step tolerance");
  return out;
}

double next_step_end(const FlowSchedule& schedule, double t, double t_end, double dt) {
  double target = std::min(t + dt, t_end);
  const double b = schedule.next_boundary(t);
  if (target > b) target = b;
  if (target < t_end && t_end - target < 1e-9 * dt && t_end <= b) target = t_end;
  return target;
}

ModeState advance_mode(ModeState s, const FlowSchedule& schedule, double t_end, double dt,
                       const std::function<void(const ModeState&)>& on_step) {
  while (s.t < t_end) {
    const double target = next_step_end(schedule, s.t, t_end, dt);
    s = step_mode(s, schedule, target - s.t);
    s.t = target;
    if (on_step) on_step(s);
  }
  return s;
}

std::vector<double> random_profile(int n, int cutoff, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> F(static_cast<std::size_t>(n), Complex(0.0, 0.0));
  for (int k = 1; k <= std::min(cutoff, n / 2 - 1); ++k) {
    const Complex c(normal(rng), normal(rng));
    F[static_cast<std::size_t>(k)] = c;
    F[static_cast<std::size_t>(n - k)] = std::conj(c);
  }
  fft::transform_line(n, F, fft::Direction::backward);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = F[static_cast<std::size_t>(j)].real() / n;
  return out;
}

std::vector<double> bump_profile(int n, double center, double width) {
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  const double L = Grid::kLength;
  for (int j = 0; j < n; ++j) {
    const double y = L * j / n;
    for (int w = -2; w <= 2; ++w) {
      const double d = y - center + w * L;
      out[static_cast<std::size_t>(j)] += std::exp(-0.5 * d * d / (width * width));
    }
  }
  return out;
}

double measure_contraction(const FlowSchedule& schedule, int alpha, int gamma, double A, double window,
                           const ContractionOptions& opts) {
  if (window <= 0.0) window = std::pow(std::abs(double(alpha)), -2.0 / 3.0) * std::cbrt(A);
  const double dt = opts.dt > 0.0 ? opts.dt : window / 400.0;
  const int n = opts.n_shear;

  std::vector<std::vector<double>> inits;
  for (int r = 0; r < opts.random_profiles; ++r)
    inits.push_back(random_profile(n, std::max(1, n / 8), opts.seed + static_cast<std::uint64_t>(r)));
  if (opts.bump_at_critical_points && !schedule.is_quiescent()) {
    const auto& ph = schedule.phases()[schedule.locate(opts.t0).index];
    const double shift = ph.shift.phi(opts.t0 - schedule.locate(opts.t0).start);
    for (double yc : ph.profile.critical_points()) {
      double c = std::fmod(yc - shift, Grid::kLength);
      if (c < 0.0) c += Grid::kLength;
      inits.push_back(bump_profile(n, c, opts.bump_width));
    }
  }

  double worst = 0.0;
  for (const auto& f0 : inits) {
    ModeState s;
    s.alpha = alpha;
    s.gamma = gamma;
    s.A = A;
    s.t = opts.t0;
    s.profile.assign(f0.begin(), f0.end());
    const double n0 = mode_norm(s.profile);
    s = advance_mode(std::move(s), schedule, opts.t0 + window, dt);
    worst = std::max(worst, mode_norm(s.profile) / n0);
  }
  return worst;
}

double window_operator_norm(const FlowSchedule& schedule, int alpha, int gamma, double A, double t0,
                            double window, int n_shear, double dt) {
  if (window <= 0.0 || dt <= 0.0) throw std::invalid_argument("window_operator_norm: window and dt must be positive");
  const auto n = static_cast<Eigen::Index>(n_shear);
  Eigen::MatrixXcd P(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    ModeState s;
    s.alpha = alpha;
    s.gamma = gamma;
    s.A = A;
    s.t = t0;
    s.profile.assign(static_cast<std::size_t>(n_shear), Complex(0.0, 0.0));
    s.profile[static_cast<std::size_t>(col)] = 1.0;
    s = advance_mode(std::move(s), schedule, t0 + window, dt);
    for (Eigen::Index row = 0; row < n; ++row) P(row, col) = s.profile[static_cast<std::size_t>(row)];
  }
  // The mode norm is a multiple of the Euclidean norm, so the ratio is the
  // spectral norm of P.
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P);
  return svd.singularValues()(0);
}

}  // namespace shearlab
