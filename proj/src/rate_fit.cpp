#include "shearlab/rate_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shearlab/mode_solver.hpp"

namespace shearlab {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("linear_fit: need at least two paired samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  f.r2 = syy > 0.0 ? 1.0 - ss / syy : 1.0;
  return f;
}

DecayFit fit_decay_window(const std::vector<double>& t, const std::vector<double>& drop, const DecayWindow& w) {
  DecayFit out;
  std::size_t first = t.size(), last = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (drop[i] <= w.upper && drop[i] >= w.lower) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first >= t.size() || last < first + static_cast<std::size_t>(w.min_samples)) return out;

  const std::size_t full = last - first + 1;
  std::size_t begin = first;
  while (true) {
    std::vector<double> x(t.begin() + begin, t.begin() + last + 1);
    std::vector<double> y(drop.begin() + begin, drop.begin() + last + 1);
    const LinearFit f = linear_fit(x, y);
    out.lambda = -f.slope;
    out.window_start = t[begin];
    out.window_end = t[last];
    out.r2 = f.r2;
    out.detected = f.r2 >= w.r2_min && out.lambda > 0.0;
    if (out.detected) return out;
    const std::size_t next = begin + std::max<std::size_t>(1, full / 10);
    if (last + 1 - next < (3 * full) / 10 || last + 1 - next < static_cast<std::size_t>(w.min_samples)) return out;
    begin = next;
  }
}

RateRecord measure_decay_rate(const FlowSchedule& schedule, int alpha, int gamma, const RateStudyOptions& opts) {
  const double A = schedule.amplitude();
  RateRecord rec;
  rec.A = A;
  rec.dt = schedule.is_quiescent() ? A / 100.0 : opts.dt_scale * std::cbrt(A);

  ModeState s;
  s.alpha = alpha;
  s.gamma = gamma;
  s.A = A;
  const auto g = random_profile(opts.n_shear, opts.n_shear / 4, opts.seed);
  s.profile.resize(g.size());
  // sin(x) g(y) has the alpha = 1 coefficient g / (2i).
  for (std::size_t j = 0; j < g.size(); ++j) s.profile[j] = g[j] / Complex(0.0, 2.0);
  const double log0 = std::log(mode_norm(s.profile));

  std::vector<double> ts{0.0}, drops{0.0};
  while (drops.back() > opts.stop_drop && rec.steps < opts.max_steps) {
    const double target = next_step_end(schedule, s.t, s.t + rec.dt, rec.dt);
    s = step_mode(s, schedule, target - s.t);
    s.t = target;
    ++rec.steps;
    ts.push_back(s.t);
    drops.push_back(std::log(mode_norm(s.profile)) - log0);
  }
  rec.fit = fit_decay_window(ts, drops, opts.window);
  return rec;
}

ExponentFit fit_ed_exponent(const std::function<FlowSchedule(double)>& family,
                            const std::vector<double>& amplitudes, int alpha, int gamma,
                            const RateStudyOptions& opts) {
  if (amplitudes.size() < 4) throw std::invalid_argument("fit_ed_exponent: need at least 4 amplitudes");
  const auto [lo, hi] = std::minmax_element(amplitudes.begin(), amplitudes.end());
  if (std::log10(*hi / *lo) < 2.0 - 1e-9)
    throw std::invalid_argument("fit_ed_exponent: amplitudes must span at least 2 decades");

  ExponentFit out;
  std::vector<double> x, y;
  for (double A : amplitudes) {
    RateRecord r = measure_decay_rate(family(A), alpha, gamma, opts);
    if (r.fit.detected) {
      x.push_back(std::log(A));
      y.push_back(std::log(r.fit.lambda));
    } else {
      out.all_detected = false;
    }
    out.records.push_back(r);
  }
  if (x.size() < 2) throw std::runtime_error("fit_ed_exponent: decay window undetectable for most amplitudes");
  const LinearFit f = linear_fit(x, y);
  out.exponent = f.slope;
  out.intercept = f.intercept;
  out.residual = f.rms;
  return out;
}

std::function<FlowSchedule(double)> schedule_family(const std::string& name, const ShearProfile& p) {
  if (name == "none") return [](double A) { return FlowSchedule::quiescent(A); };
  if (name == "stationary") return [p](double A) { return FlowSchedule::stationary(A, p); };
  if (name == "log_shift") return [p](double A) { return FlowSchedule::log_shifted(A, p); };
  if (name == "rewound") return [p](double A) { return FlowSchedule::rewound(A, p); };
  throw std::invalid_argument("unknown schedule family '" + name + "'");
}

}  // namespace shearlab
