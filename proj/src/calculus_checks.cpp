#include "shearlab/calculus_checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "shearlab/fft.hpp"
#include "shearlab/scalar_solver.hpp"
#include "shearlab/shear_profile.hpp"
#include "shearlab/spectral_ops.hpp"

namespace shearlab {

namespace {

using Op = std::function<SpectralField(const SpectralField&)>;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

SpectralField gamma_once(const GammaContext& ctx, const SpectralField& F) {
  return apply_gamma(ctx, F, 0, 1, 0, false);
}

SpectralField gamma_power(const GammaContext& ctx, SpectralField F, int j) {
  for (int r = 0; r < j; ++r) F = gamma_once(ctx, F);
  return F;
}

// d_y^k of a function sampled on the shear line.
std::vector<double> line_derivative(const std::vector<double>& v, int k) {
  const int n = static_cast<int>(v.size());
  std::vector<Complex> c(v.begin(), v.end());
  fft::transform_line(n, c, fft::Direction::forward);
  for (int i = 0; i < n; ++i) {
    const int w = i <= n / 2 ? i : i - n;
    Complex m = 1.0;
    for (int r = 0; r < k; ++r) m *= Complex(0.0, w);
    if (2 * i == n && k % 2 == 1) m = 0.0;
    c[static_cast<std::size_t>(i)] *= m / static_cast<double>(n);
  }
  fft::transform_line(n, c, fft::Direction::backward);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = c[i].real();
  return out;
}

double grad_power_norm_sq(const SpectralField& F, int m) {
  double s = 0.0;
  F.for_each_mode([&](const Complex& c, int kx, int ky, int kz) {
    const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
    s += std::pow(k2, m) * std::norm(c);
  });
  const double n = static_cast<double>(F.size());
  return s * Grid::volume() / (n * n);
}

void heat_inplace(SpectralField& F, double tau) {
  F.for_each_mode([&](Complex& c, int kx, int ky, int kz) {
    c *= std::exp(-(double(kx) * kx + double(ky) * ky + double(kz) * kz) * tau);
  });
}

}  // namespace

nlohmann::json CheckReport::to_json() const {
  return {{"id", id},       {"j", j},           {"m", m},       {"residual_max", residual_max},
          {"tolerance", tolerance}, {"trials", trials}, {"seed", seed}, {"pass", pass}};
}

nlohmann::json TransportOrderReport::to_json() const {
  return {{"id", "gamma_transport"}, {"dts", dts}, {"residuals", residuals}, {"min_ratio", min_ratio}, {"pass", pass}};
}

nlohmann::json HeatReport::to_json() const {
  return {{"id", "heat_bounds"},
          {"kernel_ratio_max", kernel_ratio_max},
          {"kernel_bound", kernel_bound},
          {"duhamel_ratio_max", duhamel_ratio_max},
          {"trials", trials},
          {"seed", seed},
          {"pass", pass}};
}

nlohmann::json AverageReport::to_json() const {
  return {{"id", "average_contraction"}, {"trials", trials},           {"comparisons", comparisons},
          {"violations", violations},    {"worst_excess", worst_excess}, {"seed", seed},
          {"pass", pass}};
}

SpectralField random_band_limited(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField F(g);
  const int bx = g.n(Axis::x) / 4, by = g.n(Axis::y) / 4, bz = g.n(Axis::z) / 4;
  F.for_each_mode([&](Complex& c, int kx, int ky, int kz) {
    const bool keep = std::abs(kx) <= bx && std::abs(ky) <= by && std::abs(kz) <= bz;
    c = keep ? Complex(normal(rng), normal(rng)) : Complex(0.0, 0.0);
  });
  F[0] = 0.0;
  // Projecting through physical space makes the spectrum Hermitian.
  return transform(inverse(F));
}

FlowSchedule check_schedule(const CheckSetup& s) {
  const ShearProfile p = ShearProfile::preset(s.profile);
  if (s.flow == "stationary") return FlowSchedule::stationary(s.A, p);
  if (s.flow == "log_shift") return FlowSchedule::log_shifted(s.A, p);
  if (s.flow == "rewound") return FlowSchedule::rewound(s.A, p);
  throw std::invalid_argument("check_schedule: unknown flow '" + s.flow + "'");
}

GammaContext context_at(const FlowSchedule& schedule, double t, int n_shear) {
  GammaContext ctx(schedule, 0.0, n_shear);
  double now = 0.0;
  while (now < t) {
    now = std::min(t, now + 0.5);
    ctx.advance(schedule, now);
  }
  return ctx;
}

double relative_residual(const SpectralField& a, const SpectralField& b, double scale) {
  return l2_norm(a - b) / std::max({l2_norm(a), l2_norm(b), scale, 1e-14});
}

CheckReport check_ad_expansion(int n, int m, int trials, const CheckSetup& setup) {
  if (n < 1 || n > 4) throw std::invalid_argument("check_ad_expansion: n must be in [1, 4]");
  if (m != 1 && m != 2) throw std::invalid_argument("check_ad_expansion: inner order must be 1 or 2");
  CheckReport r;
  r.id = "ad_expansion";
  r.j = n;
  r.m = m;
  r.trials = trials;
  r.seed = setup.seed;
  r.tolerance = setup.tolerance;
  const Grid g(setup.nx, setup.ny, setup.nz);
  const FlowSchedule schedule = check_schedule(setup);
  for (double t : setup.times) {
    const GammaContext ctx = context_at(schedule, t, setup.ny);
    const Op A = [&](const SpectralField& F) { return gamma_once(ctx, F); };
    const Op B = [&](const SpectralField& F) { return derivative(F, Axis::y, m); };
    // ad_A^k(B) g by its recursive definition.
    std::function<SpectralField(int, const SpectralField&)> ad = [&](int k, const SpectralField& F) {
      if (k == 0) return B(F);
      return A(ad(k - 1, F)) - ad(k - 1, A(F));
    };
    for (int trial = 0; trial < trials; ++trial) {
      const SpectralField f = random_band_limited(g, setup.seed + 1000u * trial + static_cast<std::uint64_t>(t * 977));
      const SpectralField left = gamma_power(ctx, B(f), n), right = B(gamma_power(ctx, f, n));
      const SpectralField lhs = left - right;
      SpectralField rhs(g);
      SpectralField Al = f;
      for (int l = 0; l < n; ++l) {
        rhs += binomial(n, l) * ad(n - l, Al);
        Al = A(Al);
      }
      r.residual_max =
          std::max(r.residual_max, relative_residual(lhs, rhs, std::max(l2_norm(left), l2_norm(right))));
    }
  }
  r.pass = r.residual_max < r.tolerance;
  return r;
}

CheckReport check_gamma_commutators(int j, int m, int trials, const CheckSetup& setup) {
  if (j < 1 || j > 4) throw std::invalid_argument("check_gamma_commutators: j must be in [1, 4]");
  if (m != 1 && m != 2) throw std::invalid_argument("check_gamma_commutators: inner order must be 1 or 2");
  CheckReport r;
  r.id = m == 1 ? "gamma_commutator_dy" : "gamma_commutator_dyy";
  r.j = j;
  r.m = m;
  r.trials = trials;
  r.seed = setup.seed;
  r.tolerance = setup.tolerance;
  const Grid g(setup.nx, setup.ny, setup.nz);
  const FlowSchedule schedule = check_schedule(setup);
  for (double t : setup.times) {
    const GammaContext ctx = context_at(schedule, t, setup.ny);
    std::vector<double> b1sq = ctx.B(1);
    for (double& v : b1sq) v *= v;
    for (int trial = 0; trial < trials; ++trial) {
      const SpectralField f = random_band_limited(g, setup.seed + 7919u * trial + static_cast<std::uint64_t>(t * 613));
      const SpectralField left = gamma_power(ctx, derivative(f, Axis::y, m), j);
      const SpectralField right = derivative(gamma_power(ctx, f, j), Axis::y, m);
      const SpectralField lhs = left - right;
      SpectralField rhs(g);
      for (int l = 0; l < j; ++l) {
        const SpectralField Gl = gamma_power(ctx, f, l);
        const int d = j - l;
        SpectralField term(g);
        if (m == 1) {
          term = -1.0 * multiply_along(derivative(Gl, Axis::x, 1), Axis::y, ctx.B(d + 1));
        } else {
          term = -2.0 * multiply_along(derivative(gamma_once(ctx, Gl), Axis::x, 1), Axis::y, ctx.B(d + 1));
          term += multiply_along(derivative(Gl, Axis::x, 2), Axis::y, line_derivative(b1sq, d));
          term -= multiply_along(derivative(Gl, Axis::x, 1), Axis::y, ctx.B(d + 2));
        }
        rhs += binomial(j, l) * term;
      }
      r.residual_max =
          std::max(r.residual_max, relative_residual(lhs, rhs, std::max(l2_norm(left), l2_norm(right))));
    }
  }
  r.pass = r.residual_max < r.tolerance;
  return r;
}

double gamma_transport_residual(const CheckSetup& setup, double t, double dt, std::uint64_t seed) {
  if (dt <= 0.0 || t - dt < 0.0) throw std::invalid_argument("gamma_transport_residual: need 0 < dt <= t");
  const Grid g(setup.nx, setup.ny, setup.nz);
  const FlowSchedule schedule = check_schedule(setup);
  const double inf = std::numeric_limits<double>::infinity();
  const SpectralField f0 = random_band_limited(g, seed);
  auto transported = [&](double time) {
    ScalarState s{f0, 0.0, inf};
    advance_scalar(s, schedule, time, 0.25);
    return s.f;
  };
  const SpectralField lo = gamma_once(context_at(schedule, t - dt, setup.ny), transported(t - dt));
  const SpectralField hi = gamma_once(context_at(schedule, t + dt, setup.ny), transported(t + dt));
  const SpectralField mid = gamma_once(context_at(schedule, t, setup.ny), transported(t));
  const ShearSample u = schedule.evaluate_shear(t, Grid::line(Axis::y, setup.ny));
  std::vector<double> uy(u.profile.values().begin(), u.profile.values().end());
  const SpectralField advect = multiply_along(derivative(mid, Axis::x, 1), Axis::y, uy);
  SpectralField dt_term = hi - lo;
  dt_term *= 1.0 / (2.0 * dt);
  return l2_norm(dt_term + advect) / std::max(l2_norm(advect), 1e-14);
}

TransportOrderReport check_gamma_transport(const CheckSetup& setup, double t, double dt0, int halvings,
                                           double min_ratio) {
  TransportOrderReport r;
  double dt = dt0;
  for (int h = 0; h <= halvings; ++h, dt *= 0.5) {
    r.dts.push_back(dt);
    r.residuals.push_back(gamma_transport_residual(setup, t, dt, setup.seed));
  }
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < r.residuals.size(); ++i)
    r.min_ratio = std::min(r.min_ratio, r.residuals[i - 1] / r.residuals[i]);
  r.pass = r.residuals.size() > 1 && r.min_ratio >= min_ratio;
  return r;
}

HeatReport check_heat_bounds(int trials, std::uint64_t seed, int n, int taus) {
  HeatReport r;
  r.trials = trials;
  r.seed = seed;
  r.kernel_bound = 1.0 / std::sqrt(2.0 * std::exp(1.0));
  const double duhamel_c = std::sqrt(2.0 / std::exp(1.0));
  const Grid g(n, n, n);
  for (int trial = 0; trial < trials; ++trial) {
    const SpectralField f = random_band_limited(g, seed + 31u * trial);
    const SpectralField c_in = random_band_limited(g, seed + 31u * trial + 17u);
    const double f_norm = l2_norm(f);
    for (int it = 0; it < taus; ++it) {
      const double tau = std::pow(10.0, -4.0 + 5.0 * it / std::max(1, taus - 1));
      SpectralField h = f;
      heat_inplace(h, tau);
      double grad_sq = 0.0;
      for (Axis a : kAxes) grad_sq += l2_norm_sq(derivative(h, a, 1));
      r.kernel_ratio_max = std::max(r.kernel_ratio_max, std::sqrt(grad_sq * tau) / f_norm);

      // Exact solution of d_tau c = Lap c + f from c_in.
      SpectralField c = c_in;
      c.for_each_mode([&](Complex& v, int kx, int ky, int kz) {
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) return;
        const double e = std::exp(-k2 * tau);
        const std::size_t idx = g.index(kx < 0 ? kx + n : kx, ky < 0 ? ky + n : ky, kz < 0 ? kz + n : kz);
        v = e * v + (1.0 - e) / k2 * f[idx];
      });
      for (int m = 0; m <= 2; ++m) {
        const double lhs = std::sqrt(grad_power_norm_sq(c, m + 1));
        const double rhs = duhamel_c * std::sqrt(tau) * std::sqrt(grad_power_norm_sq(f, m)) +
                           std::sqrt(grad_power_norm_sq(c_in, m + 1));
        r.duhamel_ratio_max = std::max(r.duhamel_ratio_max, lhs / rhs);
      }
    }
  }
  r.pass = r.kernel_ratio_max <= r.kernel_bound + 1e-6 && r.duhamel_ratio_max <= 1.0 + 1e-12;
  return r;
}

RealField average_along(const RealField& f, Axis a) {
  const Grid& g = f.grid();
  const auto& d = g.dims();
  RealField out(g);
  const int na = g.n(a);
  const std::size_t st = g.stride(a);
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j)
      for (int l = 0; l < d[2]; ++l) {
        const int pos[3] = {i, j, l};
        if (pos[index_of(a)] != 0) continue;
        const std::size_t base = g.index(i, j, l);
        double s = 0.0;
        for (int q = 0; q < na; ++q) s += f[base + q * st];
        s /= na;
        for (int q = 0; q < na; ++q) out[base + q * st] = s;
      }
  return out;
}

AverageReport check_average_contraction(int trials, std::uint64_t seed, int n) {
  AverageReport r;
  r.trials = trials;
  r.seed = seed;
  const Grid g(n, n, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const double ps[3] = {1.0, 2.0, std::numeric_limits<double>::infinity()};
  auto compare = [&](double lhs, double rhs) {
    ++r.comparisons;
    const double excess = (lhs - rhs) / std::max(rhs, 1e-300);
    r.worst_excess = std::max(r.worst_excess, excess);
    if (lhs > rhs * (1.0 + 1e-12) + 1e-300) ++r.violations;
  };
  for (int trial = 0; trial < trials; ++trial) {
    RealField f(g);
    // Alternate signed and positive heavy-tailed samples.
    for (auto& v : f.values()) v = trial % 2 == 0 ? normal(rng) : expo(rng) * expo(rng);
    for (Axis a : kAxes) {
      const RealField fa = average_along(f, a);
      for (Axis b : kAxes) {
        if (b == a) continue;
        const RealField fab = average_along(fa, b);
        for (double p : ps) {
          compare(lp_norm(fa, p), lp_norm(f, p));
          compare(lp_norm(fab, p), lp_norm(fa, p));
        }
      }
    }
  }
  r.pass = r.violations == 0;
  return r;
}

}  // namespace shearlab
