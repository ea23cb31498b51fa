#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "shearlab/calculus_checks.hpp"
#include "shearlab/diagnostics.hpp"
#include "shearlab/fft.hpp"
#include "shearlab/mode_solver.hpp"
#include "shearlab/rate_fit.hpp"
#include "shearlab/scalar_solver.hpp"
#include "shearlab/spectral_ops.hpp"

using namespace shearlab;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField sampled(const Grid& g, const std::function<double(double, double, double)>& f) {
  return transform(RealField::sample(g, f));
}

GammaContext stationary_ctx(const FlowSchedule& s, double t, int n) {
  GammaContext ctx(s, 0.0, n);
  for (double tt = std::min(t, 0.5); tt <= t + 1e-12; tt = std::min(t, tt + 0.5)) {
    ctx.advance(s, tt);
    if (tt == t) break;
  }
  return ctx;
}

/// Plain Sobolev sum over i+j+k <= M of ||d_x^i d_y^j d_z^k f||^2.
double sobolev_sum(const SpectralField& F, int M) {
  double s = 0.0;
  for (int i = 0; i <= M; ++i)
    for (int j = 0; i + j <= M; ++j)
      for (int k = 0; i + j + k <= M; ++k) {
        const double v = l2_norm(derivative(derivative(derivative(F, Axis::x, i), Axis::y, j), Axis::z, k));
        s += v * v;
      }
  return s;
}

}  // namespace

TEST_CASE("decomposition and double averages") {
  const Grid g(8, 8, 8);
  const SpectralField F =
      sampled(g, [](double x, double y, double z) { return 1 + std::cos(x) + std::cos(y) + std::cos(x + y) + std::cos(z); });
  const Decomposition d = decompose(F, Axis::x);
  CHECK(l2_norm(d.average - sampled(g, [](double, double y, double z) { return 1 + std::cos(y) + std::cos(z); })) <
        1e-12);
  CHECK(l2_norm(d.average + d.remainder - F) == 0.0);
  CHECK(l2_norm(decompose(d.remainder, Axis::x).average) == 0.0);
  const SpectralField dd = double_average(F, Axis::x, Axis::y);
  CHECK(l2_norm(dd - sampled(g, [](double, double, double z) { return 1 + std::cos(z); })) < 1e-12);
  CHECK_THROWS_AS(double_average(F, Axis::z, Axis::z), std::invalid_argument);
}

TEST_CASE("Fourier regions partition the energy") {
  const Grid g(8, 8, 8);
  const double vol = Grid::volume();
  auto r = region_energies(sampled(g, [](double x, double, double) { return std::cos(x); }));
  CHECK(r.R1 == doctest::Approx(vol / 2));
  CHECK(r.R2 + r.R3 + r.zero == doctest::Approx(0.0));
  r = region_energies(sampled(g, [](double x, double, double z) { return std::cos(z) + std::sin(x + 2 * z); }));
  CHECK(r.R2 == doctest::Approx(vol));
  CHECK(r.R1 + r.R3 == doctest::Approx(0.0));
  r = region_energies(sampled(g, [](double, double y, double) { return 2.0 + std::cos(y); }));
  CHECK(r.R3 == doctest::Approx(vol / 2));
  CHECK(r.zero == doctest::Approx(4 * vol));

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SpectralField f = random_band_limited(Grid(16, 16, 16), seed);
    const double n = l2_norm(f);
    CHECK(region_energies(f).total() == doctest::Approx(n * n).epsilon(1e-12));
  }
}

TEST_CASE("Z-norm at the reference time") {
  const FlowSchedule s = FlowSchedule::stationary(100.0, ShearProfile::cosine());
  const GammaContext ctx(s, 0.0, 16);
  const SpectralField f = sampled(Grid(8, 16, 8), [](double, double y, double) { return std::cos(y); });
  const double n = l2_norm(f);
  CHECK(z_norm(f, ctx, 2) == doctest::Approx(3 * n * n).epsilon(1e-12));

  const SpectralField r = random_band_limited(Grid(8, 16, 8), 4);
  CHECK(z_norm(r, ctx, 3) == doctest::Approx(sobolev_sum(r, 3)).epsilon(1e-12));
}

TEST_CASE("Z-norm is nonincreasing under the heat flow") {
  const double A = 10.0;
  const FlowSchedule q = FlowSchedule::quiescent(A);
  ScalarState st{random_band_limited(Grid(8, 16, 8), 9), 0.0, A};
  GammaContext ctx(q, 0.0, 16);
  double prev = z_norm(st.f, ctx, 3, 2.0);
  for (int i = 1; i <= 20; ++i) {
    advance_scalar(st, q, 0.5 * i, 0.5);
    ctx.advance(q, 0.5 * i);
    const double z = z_norm(st.f, ctx, 3, 2.0);
    CHECK(z <= prev);
    prev = z;
  }
}

TEST_CASE("mode Z-norm matches the field Z-norm") {
  const Grid g(8, 32, 8);
  const FlowSchedule s = FlowSchedule::stationary(1e3, ShearProfile::cosine());
  const GammaContext ctx = stationary_ctx(s, 1.3, 32);
  ModeState m;
  m.alpha = 1;
  m.gamma = 2;
  m.A = 1e3;
  for (double v : random_profile(32, 4, 3)) m.profile.emplace_back(v, 0.5 * v);
  // f = 2 Re(e^{i(x + 2z)} g(y))
  RealField f(g);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 32; ++j)
      for (int l = 0; l < 8; ++l) {
        const double x = g.coordinate(Axis::x, i), z = g.coordinate(Axis::z, l);
        f[g.index(i, j, l)] = 2.0 * (std::exp(Complex(0.0, x + 2 * z)) * m.profile[j]).real();
      }
  const double field = z_norm(transform(f), ctx, 3);
  const double mode = z_norm_mode(m, ctx, 3);
  CHECK(field == doctest::Approx(2.0 * 4 * kPi * kPi * mode).epsilon(1e-10));
}

TEST_CASE("functional at the reference time") {
  const Grid g(8, 8, 8);
  const double A = 50.0;
  const FlowSchedule s = FlowSchedule::stationary(A, ShearProfile::cosine());
  const GammaContext ctx(s, 0.0, 8);

  // x-independent fields have no remainders
  const PKSState flat = make_pks_state(inverse(sampled(g, [](double, double y, double) { return 1 + 0.1 * std::cos(y); })),
                                       inverse(sampled(g, [](double, double, double z) { return std::sin(z); })), A);
  const FunctionalValue zero = functional_F(flat, make_split(flat, Axis::x), ctx, 3, 1.0, 2.0, 0.1);
  CHECK(zero.value == 0.0);

  const PKSState st = make_pks_state(inverse(sampled(g, [](double x, double y, double) {
                                       return 2 + 0.3 * std::cos(x) * std::sin(y);
                                     })),
                                     inverse(sampled(g, [](double x, double, double z) {
                                       return std::sin(x + z);
                                     })),
                                     A);
  const ChemicalSplit sp = make_split(st, Axis::x);
  const double Q = 3.0;
  const FunctionalValue F = functional_F(st, sp, ctx, 2, 1.0, Q, 0.1);
  CHECK(F.c_block == 0.0);
  CHECK(F.value == doctest::Approx(F.n_block + F.carried_block));
  CHECK(F.carried_block == doctest::Approx(Q * Q * sobolev_sum(sp.carried, 3)).epsilon(1e-12));
  CHECK(F.n_block == doctest::Approx(sobolev_sum(remainder(transform(st.n), Axis::x), 2) * 1.0).epsilon(1e-12));

  const FunctionalValue H = functional_H(st, sp, ctx, 2, 1.0, 0.1);
  CHECK(H.M == 3);
  CHECK(H.Q == 1.0);
  const FunctionalValue L = functional_L(st, sp, ctx, 2, 1.0, 0.1);
  CHECK(L.M == 2);
  CHECK(L.Q == doctest::Approx(std::pow(A, 0.25)));

  ChemicalSplit late = sp;
  late.t_r = 1.0;
  CHECK_THROWS_AS(functional_F(st, late, ctx, 2, 1.0, Q, 0.1), std::invalid_argument);
}

TEST_CASE("x-average of Gamma^j f is d_y^j of the x-average") {
  const Grid g(16, 32, 8);
  for (const char* flow : {"stationary", "log_shift", "rewound"}) {
    CheckSetup cs;
    cs.flow = flow;
    cs.profile = "cos_mix";
    const FlowSchedule s = check_schedule(cs);
    const GammaContext ctx = context_at(s, 1.9, 32);
    const SpectralField f = random_band_limited(g, 17);
    for (int j = 1; j <= 4; ++j) {
      const SpectralField lhs = decompose(apply_gamma(ctx, f, 0, j, 0), Axis::x).average;
      const SpectralField rhs = derivative(decompose(f, Axis::x).average, Axis::y, j);
      CHECK(l2_norm(lhs - rhs) <= 1e-12 * l2_norm(rhs));
    }
  }
}

TEST_CASE("gradient bound with a constant fixed once") {
  const Grid g(8, 32, 8);
  CheckSetup cs;
  cs.profile = "cos_mix";
  const FlowSchedule s = check_schedule(cs);
  double C = 0.0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed)
    C = std::max(C, gradient_bound_terms(random_band_limited(g, seed), context_at(s, 1.0, 32), 2).required_constant(1.0));
  CHECK(C < 10.0);
  for (double t : {0.5, 2.0, 4.0}) {
    const GammaContext ctx = context_at(s, t, 32);
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
      const GradientBoundTerms b = gradient_bound_terms(random_band_limited(g, seed), ctx, 2);
      CHECK(b.lhs <= b.main + C * t * b.commutator);
    }
  }
}

TEST_CASE("product and embedding ratios are stable across trials") {
  const Grid g(8, 32, 8);
  const FlowSchedule s = check_schedule({});
  double pmin = 1e300, pmax = 0.0, emin = 1e300, emax = 0.0;
  for (double t : {0.0, 1.0, 3.0}) {
    const GammaContext ctx = context_at(s, t, 32);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const SpectralField f = random_band_limited(g, seed), h = random_band_limited(g, seed + 50);
      const double p = product_ratio(f, h, ctx, 2);
      const double e = linf_embedding_ratio(f, ctx);
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
      emin = std::min(emin, e);
      emax = std::max(emax, e);
    }
  }
  MESSAGE("product ratio in [" << pmin << ", " << pmax << "], embedding ratio in [" << emin << ", " << emax << "]");
  CHECK(pmax / pmin < 10.0);
  CHECK(emax / emin < 10.0);
  CHECK(emax < 1.0);
}

TEST_CASE("rewound-flow Z-norm decays at the L2 rate") {
  const double A = 1e3;
  const FlowSchedule s = FlowSchedule::rewound(A, ShearProfile::cosine());
  RateStudyOptions o;
  o.n_shear = 128;
  const RateRecord rate = measure_decay_rate(s, 1, 0, o);
  REQUIRE(rate.fit.detected);
  const double lambda = rate.fit.lambda;

  ModeState m;
  m.A = A;
  for (double v : random_profile(128, 32, 7)) m.profile.emplace_back(0.0, -0.5 * v);
  const double dt = 0.02 * std::cbrt(A);
  GammaContext ctx(s, 0.0, 128, GammaContext::kDefaultMaxOrder, std::max(1.0, dt));
  const double z0 = z_norm_mode(m, ctx, 3);
  double worst = 0.0;
  advance_mode(m, s, 12.0 / lambda, dt, [&](const ModeState& x) {
    ctx.advance(s, x.t);
    worst = std::max(worst, z_norm_mode(x, ctx, 3) / (z0 * std::exp(-2.0 * lambda * x.t)));
  });
  MESSAGE("largest Z(t) / (Z(0) e^{-2 lambda t}) = " << worst);
  CHECK(worst <= 2.0 * std::exp(2.0));
}
