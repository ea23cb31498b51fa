#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "shearlab/fft.hpp"
#include "shearlab/mode_solver.hpp"
#include "shearlab/rate_fit.hpp"
#include "shearlab/scalar_solver.hpp"
#include "shearlab/spectral_ops.hpp"

using namespace shearlab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double max_rel_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    num = std::max(num, std::abs(a[j] - b[j]));
    den = std::max(den, std::abs(b[j]));
  }
  return num / den;
}

ModeState bump_mode(int n, int alpha, double A) {
  ModeState s;
  s.alpha = alpha;
  s.A = A;
  for (double v : bump_profile(n, 1.3, 0.4)) s.profile.emplace_back(v, 0.0);
  return s;
}

}  // namespace

TEST_CASE("inviscid stationary shear is a pointwise phase") {
  const int n = 64;
  const FlowSchedule s = FlowSchedule::stationary(kInf, ShearProfile::preset("cos_mix"));
  const ModeState m0 = bump_mode(n, 2, kInf);
  const ModeState m = advance_mode(m0, s, 3.0, 0.37);
  std::vector<Complex> exact(n);
  for (int j = 0; j < n; ++j) {
    const double y = 2 * kPi * j / n;
    exact[j] = m0.profile[j] * std::exp(Complex(0.0, -2.0 * 3.0 * s.phases()[0].profile.value(y)));
  }
  CHECK(max_rel_diff(m.profile, exact) < 1e-8);
}

TEST_CASE("inviscid log-shifted shear against quadrature of the phase") {
  using boost::math::quadrature::gauss_kronrod;
  const int n = 64;
  const ShearProfile p = ShearProfile::cosine();
  const FlowSchedule s = FlowSchedule::log_shifted(kInf, p);
  const ModeState m0 = bump_mode(n, 1, kInf);
  const ModeState m = advance_mode(m0, s, 4.0, 0.25);
  std::vector<Complex> exact(n);
  for (int j = 0; j < n; ++j) {
    const double y = 2 * kPi * j / n;
    const double I = gauss_kronrod<double, 61>::integrate(
        [&](double t) { return p.value(y + std::log1p(t)); }, 0.0, 4.0, 15, 1e-14);
    exact[j] = m0.profile[j] * std::exp(Complex(0.0, -I));
  }
  CHECK(max_rel_diff(m.profile, exact) < 1e-8);
}

TEST_CASE("pure heat decay of Fourier modes") {
  const double A = 50.0;
  const Grid g(8, 16, 8);
  ScalarState st{transform(RealField::sample(g, [](double x, double y, double z) {
                   return std::cos(x + 2 * y) + 0.5 * std::sin(3 * z);
                 })),
                 0.0, A};
  advance_scalar(st, FlowSchedule::quiescent(A), 7.0, 0.9);
  const SpectralField exact = transform(RealField::sample(g, [&](double x, double y, double z) {
    return std::exp(-5.0 * 7.0 / A) * std::cos(x + 2 * y) + 0.5 * std::exp(-9.0 * 7.0 / A) * std::sin(3 * z);
  }));
  CHECK(l2_norm(st.f - exact) < 1e-10 * l2_norm(exact));

  ModeState m;
  m.alpha = 3;
  m.A = A;
  for (int j = 0; j < 32; ++j) m.profile.push_back(std::exp(Complex(0.0, 2.0 * kPi * 4 * j / 32)));
  const ModeState e = advance_mode(m, FlowSchedule::quiescent(A), 2.5, 0.3);
  for (int j = 0; j < 32; ++j) CHECK(std::abs(e.profile[j] - m.profile[j] * std::exp(-25.0 * 2.5 / A)) < 1e-12);
}

TEST_CASE("3-D solver agrees with the mode solver") {
  const double A = 200.0;
  const Grid g(8, 32, 4);
  const FlowSchedule s = FlowSchedule::rewound(A, ShearProfile::preset("cos_mix"));
  ScalarState st{transform(RealField::sample(g, [](double x, double y, double z) {
                   return std::sin(x) * std::exp(std::cos(y)) + std::cos(2 * x + z) * std::sin(y);
                 })),
                 0.0, A};
  for (int alpha : {1, 2}) {
    const int gamma = alpha == 1 ? 0 : 1;
    ModeState m = extract_mode(st.f, ShearDirection::x_in_y, alpha, gamma, 0.0, A);
    m = advance_mode(m, s, 6.0, 0.2);
    ScalarState w = st;
    advance_scalar(w, s, 6.0, 0.2);
    const ModeState ref = extract_mode(w.f, ShearDirection::x_in_y, alpha, gamma, 6.0, A);
    CHECK(max_rel_diff(m.profile, ref.profile) < 1e-12);
  }
}

TEST_CASE("parallel and serial scalar steps agree to round-off") {
  const double A = 100.0;
  const Grid g(16, 16, 16);
  const FlowSchedule s = FlowSchedule::alternating(A, ShearProfile::cosine(), 0.0);
  ScalarState a{transform(RealField::sample(g, [](double x, double y, double z) {
                  return std::sin(x + y) * std::cos(z - 2 * y) + std::cos(3 * x);
                })),
                0.0, A};
  ScalarState b = a;
  const double L = std::cbrt(A);
  for (double t1 : {0.5, 4.0, L, L + 1.0, 2 * L}) {
    const double dt = t1 - a.t;
    step_scalar_inplace(a, s, dt);
    step_scalar_serial(b, s, dt);
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < a.f.size(); ++i) diff = std::max(diff, std::abs(a.f[i] - b.f[i]));
  CHECK(diff < 1e-13 * l2_norm(a.f));
}

TEST_CASE("L2 norm never grows under transport and diffusion") {
  const FlowSchedule s = FlowSchedule::rewound(1e3, ShearProfile::preset("sin"));
  ModeState m = bump_mode(128, 1, 1e3);
  double prev = mode_norm(m.profile);
  advance_mode(m, s, 60.0, 0.25, [&](const ModeState& x) {
    const double v = mode_norm(x.profile);
    CHECK(v <= prev * (1 + 1e-12));
    prev = v;
  });
}

TEST_CASE("decay window fit on synthetic data") {
  std::vector<double> t, drop;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.1 * i);
    drop.push_back(-0.5 * t.back() - 1.0 + std::exp(-5.0 * t.back()));
  }
  const DecayFit f = fit_decay_window(t, drop);
  REQUIRE(f.detected);
  CHECK(f.lambda == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(f.window_start >= 2.0 - 0.11);

  std::vector<double> flat(t.size(), -0.5);
  CHECK_FALSE(fit_decay_window(t, flat).detected);
}

TEST_CASE("linear fit and exponent contract") {
  const LinearFit l = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(l.slope == doctest::Approx(2.0));
  CHECK(l.intercept == doctest::Approx(1.0));
  CHECK(l.r2 == doctest::Approx(1.0));
  const auto fam = schedule_family("none", ShearProfile::cosine());
  CHECK_THROWS_AS(fit_ed_exponent(fam, {1e3, 1e4, 1e5}, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(fit_ed_exponent(fam, {1e3, 2e3, 3e3, 4e3}, 1, 0), std::invalid_argument);
  CHECK_THROWS(schedule_family("turbulent", ShearProfile::cosine()));
}

TEST_CASE("heat decay rate is the slowest Fourier rate") {
  RateStudyOptions o;
  o.n_shear = 32;
  const RateRecord r = measure_decay_rate(FlowSchedule::quiescent(400.0), 1, 0, o);
  REQUIRE(r.fit.detected);
  // slowest content of the random profile: alpha = 1, |k_y| = 1
  CHECK(r.fit.lambda * 400.0 == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("window operator norm") {
  const double A = 500.0, T = 7.0;
  CHECK(window_operator_norm(FlowSchedule::quiescent(A), 1, 0, A, 0.0, T, 32, 0.5) ==
        doctest::Approx(std::exp(-T / A)).epsilon(1e-12));
  const FlowSchedule s = FlowSchedule::stationary(A, ShearProfile::cosine());
  const double w = window_operator_norm(s, 1, 0, A, 0.0, T, 64, 0.05);
  CHECK(w < 1.0);
  ContractionOptions o;
  o.n_shear = 64;
  o.dt = 0.05;
  CHECK(measure_contraction(s, 1, 0, A, T, o) <= w * (1 + 1e-9));
}
