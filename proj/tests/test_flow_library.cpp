#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "shearlab/fft.hpp"
#include "shearlab/flow_schedule.hpp"
#include "shearlab/gamma_context.hpp"
#include "shearlab/spectral_ops.hpp"

using namespace shearlab;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kPi = std::numbers::pi;

double gk(const std::function<double(double)>& f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST_CASE("profiles are normalized and real") {
  const ShearProfile c = ShearProfile::cosine();
  CHECK(c.value(0.0) == doctest::Approx(1.0));
  CHECK(c.value(kPi / 2, 1) == doctest::Approx(-1.0));
  CHECK(c.sup_norm() <= 1.0 + 1e-12);
  const ShearProfile big(0.0, {Complex(3.0, 1.0), Complex(0.0, 2.0)});
  double m = 0.0;
  for (int i = 0; i < 4000; ++i) m = std::max(m, std::abs(big.value(2 * kPi * i / 4000)));
  CHECK(m <= 1.0 + 1e-9);
  CHECK(m > 0.999);
  CHECK_THROWS_AS(ShearProfile(0.3, {Complex(1e-14, 0.0)}), std::invalid_argument);
  CHECK_THROWS_AS(ShearProfile::preset("tanh"), std::invalid_argument);
}

TEST_CASE("critical points of the cosine profile") {
  const auto cp = ShearProfile::cosine().critical_points();
  REQUIRE(cp.size() == 2);
  CHECK(std::min(cp[0], cp[1]) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::max(cp[0], cp[1]) == doctest::Approx(kPi).epsilon(1e-9));
}

TEST_CASE("shift laws") {
  const ShiftLaw l = ShiftLaw::log_shift();
  CHECK(l.phi(2.0) == doctest::Approx(std::log(3.0)));
  CHECK(ShiftLaw::smoothstep(0.0) == 0.0);
  CHECK(ShiftLaw::smoothstep(1.0) == 1.0);
  CHECK(ShiftLaw::smoothstep(0.5) == doctest::Approx(0.5));

  const double T = 5.0;
  const ShiftLaw r = ShiftLaw::rewound(T);
  CHECK(r.period() == 2 * T);
  CHECK(r.phi(0.0) == 0.0);
  CHECK(r.phi(T * 0.5) == doctest::Approx(std::log1p(T * 0.5)));
  for (double t : {0.3, 4.1, 7.7, 9.2})
    CHECK(r.phi(t + 2 * T) == doctest::Approx(r.phi(t)).epsilon(1e-12));
  // C^1 across the restart at s = 2T: unit slope on both sides.
  const double h = 1e-5;
  CHECK((r.phi(2 * T + h) - r.phi(2 * T)) / h == doctest::Approx(1.0).epsilon(1e-3));
  CHECK((r.phi(2 * T) - r.phi(2 * T - h)) / h == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(r.phi(2 * T - 1e-9)) < 1e-8);
}

TEST_CASE("schedule layout") {
  CHECK(FlowSchedule::zeta_for_order(5) == doctest::Approx(1.0 / 756.0));
  const double A = 1000.0, zeta = 0.01;
  const FlowSchedule s = FlowSchedule::alternating(A, ShearProfile::cosine(), zeta);
  const double L = std::pow(A, 1.0 / 3.0 + zeta);
  CHECK(s.horizon() == FlowSchedule::kInfinity);
  auto loc = s.locate(1.5 * L);
  CHECK(loc.index == 1);
  CHECK(s.phases()[loc.index].direction == ShearDirection::z_in_x);
  CHECK(loc.start == doctest::Approx(L));
  loc = s.locate(3.2 * L);
  CHECK(loc.index == 0);
  CHECK(loc.cycle == 1);
  CHECK(s.next_boundary(0.1) == doctest::Approx(L));
  CHECK_THROWS_AS(s.shift_moments(0.9 * L, 1.1 * L), std::invalid_argument);
  CHECK(direction_from_label("y_in_z") == ShearDirection::y_in_z);
  CHECK(flow_axis(ShearDirection::y_in_z) == Axis::y);
  CHECK(shear_axis(ShearDirection::y_in_z) == Axis::z);
  CHECK(spectator_axis(ShearDirection::y_in_z) == Axis::x);
  CHECK_THROWS(FlowSchedule::quiescent(A).locate(0.0));
}

TEST_CASE("walking phase ends always makes progress") {
  for (double A : {10.0, 100.0, 300.0}) {
    const FlowSchedule s = FlowSchedule::alternating(A, ShearProfile::cosine(), FlowSchedule::zeta_for_order(5));
    double t = 0.0;
    for (int k = 0; k < 300; ++k) {
      const double next = s.next_boundary(t);
      REQUIRE(next > t);
      CHECK(s.locate(next).index == static_cast<std::size_t>((k + 1) % 3));
      t = next;
    }
  }
}

TEST_CASE("shift moments match adaptive quadrature") {
  const FlowSchedule s = FlowSchedule::log_shifted(100.0, ShearProfile::preset("cos_mix"));
  const auto E = s.shift_moments(0.3, 2.9);
  REQUIRE(E.size() == 2);
  for (int k = 1; k <= 2; ++k) {
    const double re = gk([&](double t) { return std::cos(k * std::log1p(t)); }, 0.3, 2.9);
    const double im = gk([&](double t) { return std::sin(k * std::log1p(t)); }, 0.3, 2.9);
    CHECK(std::abs(E[k - 1] - Complex(re, im)) < 1e-9);
  }
}

TEST_CASE("step integral of a stationary flow") {
  const FlowSchedule s = FlowSchedule::stationary(10.0, ShearProfile::cosine());
  const auto I = s.step_integral(0.5, 1.75, 16);
  for (int j = 0; j < 16; ++j) CHECK(I[j] == doctest::Approx(1.25 * std::cos(2 * kPi * j / 16)).epsilon(1e-13));
  CHECK(FlowSchedule::quiescent(10.0).step_integral(0.0, 1.0, 16).empty());
}

TEST_CASE("accumulated shear: stationary closed form") {
  const FlowSchedule s = FlowSchedule::stationary(1e4, ShearProfile::cosine());
  GammaContext ctx(s, 0.0, 32);
  for (double t = 0.25; t <= 2.0 + 1e-12; t += 0.25) ctx.advance(s, t);
  for (int j = 0; j < 32; ++j) {
    const double y = 2 * kPi * j / 32;
    CHECK(ctx.B(1)[j] == doctest::Approx(-2.0 * std::sin(y)).epsilon(1e-12));
    CHECK(ctx.B(2)[j] == doctest::Approx(-2.0 * std::cos(y)).epsilon(1e-12));
  }
  CHECK(ctx.phi_weight() == doctest::Approx(1.0 / (1.0 + 8.0 / 1e4)));
}

TEST_CASE("accumulated shear: log shift against quadrature") {
  const ShearProfile p = ShearProfile::preset("cos_mix");
  const FlowSchedule s = FlowSchedule::log_shifted(1e4, p);
  GammaContext ctx(s, 0.0, 16);
  for (int i = 1; i <= 6; ++i) ctx.advance(s, 0.5 * i);
  for (int j = 0; j < 16; j += 3) {
    const double y = 2 * kPi * j / 16;
    const double b1 = gk([&](double t) { return p.value(y + std::log1p(t), 1); }, 0.0, 3.0);
    const double b3 = gk([&](double t) { return p.value(y + std::log1p(t), 3); }, 0.0, 3.0);
    CHECK(std::abs(ctx.B(1)[j] - b1) < 1e-8);
    CHECK(std::abs(ctx.B(3)[j] - b3) < 1e-8);
  }
}

TEST_CASE("d_y B^(m) equals B^(m+1) on the grid") {
  const FlowSchedule s = FlowSchedule::rewound(1e3, ShearProfile::preset("cos_mix"));
  const GammaContext ctx = accumulate_B(accumulate_B(GammaContext(s, 0.0, 32), s, 0.8), s, 1.7);
  for (int m = 1; m < 5; ++m) {
    std::vector<Complex> c(ctx.B(m).begin(), ctx.B(m).end());
    fft::transform_line(32, c, fft::Direction::forward);
    for (int i = 0; i < 32; ++i) c[i] *= Complex(0.0, i <= 16 ? (i == 16 ? 0 : i) : i - 32) / 32.0;
    fft::transform_line(32, c, fft::Direction::backward);
    double err = 0.0;
    for (int j = 0; j < 32; ++j) err = std::max(err, std::abs(c[j].real() - ctx.B(m + 1)[j]));
    CHECK(err < 1e-11);
  }
}

TEST_CASE("context contract") {
  const FlowSchedule s = FlowSchedule::alternating(27.0, ShearProfile::cosine(), 0.0);
  GammaContext ctx(s, 0.0, 16);
  ctx.advance(s, 0.5);
  CHECK_THROWS_AS(ctx.advance(s, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(ctx.advance(s, 2.0), std::invalid_argument);
  ctx.advance(s, 1.5);
  ctx.advance(s, 2.5);
  ctx.advance(s, 3.0);
  CHECK_THROWS_AS(ctx.advance(s, 3.5), std::invalid_argument);
  CHECK_THROWS_AS(ctx.B(9), std::out_of_range);

  const SpectralField F(Grid(8, 8, 8));
  CHECK_THROWS_AS(apply_gamma(ctx, F, 0, 1, 0), std::invalid_argument);
}

TEST_CASE("Gamma at the reference time is d_y") {
  const FlowSchedule s = FlowSchedule::stationary(100.0, ShearProfile::cosine());
  const GammaContext ctx(s, 0.0, 16);
  const Grid g(8, 16, 4);
  const SpectralField f =
      transform(RealField::sample(g, [](double x, double y, double z) { return std::sin(x + 2 * y) * std::cos(z); }));
  const SpectralField a = apply_gamma(ctx, f, 1, 2, 1);
  const SpectralField b = derivative(derivative(derivative(f, Axis::x, 1), Axis::y, 2), Axis::z, 1);
  CHECK(l2_norm(a - b) < 1e-12 * l2_norm(b));
}
