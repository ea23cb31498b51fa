#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "shearlab/fft.hpp"
#include "shearlab/pks.hpp"
#include "shearlab/spectral_ops.hpp"

using namespace shearlab;

namespace {

constexpr double kPi = std::numbers::pi;

RealField constant(const Grid& g, double v) {
  RealField f(g);
  for (auto& x : f.values()) x = v;
  return f;
}

/// Smooth positive density with a few random low modes.
PKSState smooth_state(const Grid& g, double A, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  RealField n = RealField::sample(g, [&](double x, double y, double z) {
    return 2.0 + 0.5 * a * std::cos(x + y) + 0.4 * b * std::sin(2 * y - z) + 0.3 * c * std::cos(x - 2 * z);
  });
  RealField cc = RealField::sample(g, [&](double x, double y, double z) {
    return d * std::sin(y) + 0.2 * std::cos(x + z);
  });
  return make_pks_state(std::move(n), std::move(cc), A);
}

double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("shearlab_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("state construction removes the chemical mean") {
  const Grid g(8, 8, 8);
  const PKSState s = make_pks_state(constant(g, 3.0), RealField::sample(g, [](double x, double, double) {
                                      return 5.0 + std::cos(x);
                                    }),
                                    10.0);
  CHECK(std::abs(chemical_mean(s)) < 1e-12);
  CHECK(s.mass == doctest::Approx(3.0 * Grid::volume()));
  CHECK(s.initial_linf == doctest::Approx(3.0));
  CHECK_THROWS_AS(make_pks_state(constant(g, 1.0), constant(Grid(4, 4, 4), 0.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_pks_state(constant(g, 1.0), constant(g, 0.0), 0.0), std::invalid_argument);
}

TEST_CASE("aggregation term for constant density") {
  const Grid g(8, 8, 8);
  const double A = 4.0, n0 = 3.0;
  const SpectralField agg = aggregation_term(transform(constant(g, n0)),
                                             transform(RealField::sample(g, [](double x, double, double) {
                                               return std::cos(x);
                                             })),
                                             A);
  const RealField exact = RealField::sample(g, [&](double x, double, double) { return n0 * std::cos(x) / A; });
  CHECK(max_abs_diff(inverse(agg), exact) < 1e-13);
}

TEST_CASE("homogeneous state is steady") {
  const Grid g(8, 8, 8);
  const FlowSchedule s = FlowSchedule::alternating(100.0, ShearProfile::cosine(), 0.0);
  PKSState st = make_pks_state(constant(g, 1.5), RealField(g), 100.0);
  for (int i = 0; i < 20; ++i) st = step_pks(st, s, 0.2);
  CHECK(max_abs_diff(st.n, constant(g, 1.5)) < 1e-12);
  CHECK(linf_norm(st.c) < 1e-12);
  CHECK_FALSE(detect_blowup(st).triggered);
}

TEST_CASE("linearization about the homogeneous state") {
  // eta_t = (-k^2 eta + nbar k^2 psi) / A, psi_t = (-k^2 psi + eta) / A
  const Grid g(8, 8, 8);
  const double A = 1.0, nbar = 2.0, eps = 1e-6, T = 2.0;
  PKSState st = make_pks_state(RealField::sample(g, [&](double x, double, double) {
                                 return nbar + eps * std::cos(x);
                               }),
                               RealField(g), A);
  PksParams p;
  p.adaptive = false;
  for (int i = 0; i < 200; ++i) st = step_pks(st, FlowSchedule::quiescent(A), T / 200, p);
  const double k2 = 1.0, a = nbar * k2;
  const double s = std::sqrt(a) * T / A;
  const double decay = std::exp(-k2 * T / A);
  const double eta = eps * decay * std::cosh(s);
  const double psi = eps * decay * std::sinh(s) / std::sqrt(a);
  const SpectralField nh = transform(st.n), ch = transform(st.c);
  const double norm = 0.5 * static_cast<double>(g.size());
  CHECK(nh.at(1, 0, 0).real() / norm == doctest::Approx(eta).epsilon(1e-3));
  CHECK(ch.at(1, 0, 0).real() / norm == doctest::Approx(psi).epsilon(1e-3));
}

TEST_CASE("small mass stays bounded without flow in 2-D") {
  const Grid g(1, 32, 32);
  const double mass = 1.0, w = 0.5;
  RealField n = RealField::sample(g, [&](double, double y, double z) {
    const double dy = std::remainder(y - kPi, 2 * kPi), dz = std::remainder(z - kPi, 2 * kPi);
    return mass / (2 * kPi) * std::exp(-(dy * dy + dz * dz) / (2 * w * w)) / (2 * kPi * w * w);
  });
  PksRun run(FlowSchedule::quiescent(1.0), {}, make_pks_state(std::move(n), RealField(g), 1.0));
  while (run.state().t < 50.0) REQUIRE(run.advance(50.0));
  CHECK_FALSE(run.verdict().triggered);
  CHECK(linf_norm(run.state().n) <= run.state().initial_linf);
}

TEST_CASE("x-independent data reproduces the 2-D solver") {
  const Grid g3(8, 16, 16), g2(1, 16, 16);
  auto nf = [](double, double y, double z) { return 1.0 + 0.3 * std::cos(y) * std::sin(2 * z); };
  auto cf = [](double, double y, double z) { return 0.1 * std::sin(y + z); };
  PKSState a = make_pks_state(RealField::sample(g3, nf), RealField::sample(g3, cf), 2.0);
  PKSState b = make_pks_state(RealField::sample(g2, nf), RealField::sample(g2, cf), 2.0);
  PksParams p;
  p.adaptive = false;
  for (int i = 0; i < 50; ++i) {
    a = step_pks(a, FlowSchedule::quiescent(2.0), 0.05, p);
    b = step_pks(b, FlowSchedule::quiescent(2.0), 0.05, p);
  }
  double err = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 16; ++j)
      for (int l = 0; l < 16; ++l) err = std::max(err, std::abs(a.n[g3.index(i, j, l)] - b.n[g2.index(0, j, l)]));
  CHECK(err < 1e-10);
}

TEST_CASE("blow-up detection") {
  const Grid g(8, 8, 8);
  PKSState s = make_pks_state(constant(g, 1.0), RealField(g), 10.0);
  CHECK_FALSE(detect_blowup(s).triggered);
  CHECK(detect_blowup(s, {}, 1e-12).cause == BlowupCause::dt_collapse);

  PKSState hot = s;
  hot.n[5] = 2e3;
  CHECK(detect_blowup(hot).cause == BlowupCause::linf_threshold);

  PKSState rough = s;
  rough.n = RealField::sample(g, [](double x, double, double) { return 1.0 + 0.1 * std::cos(3 * x); });
  CHECK(detect_blowup(rough).cause == BlowupCause::highk_energy_fraction);
  CHECK(highk_energy_fraction(transform(rough.n)) == doctest::Approx(1.0));

  PKSState bad = s;
  bad.c[3] = std::nan("");
  CHECK(detect_blowup(bad).cause == BlowupCause::nonfinite);
  CHECK_THROWS_AS(step_pks(bad, FlowSchedule::quiescent(10.0), 0.1), BlowupError);

  BlowupVerdict v;
  BlowupVerdict first{true, 2.0, BlowupCause::linf_threshold};
  BlowupVerdict later{true, 3.0, BlowupCause::nonfinite};
  v.merge({});
  CHECK_FALSE(v.triggered);
  v.merge(first);
  v.merge(later);
  v.merge({});
  CHECK(v.triggered);
  CHECK(v.time == 2.0);
  CHECK(v.cause == BlowupCause::linf_threshold);
  CHECK(cause_label(BlowupCause::dt_collapse) == "dt_collapse");
}

TEST_CASE("adaptive run conserves mass and keeps the split identity") {
  const Grid g(16, 16, 16);
  const double A = 50.0;
  const FlowSchedule s = FlowSchedule::alternating(A, ShearProfile::preset("cos_mix"), 0.0);
  PksRun run(s, {}, smooth_state(g, A, 3));
  run.start_split(Axis::x);
  CHECK(l2_norm(run.split()->c_dev) == 0.0);
  double worst = 0.0;
  const double end = s.next_boundary(0.0);
  while (run.state().t < end) {
    REQUIRE(run.advance(end));
    worst = std::max(worst, split_identity_error(run.state(), *run.split()));
  }
  CHECK(worst < 1e-9);
  CHECK(mass_drift(run.state()) < 1e-8);
  CHECK(std::abs(chemical_mean(run.state())) < 1e-10);
  CHECK(run.accepted() > 10);
}

TEST_CASE("unforced split keeps a zero deviation") {
  const Grid g(8, 8, 8);
  const double A = 20.0;
  const FlowSchedule s = FlowSchedule::stationary(A, ShearProfile::cosine());
  PKSState st = make_pks_state(constant(g, 1.0), RealField::sample(g, [](double x, double y, double) {
                                 return std::sin(x) * std::cos(y);
                               }),
                               A);
  ChemicalSplit sp = make_split(st, Axis::x);
  SpectralField passive = sp.carried;
  for (int i = 0; i < 10; ++i) {
    StepRecord rec;
    st = attempt_pks_step(st, s, 0.1, {}, rec);
    // a homogeneous density has no remainder to force the deviation
    rec.n_eff = transform(constant(g, 1.0));
    co_evolve_split(sp, rec, A);
    SpectralField zero(g);
    apply_linear_propagator(rec, A, zero, passive);
  }
  CHECK(l2_norm(sp.c_dev) == 0.0);
  CHECK(l2_norm(sp.d - passive) == 0.0);
  PksParams p;
  CHECK_THROWS_AS(co_evolve_split(st, make_split(st, Axis::z), s, 0.1, p), std::logic_error);
}

TEST_CASE("x-average system") {
  const Grid g(8, 8, 8);
  const PKSState flat = make_pks_state(RealField::sample(g, [](double, double y, double z) {
                                         return 2.0 + std::sin(y + z);
                                       }),
                                       RealField(g), 1.0);
  CHECK(max_abs_diff(x_average_system(flat).n_avg, flat.n) < 1e-14);
  const PKSState wavy = make_pks_state(RealField::sample(g, [](double x, double y, double) {
                                         return 2.0 + std::sin(x) * std::cos(y);
                                       }),
                                       RealField(g), 1.0);
  CHECK(max_abs_diff(x_average_system(wavy).n_avg, constant(g, 2.0)) < 1e-14);
}

TEST_CASE("average equation residual on a short run") {
  const Grid g(16, 16, 16);
  const double A = 5.0, dt = 1e-3;
  const FlowSchedule s = FlowSchedule::stationary(A, ShearProfile::cosine());
  PksParams p;
  p.adaptive = false;
  const PKSState a = smooth_state(g, A, 11);
  const PKSState b = step_pks(a, s, dt, p);
  const PKSState c = step_pks(b, s, dt, p);
  CHECK(average_equation_residual(a, b, c, Axis::x) < 1e-4);
}

TEST_CASE("restored run continues bit-identically") {
  const Grid g(8, 16, 8);
  const double A = 30.0;
  const FlowSchedule s = FlowSchedule::alternating(A, ShearProfile::cosine(), 0.0);
  PksRun run(s, {}, smooth_state(g, A, 5));
  run.start_split(Axis::x);
  for (int i = 0; i < 5; ++i) REQUIRE(run.advance(2.0));
  const auto dir = scratch_dir("pks_restore");
  const std::string side = run.save((dir / "snap").string(), {{"tag", 7}});
  nlohmann::json extra;
  PksRun back = PksRun::restore(s, {}, side, &extra);
  CHECK(extra.at("tag") == 7);
  for (int i = 0; i < 8; ++i) {
    REQUIRE(run.advance(3.0));
    REQUIRE(back.advance(3.0));
  }
  CHECK(run.state().t == back.state().t);
  CHECK(max_abs_diff(run.state().n, back.state().n) == 0.0);
  CHECK(max_abs_diff(run.state().c, back.state().c) == 0.0);
  CHECK(l2_norm(run.split()->c_dev - back.split()->c_dev) == 0.0);
  CHECK(run.next_dt() == back.next_dt());
  std::filesystem::remove_all(dir);
}

TEST_CASE("remainder removes exactly the axis average") {
  const Grid g(8, 8, 8);
  const SpectralField F = transform(RealField::sample(g, [](double x, double y, double z) {
    return 1.0 + std::cos(y) + std::sin(x + z) + std::cos(2 * z);
  }));
  const RealField r = inverse(remainder(F, Axis::x));
  const RealField e = RealField::sample(g, [](double x, double, double z) { return std::sin(x + z); });
  CHECK(max_abs_diff(r, e) < 1e-14);
}
