#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "shearlab/checkpoint.hpp"
#include "shearlab/fft.hpp"
#include "shearlab/kernels.hpp"
#include "shearlab/spectral_ops.hpp"

using namespace shearlab;
namespace fs = std::filesystem;

namespace {

RealField noise(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  RealField f(g);
  for (auto& v : f.values()) v = d(rng);
  return f;
}

double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("grid extents") {
  CHECK_NOTHROW(Grid(48, 48, 48));
  CHECK_NOTHROW(Grid(1, 64, 6));
  CHECK_THROWS_AS(Grid(10, 8, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid(2, 8, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid(9, 8, 8), std::invalid_argument);
  const Grid g(8, 4, 6);
  CHECK(g.wavenumber(Axis::x, 4) == 4);
  CHECK(g.wavenumber(Axis::x, 5) == -3);
  CHECK(g.is_nyquist(Axis::z, 3));
  CHECK(g.index(1, 2, 3) == (1 * 4 + 2) * 6 + 3);
}

TEST_CASE("round trip and Parseval") {
  for (const Grid& g : {Grid(16, 16, 16), Grid(12, 32, 8), Grid(1, 64, 1)}) {
    const RealField f = noise(g, 3);
    const SpectralField F = transform(f);
    CHECK(max_abs_diff(inverse(F), f) < 1e-12);
    double direct = 0.0;
    for (double v : f.values()) direct += v * v;
    direct *= g.cell_volume();
    CHECK(std::abs(l2_norm_sq(F) - direct) / direct < 1e-12);
  }
}

TEST_CASE("pair transforms agree with single transforms") {
  const Grid g(8, 12, 16);
  const RealField a = noise(g, 1), b = noise(g, 2);
  const auto [A, B] = transform_pair(a, b);
  const SpectralField A1 = transform(a), B1 = transform(b);
  double err = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) err = std::max({err, std::abs(A[i] - A1[i]), std::abs(B[i] - B1[i])});
  CHECK(err < 1e-10);
  const auto [ra, rb] = inverse_pair(A1, B1);
  CHECK(max_abs_diff(ra, a) < 1e-12);
  CHECK(max_abs_diff(rb, b) < 1e-12);
}

TEST_CASE("non-finite samples are rejected") {
  RealField f(Grid(4, 4, 4));
  f[5] = std::nan("");
  CHECK_THROWS_AS(transform(f), std::invalid_argument);
}

TEST_CASE("spectral derivatives of trigonometric fields") {
  const Grid g(16, 16, 16);
  const RealField f = RealField::sample(g, [](double x, double y, double z) { return std::sin(3 * x) * std::cos(2 * y) + std::cos(z); });
  const RealField dx = inverse(derivative(transform(f), Axis::x, 1));
  const RealField dzz = inverse(derivative(transform(f), Axis::z, 2));
  const RealField ex = RealField::sample(g, [](double x, double y, double) { return 3 * std::cos(3 * x) * std::cos(2 * y); });
  const RealField ez = RealField::sample(g, [](double, double, double z) { return -std::cos(z); });
  CHECK(max_abs_diff(dx, ex) < 1e-12);
  CHECK(max_abs_diff(dzz, ez) < 1e-12);
  CHECK_THROWS_AS(derivative(transform(f), Axis::x, 7), std::invalid_argument);
}

TEST_CASE("odd derivatives zero the Nyquist mode") {
  const Grid g(8, 1, 1);
  const RealField f = RealField::sample(g, [](double x, double, double) { return std::cos(4 * x); });
  const SpectralField d = derivative(transform(f), Axis::x, 1);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(d[i]) == 0.0);
}

TEST_CASE("two-thirds truncation keeps |k| <= floor(N/3)") {
  const Grid g(48, 48, 48);
  CHECK(dealias_keeps(g, 16, -16, 0));
  CHECK_FALSE(dealias_keeps(g, 17, 0, 0));
  SpectralField F(g);
  F.for_each_mode([](Complex& c, int, int, int) { c = 1.0; });
  dealias_inplace(F);
  long kept = 0;
  for (const auto& c : F.coeffs()) kept += c != Complex(0.0, 0.0);
  CHECK(kept == 33L * 33 * 33);
}

TEST_CASE("norms") {
  const Grid g(8, 8, 8);
  RealField one(g);
  for (auto& v : one.values()) v = 1.0;
  const double vol = Grid::volume();
  CHECK(lp_norm(one, 1.0) == doctest::Approx(vol).epsilon(1e-14));
  CHECK(l2_norm(one) == doctest::Approx(std::sqrt(vol)).epsilon(1e-14));
  CHECK(linf_norm(one) == 1.0);
  CHECK(mean(transform(one)) == doctest::Approx(1.0));
}

TEST_CASE("checkpoint round trip is bitwise") {
  const fs::path dir = fs::temp_directory_path() / "shearlab_ckpt_test";
  fs::create_directories(dir);
  const RealField f = noise(Grid(4, 6, 8), 9);
  checkpoint::write_field(dir / "f.bin", f);
  const RealField r = checkpoint::read_field(dir / "f.bin");
  CHECK(r.grid() == f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(r[i] == f[i]);

  std::ofstream(dir / "bad.bin", std::ios::binary) << "NOTAFIELD";
  CHECK_THROWS(checkpoint::read_field(dir / "bad.bin"));

  checkpoint::Bundle b;
  b.fields.emplace_back("n", f);
  b.meta = {{"t", 0.125}};
  const fs::path side = checkpoint::save_bundle(dir / "bundle", b);
  const checkpoint::Bundle back = checkpoint::load_bundle(side);
  CHECK(back.meta.at("t").get<double>() == 0.125);
  CHECK(back.field("n")[7] == f[7]);
  fs::remove_all(dir);
}

TEST_CASE("parallel kernels match the serial reference to round-off") {
  const Grid g(12, 16, 8);
  const SpectralField base = transform(noise(g, 4));
  const SpectralField base_c = transform(noise(g, 5));
  std::vector<double> integral(16);
  for (int j = 0; j < 16; ++j) integral[j] = std::sin(0.3 * j) * 2.5;

  // The parallel heat kernels factor exp(-|k|^2 h) by axis, so agreement is to round-off.
  auto equal = [](const SpectralField& a, const SpectralField& b) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff = std::max(diff, std::abs(a[i] - b[i]));
      scale = std::max(scale, std::abs(b[i]));
    }
    return diff <= 1e-14 * scale;
  };
  SpectralField a = base, b = base;
  kernels::shear_phase_sweep(g, Axis::x, Axis::y, integral, a.coeffs());
  kernels::shear_phase_sweep_serial(g, Axis::x, Axis::y, integral, b.coeffs());
  CHECK(equal(a, b));

  a = base;
  b = base;
  kernels::heat_factor(g, 0.01, a.coeffs());
  kernels::heat_factor_serial(g, 0.01, b.coeffs());
  CHECK(equal(a, b));

  a = base;
  b = base;
  SpectralField ca = base_c, cb = base_c;
  kernels::coupled_heat(g, 0.02, a.coeffs(), ca.coeffs());
  kernels::coupled_heat_serial(g, 0.02, b.coeffs(), cb.coeffs());
  CHECK(equal(a, b));
  CHECK(equal(ca, cb));
  CHECK(ca[0] == base_c[0]);

  const RealField n = noise(g, 6), gx = noise(g, 7), gy = noise(g, 8), gz = noise(g, 9);
  RealField f1(g), f2(g), f3(g), s1(g), s2(g), s3(g);
  kernels::flux_products(n.values(), gx.values(), gy.values(), gz.values(), f1.values(), f2.values(), f3.values());
  kernels::flux_products_serial(n.values(), gx.values(), gy.values(), gz.values(), s1.values(), s2.values(),
                                s3.values());
  CHECK(max_abs_diff(f1, s1) == 0.0);
  CHECK(max_abs_diff(f3, s3) == 0.0);
}

TEST_CASE("coupled heat is the exact Jordan-block flow") {
  // n = cos x, c = 0: n(h) = e^{-h} cos x, c(h) = h e^{-h} cos x.
  const Grid g(8, 1, 1);
  const double h = 0.3;
  SpectralField n = transform(RealField::sample(g, [](double x, double, double) { return std::cos(x); }));
  SpectralField c(g);
  kernels::coupled_heat(g, h, n.coeffs(), c.coeffs());
  const RealField cn = inverse(c);
  for (int i = 0; i < 8; ++i) {
    const double x = g.coordinate(Axis::x, i);
    CHECK(cn[g.index(i, 0, 0)] == doctest::Approx(h * std::exp(-h) * std::cos(x)).epsilon(1e-13));
  }
}
