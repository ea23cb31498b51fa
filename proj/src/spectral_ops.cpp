#include "shearlab/spectral_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace shearlab {

SpectralField derivative(const SpectralField& F, Axis axis, int order, int max_order) {
  if (order < 0 || order > max_order) {
    throw std::invalid_argument("derivative order " + std::to_string(order) + " outside [0, " +
                                std::to_string(max_order) + "]");
  }
  SpectralField out = F;
  if (order == 0) return out;
  const Grid& g = F.grid();
  const int n = g.n(axis);
  // Multiplier per index along the axis.
  std::vector<Complex> mult(n);
  for (int i = 0; i < n; ++i) {
    const int k = g.wavenumber(axis, i);
    if (g.is_nyquist(axis, i) && order % 2 == 1) {
      mult[i] = 0.0;
      continue;
    }
    Complex m = 1.0;
    for (int o = 0; o < order; ++o) m *= Complex(0.0, static_cast<double>(k));
    mult[i] = m;
  }
  const auto& d = g.dims();
  std::size_t idx = 0;
  auto c = out.coeffs();
  for (int i = 0; i < d[0]; ++i) {
    for (int j = 0; j < d[1]; ++j) {
      for (int l = 0; l < d[2]; ++l, ++idx) {
        const int ia = axis == Axis::x ? i : (axis == Axis::y ? j : l);
        c[idx] *= mult[ia];
      }
    }
  }
  return out;
}

bool dealias_keeps(const Grid& g, int kx, int ky, int kz) {
  return std::abs(kx) <= g.n(Axis::x) / 3 && std::abs(ky) <= g.n(Axis::y) / 3 &&
         std::abs(kz) <= g.n(Axis::z) / 3;
}

void dealias_inplace(SpectralField& F) {
  const Grid g = F.grid();
  F.for_each_mode([&](Complex& c, int kx, int ky, int kz) {
    if (!dealias_keeps(g, kx, ky, kz)) c = 0.0;
  });
}

SpectralField dealias(const SpectralField& F) {
  SpectralField out = F;
  dealias_inplace(out);
  return out;
}

double l2_norm(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.grid().cell_volume());
}

double l2_norm_sq(const SpectralField& F) {
  double s = 0.0;
  for (const auto& c : F.coeffs()) s += std::norm(c);
  const double n = static_cast<double>(F.size());
  return s * Grid::volume() / (n * n);
}

double l2_norm(const SpectralField& F) { return std::sqrt(l2_norm_sq(F)); }

double linf_norm(const RealField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double lp_norm(const RealField& f, double p) {
  if (std::isinf(p)) return linf_norm(f);
  if (p < 1.0) throw std::invalid_argument("lp_norm requires p >= 1");
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double mean(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s / static_cast<double>(f.size());
}

double mean(const SpectralField& F) { return F[0].real() / static_cast<double>(F.size()); }

Complex coefficient_dot(const SpectralField& a, const SpectralField& b) {
  if (a.grid() != b.grid()) throw std::invalid_argument("coefficient_dot: grid mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace shearlab
