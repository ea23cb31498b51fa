#include "shearlab/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "shearlab/fft.hpp"
#include "shearlab/spectral_ops.hpp"

namespace shearlab {

Decomposition decompose(const SpectralField& F, Axis axis) {
  Decomposition d;
  d.axis = axis;
  d.remainder = remainder(F, axis);
  d.average = F - d.remainder;
  return d;
}

SpectralField double_average(const SpectralField& F, Axis a, Axis b) {
  if (a == b) throw std::invalid_argument("double_average: axes must differ");
  SpectralField out = F;
  out.for_each_mode([&](Complex& c, int kx, int ky, int kz) {
    const int k[3] = {kx, ky, kz};
    if (k[index_of(a)] != 0 || k[index_of(b)] != 0) c = 0.0;
  });
  return out;
}

FourierRegionEnergy region_energies(const SpectralField& F) {
  FourierRegionEnergy e;
  const double n = static_cast<double>(F.size());
  const double w = Grid::volume() / (n * n);
  F.for_each_mode([&](const Complex& c, int kx, int ky, int kz) {
    const double v = std::norm(c) * w;
    if (ky != 0) {
      e.R3 += v;
    } else if (kz != 0) {
      e.R2 += v;
    } else if (kx != 0) {
      e.R1 += v;
    } else {
      e.zero += v;
    }
  });
  return e;
}

double z_norm(const SpectralField& F, const GammaContext& ctx, int M, double G) {
  if (M < 0) throw std::invalid_argument("z_norm: negative order");
  const double phi = ctx.phi_weight();
  const Axis f = flow_axis(ctx.direction()), o = spectator_axis(ctx.direction());
  double sum = 0.0;
  // d_f and d_o commute with Gamma, so each (i, k) base is differentiated once
  // and Gamma is applied incrementally.
  for (int i = 0; i <= M; ++i) {
    for (int k = 0; i + k <= M; ++k) {
      SpectralField base = F;
      if (i > 0) base = derivative(base, f, i, M);
      if (k > 0) base = derivative(base, o, k, M);
      for (int j = 0; i + j + k <= M; ++j) {
        if (j > 0) base = apply_gamma(ctx, base, 0, 1, 0);
        sum += std::pow(G, 2 * i) * std::pow(phi, 2 * j) * l2_norm_sq(base);
      }
    }
  }
  return sum;
}

double z_norm_mode(const ModeState& m, const GammaContext& ctx, int M, double G) {
  const int n = static_cast<int>(m.profile.size());
  if (n != ctx.n_shear()) throw std::invalid_argument("z_norm_mode: profile does not match the context");
  const double phi = ctx.phi_weight();
  const auto& B1 = ctx.B(1);
  fft::LineTransform line(n);
  auto gamma = [&](std::vector<Complex> g) {
    std::vector<Complex> d = g;
    line.forward(d);
    for (int j = 0; j < n; ++j) {
      const int b = j <= n / 2 ? j : j - n;
      d[static_cast<std::size_t>(j)] *= (2 * j == n) ? Complex(0.0, 0.0) : Complex(0.0, b);
    }
    line.backward(d);
    for (int j = 0; j < n; ++j) {
      const auto q = static_cast<std::size_t>(j);
      d[q] = d[q] / static_cast<double>(n) + Complex(0.0, m.alpha) * B1[q] * g[q];
    }
    return d;
  };
  double sum = 0.0;
  std::vector<Complex> g = m.profile;
  for (int j = 0; j <= M; ++j) {
    if (j > 0) g = gamma(std::move(g));
    const double nj = mode_norm(g);
    for (int i = 0; i + j <= M; ++i)
      for (int k = 0; i + j + k <= M; ++k)
        sum += std::pow(G, 2 * i) * std::pow(phi, 2 * j) * std::pow(double(m.alpha) * m.alpha, i) *
               std::pow(double(m.gamma) * m.gamma, k) * nj * nj;
  }
  return sum;
}

namespace {

template <class Fn>
void for_each_gliding(const SpectralField& F, const GammaContext& ctx, int M, Fn&& fn) {
  const Axis f = flow_axis(ctx.direction()), o = spectator_axis(ctx.direction());
  for (int i = 0; i <= M; ++i)
    for (int k = 0; i + k <= M; ++k) {
      SpectralField base = F;
      if (i > 0) base = derivative(base, f, i, M);
      if (k > 0) base = derivative(base, o, k, M);
      for (int j = 0; i + j + k <= M; ++j) {
        if (j > 0) base = apply_gamma(ctx, base, 0, 1, 0, false);
        fn(i, j, k, base);
      }
    }
}

}  // namespace

double gliding_sum(const SpectralField& F, const GammaContext& ctx, int M) {
  double s = 0.0;
  for_each_gliding(F, ctx, M, [&](int, int, int, const SpectralField& d) { s += l2_norm(d); });
  return s;
}

double gliding_norm(const SpectralField& F, const GammaContext& ctx, int M) {
  double s = 0.0;
  for_each_gliding(F, ctx, M, [&](int, int, int, const SpectralField& d) { s += l2_norm_sq(d); });
  return std::sqrt(s);
}

double GradientBoundTerms::required_constant(double t) const {
  if (lhs <= main) return 0.0;
  if (t <= 0.0 || commutator <= 0.0) return std::numeric_limits<double>::infinity();
  return (lhs - main) / (t * commutator);
}

GradientBoundTerms gradient_bound_terms(const SpectralField& F, const GammaContext& ctx, int M) {
  GradientBoundTerms b;
  const Axis f = flow_axis(ctx.direction());
  SpectralField grads[3] = {derivative(F, Axis::x, 1), derivative(F, Axis::y, 1), derivative(F, Axis::z, 1)};
  for (int i = 0; i <= M; ++i)
    for (int j = 0; i + j <= M; ++j)
      for (int k = 0; i + j + k <= M; ++k) {
        double sq = 0.0;
        for (const auto& gr : grads) sq += l2_norm_sq(apply_gamma(ctx, gr, i, j, k, false));
        b.lhs += std::sqrt(sq);
      }
  b.main = gliding_sum(F, ctx, M + 1);
  b.commutator = gliding_sum(derivative(F, f, 1), ctx, M);
  return b;
}

double product_ratio(const SpectralField& f, const SpectralField& g, const GammaContext& ctx, int M) {
  const RealField a = inverse(f), b = inverse(g);
  RealField ab(a.grid());
  for (std::size_t q = 0; q < ab.size(); ++q) ab[q] = a[q] * b[q];
  return gliding_norm(transform(ab), ctx, M) / (gliding_norm(f, ctx, M) * gliding_norm(g, ctx, M));
}

double linf_embedding_ratio(const SpectralField& f, const GammaContext& ctx) {
  return linf_norm(inverse(f)) / gliding_sum(f, ctx, 2);
}

namespace {

double plain_sobolev(const SpectralField& F, Axis f, Axis s, Axis o, int M) {
  double sum = 0.0;
  for (int i = 0; i <= M; ++i)
    for (int j = 0; i + j <= M; ++j)
      for (int k = 0; i + j + k <= M; ++k) {
        SpectralField d = F;
        if (i > 0) d = derivative(d, f, i, M);
        if (j > 0) d = derivative(d, s, j, M);
        if (k > 0) d = derivative(d, o, k, M);
        sum += l2_norm_sq(d);
      }
  return sum;
}

}  // namespace

FunctionalValue functional_F(const PKSState& s, const ChemicalSplit& split, const GammaContext& ctx, int M,
                             double G, double Q, double delta) {
  if (std::abs(split.t_r - ctx.t_r()) > 1e-12 * std::max(1.0, std::abs(ctx.t_r())))
    throw std::invalid_argument("functional_F: split and context reference times differ");
  const double phi = ctx.phi_weight();
  const double A = s.A;
  const Axis fa = flow_axis(ctx.direction()), sa = shear_axis(ctx.direction()), oa = spectator_axis(ctx.direction());
  FunctionalValue v;
  v.G = G;
  v.Q = Q;
  v.M = M;
  v.delta = delta;
  v.t_r = split.t_r;

  const SpectralField n_rem = remainder(transform(s.n), split.flow);
  for (int i = 0; i <= M; ++i)
    for (int k = 0; i + k <= M; ++k) {
      SpectralField base = n_rem;
      if (i > 0) base = derivative(base, fa, i, M + 1);
      if (k > 0) base = derivative(base, oa, k, M + 1);
      for (int j = 0; i + j + k <= M; ++j) {
        if (j > 0) base = apply_gamma(ctx, base, 0, 1, 0);
        v.n_block += std::pow(phi, 2 * j) * std::pow(G, 4 + 2 * i) * l2_norm_sq(base);
      }
    }

  const double a23 = std::pow(A, 2.0 / 3.0);
  for (int i = 0; i <= M + 1; ++i)
    for (int k = 0; i + k <= M + 1; ++k) {
      SpectralField base = split.c_dev;
      if (i > 0) base = derivative(base, fa, i, M + 1);
      if (k > 0) base = derivative(base, oa, k, M + 1);
      for (int j = 0; i + j + k <= M + 1; ++j) {
        if (j > 0) base = apply_gamma(ctx, base, 0, 1, 0);
        const double w = j < M + 1 ? a23 : 1.0;
        v.c_block += std::pow(phi, 2 * j + 2) * std::pow(G, 2 * i) * w * l2_norm_sq(base);
      }
    }

  const double tau = s.t - split.t_r;
  v.carried_block =
      Q * Q * plain_sobolev(split.carried, fa, sa, oa, M + 1) * std::exp(-delta * tau / (2.0 * std::cbrt(A)));
  v.value = v.n_block + v.c_block + v.carried_block;
  return v;
}

FunctionalValue functional_H(const PKSState& s, const ChemicalSplit& split, const GammaContext& ctx, int M,
                             double G, double delta) {
  return functional_F(s, split, ctx, M + 1, G, 1.0, delta);
}

FunctionalValue functional_L(const PKSState& s, const ChemicalSplit& split, const GammaContext& ctx, int M,
                             double G, double delta) {
  return functional_F(s, split, ctx, M, G, std::pow(s.A, 0.25), delta);
}

}  // namespace shearlab
