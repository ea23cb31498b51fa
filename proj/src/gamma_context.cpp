#include "shearlab/gamma_context.hpp"

#include <cmath>
#include <stdexcept>

#include "shearlab/fft.hpp"
#include "shearlab/spectral_ops.hpp"

namespace shearlab {

GammaContext::GammaContext(const FlowSchedule& schedule, double t_r, int n_shear, int max_order,
                           double step_cap)
    : amplitude_(schedule.amplitude()),
      t_r_(t_r),
      t_(t_r),
      n_shear_(n_shear),
      max_order_(max_order),
      step_cap_(step_cap) {
  if (max_order_ < 1) throw std::invalid_argument("GammaContext: max order must be at least 1");
  if (n_shear_ < 1) throw std::invalid_argument("GammaContext: empty shear grid");
  if (!schedule.is_quiescent()) {
    const auto loc = schedule.locate(t_r);
    const auto& ph = schedule.phases()[loc.index];
    origin_ = loc.start;
    phase_end_ = loc.end;
    direction_ = ph.direction;
    profile_ = ph.profile;
    moments_.assign(static_cast<std::size_t>(ph.profile.max_mode()), Complex(0.0, 0.0));
  }
  rebuild();
}

double GammaContext::phi_weight() const {
  const double s = t_ - origin_;
  return 1.0 / (1.0 + s * s * s / amplitude_);
}

const std::vector<double>& GammaContext::B(int m) const {
  if (m < 1 || m > max_order_) throw std::out_of_range("GammaContext::B: order out of range");
  return B_[static_cast<std::size_t>(m - 1)];
}

void GammaContext::advance(const FlowSchedule& schedule, double t_next) {
  if (t_next < t_) throw std::invalid_argument("GammaContext::advance: time must not decrease");
  if (t_next - t_ > step_cap_)
    throw std::invalid_argument("GammaContext::advance: quadrature step exceeds the configured cap");
  if (profile_) {
    if (t_next > phase_end_ * (1.0 + 1e-12))
      throw std::invalid_argument("GammaContext::advance: step leaves the context's phase");
    const auto inc = schedule.shift_moments(t_, t_next);
    for (std::size_t k = 0; k < moments_.size(); ++k) moments_[k] += inc[k];
  }
  t_ = t_next;
  rebuild();
}

void GammaContext::rebuild() {
  B_.assign(static_cast<std::size_t>(max_order_), std::vector<double>(static_cast<std::size_t>(n_shear_), 0.0));
  if (!profile_) return;
  for (int m = 1; m <= max_order_; ++m)
    B_[static_cast<std::size_t>(m - 1)] = synthesize_from_moments(*profile_, moments_, t_ - t_r_, m, n_shear_);
}

GammaContext accumulate_B(GammaContext ctx, const FlowSchedule& schedule, double t_next) {
  ctx.advance(schedule, t_next);
  return ctx;
}

SpectralField multiply_along(const SpectralField& F, Axis axis, const std::vector<double>& w) {
  const Grid& g = F.grid();
  if (static_cast<int>(w.size()) != g.n(axis))
    throw std::invalid_argument("multiply_along: weight length does not match the grid");
  SpectralField out = F;
  if (!g.active(axis)) {
    out *= w[0];
    return out;
  }
  auto data = out.coeffs();
  fft::transform_axis_inplace(g, axis, data, fft::Direction::backward);
  const int n = g.n(axis);
  const double inv = 1.0 / n;
  const auto& d = g.dims();
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j)
      for (int l = 0; l < d[2]; ++l) {
        const int pos = axis == Axis::x ? i : (axis == Axis::y ? j : l);
        data[g.index(i, j, l)] *= w[static_cast<std::size_t>(pos)] * inv;
      }
  fft::transform_axis_inplace(g, axis, data, fft::Direction::forward);
  return out;
}

SpectralField apply_gamma(const GammaContext& ctx, const SpectralField& F, int i, int j, int k,
                          bool dealias_products) {
  if (i < 0 || j < 0 || k < 0) throw std::invalid_argument("apply_gamma: negative multi-index");
  const Axis f = flow_axis(ctx.direction());
  const Axis s = shear_axis(ctx.direction());
  const Axis o = spectator_axis(ctx.direction());
  const Grid& g = F.grid();
  if (g.n(s) != ctx.n_shear()) throw std::invalid_argument("apply_gamma: grid does not match the context");
  const int cap = i + j + k;
  SpectralField G = F;
  if (i > 0) G = derivative(G, f, i, cap);
  if (k > 0) G = derivative(G, o, k, cap);
  const auto& B1 = ctx.B(1);
  for (int r = 0; r < j; ++r) {
    SpectralField next = derivative(G, s, 1, cap);
    if (g.active(f)) {
      SpectralField prod = multiply_along(derivative(G, f, 1, cap), s, B1);
      if (dealias_products) dealias_inplace(prod);
      next += prod;
    }
    G = std::move(next);
  }
  return G;
}

}  // namespace shearlab
