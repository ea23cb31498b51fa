#pragma once

#include <optional>
#include <vector>

#include "shearlab/field.hpp"
#include "shearlab/flow_schedule.hpp"

namespace shearlab {

/// Accumulated shear integrals B^{(m)}(t, s) = int_{t_r}^t d_s^m u(tau, s) dtau
/// on the shear-axis grid, plus the time weight Phi(t).
///
/// The context is tied to one phase of a schedule: it starts at t_r inside
/// that phase and cannot be advanced past the phase end. For phases other
/// than the first, the clock of Phi starts at the phase start.
class GammaContext {
 public:
  static constexpr int kDefaultMaxOrder = 8;
  static constexpr double kDefaultStepCap = 1.0;

  GammaContext(const FlowSchedule& schedule, double t_r, int n_shear, int max_order = kDefaultMaxOrder,
               double step_cap = kDefaultStepCap);

  double t_r() const { return t_r_; }
  double t() const { return t_; }
  double amplitude() const { return amplitude_; }
  double clock_origin() const { return origin_; }
  int n_shear() const { return n_shear_; }
  int max_order() const { return max_order_; }
  ShearDirection direction() const { return direction_; }
  /// Phi(t) = 1 / (1 + (t - clock origin)^3 / A).
  double phi_weight() const;

  /// B^{(m)} for 1 <= m <= max_order. All zeros for the quiescent schedule.
  const std::vector<double>& B(int m) const;

  /// Moves the context to t_next by composite quadrature of the flow.
  /// Throws std::invalid_argument if t_next < t or t_next - t exceeds the
  /// step cap, and if the step leaves the context's phase.
  void advance(const FlowSchedule& schedule, double t_next);

 private:
  void rebuild();

  double amplitude_;
  double t_r_, t_;
  double origin_ = 0.0;
  double phase_end_ = FlowSchedule::kInfinity;
  int n_shear_;
  int max_order_;
  double step_cap_;
  ShearDirection direction_ = ShearDirection::x_in_y;
  std::optional<ShearProfile> profile_;
  std::vector<Complex> moments_;
  std::vector<std::vector<double>> B_;
};

/// Value-returning form of GammaContext::advance.
GammaContext accumulate_B(GammaContext ctx, const FlowSchedule& schedule, double t_next);

/// d_f^i Gamma^j d_o^k F with Gamma = d_s + B^{(1)} d_f, where f, s, o are the
/// flow, shear and spectator axes of the context. The multiplication by
/// B^{(1)} is done in physical space along s; the product is dealiased when
/// `dealias_products` is set. Throws std::invalid_argument on a grid whose
/// shear axis does not match the context.
SpectralField apply_gamma(const GammaContext& ctx, const SpectralField& F, int i, int j, int k,
                          bool dealias_products = true);

/// Multiplies F by a function of the coordinate along `axis` (given on that
/// axis' grid points), working in the mixed representation.
SpectralField multiply_along(const SpectralField& F, Axis axis, const std::vector<double>& w);

}  // namespace shearlab
