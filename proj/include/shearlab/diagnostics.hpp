#pragma once

#include "shearlab/field.hpp"
#include "shearlab/gamma_context.hpp"
#include "shearlab/mode_solver.hpp"
#include "shearlab/pks.hpp"

namespace shearlab {

/// f = average + remainder along one axis, split in coefficients.
struct Decomposition {
  Axis axis = Axis::x;
  SpectralField average;
  SpectralField remainder;
};

Decomposition decompose(const SpectralField& F, Axis axis);
/// Average over two axes (keeps the modes with zero wavenumber on both).
SpectralField double_average(const SpectralField& F, Axis a, Axis b);

/// Squared L2 norms on the Fourier regions, with (alpha, beta, gamma) the
/// wavenumbers along (x, y, z):
///   R1 = {alpha != 0, beta = 0, gamma = 0}, R2 = {beta = 0, gamma != 0},
///   R3 = {beta != 0}; `zero` is the mean mode.
struct FourierRegionEnergy {
  double zero = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double R3 = 0.0;
  double total() const { return zero + R1 + R2 + R3; }
};

FourierRegionEnergy region_energies(const SpectralField& F);

/// sum_{i+j+k<=M} G^{2i} Phi^{2j} ||d_f^i Gamma^j d_o^k f||^2 with the flow,
/// shear and spectator axes of the context.
double z_norm(const SpectralField& F, const GammaContext& ctx, int M, double G = 1.0);

/// Same weighted sum for a single mode e^{i(alpha x_f + gamma x_o)} g(s), where
/// d_f = i alpha, d_o = i gamma and Gamma = d_s + i alpha B^{(1)}. Uses the mode
/// norm of mode_norm().
double z_norm_mode(const ModeState& m, const GammaContext& ctx, int M, double G = 1.0);

/// Unweighted gliding sums over i+j+k <= M: sum of ||d_f^i Gamma^j d_o^k F||
/// and the square root of the sum of squares.
double gliding_sum(const SpectralField& F, const GammaContext& ctx, int M);
double gliding_norm(const SpectralField& F, const GammaContext& ctx, int M);

/// Terms of the gradient bound
///   sum_{<=M} ||Gamma^{ijk} grad f|| <= sum_{<=M+1} ||Gamma^{ijk} f|| + C t sum_{<=M} ||Gamma^{(i+1)jk} f||.
struct GradientBoundTerms {
  double lhs = 0.0;
  double main = 0.0;
  double commutator = 0.0;  ///< without the factor C t
  /// Smallest C for which the bound holds at time t (0 if it holds with C = 0).
  double required_constant(double t) const;
};
GradientBoundTerms gradient_bound_terms(const SpectralField& F, const GammaContext& ctx, int M);

/// ||fg||_M / (||f||_M ||g||_M) in the gliding norm; products are formed in
/// physical space without truncation.
double product_ratio(const SpectralField& f, const SpectralField& g, const GammaContext& ctx, int M);
/// ||f||_inf / sum_{<=2} ||Gamma^{ijk} f||.
double linf_embedding_ratio(const SpectralField& f, const GammaContext& ctx);

struct FunctionalValue {
  double n_block = 0.0;
  double c_block = 0.0;
  double carried_block = 0.0;
  double value = 0.0;  ///< sum of the three blocks
  double G = 1.0, Q = 1.0, delta = 0.0, t_r = 0.0;
  int M = 0;
};

/// Coupled functional of the remainders n_rem and c_dev = c_rem - d at the
/// current time: the n block (orders <= M, weight Phi^{2j} G^{4+2i}), the c
/// block (orders <= M+1, weight Phi^{2j+2} G^{2i} times A^{2/3} for j <= M and 1
/// for j = M+1) and Q^2 times the plain Sobolev sum of c_rem(t_r) (orders <=
/// M+1) damped by exp(-delta tau / (2 A^{1/3})). `delta` is the measured
/// linear decay rate of the active flow.
FunctionalValue functional_F(const PKSState& s, const ChemicalSplit& split, const GammaContext& ctx, int M,
                             double G, double Q, double delta);

/// Presets: growth-phase functional (t_r = 0, order M+1, Q = 1) and
/// decay-phase functional (t_r = T_h, order M, Q = A^{1/4}).
FunctionalValue functional_H(const PKSState& s, const ChemicalSplit& split, const GammaContext& ctx, int M,
                             double G, double delta);
FunctionalValue functional_L(const PKSState& s, const ChemicalSplit& split, const GammaContext& ctx, int M,
                             double G, double delta);

}  // namespace shearlab
