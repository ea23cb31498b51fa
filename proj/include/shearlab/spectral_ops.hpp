#pragma once

#include "shearlab/field.hpp"

namespace shearlab {

inline constexpr int kDefaultMaxDerivativeOrder = 6;

/// Multiplies every coefficient by (i k_axis)^order. Odd derivatives zero the
/// Nyquist coefficient so real fields stay real.
SpectralField derivative(const SpectralField& F, Axis axis, int order,
                         int max_order = kDefaultMaxDerivativeOrder);

/// 2/3-rule truncation: zero every mode with |k_a| > floor(N_a / 3) on any axis.
SpectralField dealias(const SpectralField& F);
void dealias_inplace(SpectralField& F);
bool dealias_keeps(const Grid& g, int kx, int ky, int kz);

double l2_norm(const RealField& f);
double l2_norm(const SpectralField& F);
/// Squared L2 norm from the coefficients, ||f||^2 = |T^3| / N^2 * sum |F_k|^2.
double l2_norm_sq(const SpectralField& F);
double linf_norm(const RealField& f);
double lp_norm(const RealField& f, double p);
double mean(const RealField& f);
double mean(const SpectralField& F);

/// Coefficient-space inner product sum conj(a_k) b_k.
Complex coefficient_dot(const SpectralField& a, const SpectralField& b);

}  // namespace shearlab
