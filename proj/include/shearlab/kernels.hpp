#pragma once

#include <span>

#include "shearlab/field.hpp"

// Data-parallel inner loops of the solvers. Each kernel has an OpenMP
// production variant and a straightforward serial reference kept for tests
// and the benchmark. The production variants are deterministic for any
// thread count: work is split by independent lines or points, never by
// partial reductions.
namespace shearlab::kernels {

/// Fills table[i_flow * n_shear + j] = exp(-i k_flow(i_flow) * integral[j]).
/// The Nyquist index along the flow axis gets 0 so real fields stay real.
std::vector<Complex> shear_phase_table(const Grid& g, Axis flow, std::span<const double> integral);

/// Exact shear transport over one step. `data` holds full Fourier
/// coefficients; along the shear axis each line is taken to physical space,
/// multiplied by exp(-i k_flow I(s)) and transformed back.
void shear_phase_sweep(const Grid& g, Axis flow, Axis shear, std::span<const double> integral,
                       std::span<Complex> data);
void shear_phase_sweep_serial(const Grid& g, Axis flow, Axis shear, std::span<const double> integral,
                              std::span<Complex> data);

/// Multiplies every coefficient by exp(-|k|^2 * h).
void heat_factor(const Grid& g, double h, std::span<Complex> data);
void heat_factor_serial(const Grid& g, double h, std::span<Complex> data);

/// Exact flow of d_t n = Lap n, d_t c = Lap c + (n - mean n) over time h
/// for every Fourier mode: n <- e n, c <- e (c + h n) with e = exp(-|k|^2 h),
/// leaving the k = 0 coefficient of c untouched.
void coupled_heat(const Grid& g, double h, std::span<Complex> n, std::span<Complex> c);
void coupled_heat_serial(const Grid& g, double h, std::span<Complex> n, std::span<Complex> c);

/// out_a[i] = n[i] * grad_a[i] for the three gradient components.
void flux_products(std::span<const double> n, std::span<const double> gx, std::span<const double> gy,
                   std::span<const double> gz, std::span<double> fx, std::span<double> fy,
                   std::span<double> fz);
void flux_products_serial(std::span<const double> n, std::span<const double> gx,
                          std::span<const double> gy, std::span<const double> gz, std::span<double> fx,
                          std::span<double> fy, std::span<double> fz);

int max_threads();
void set_threads(int n);

}  // namespace shearlab::kernels
