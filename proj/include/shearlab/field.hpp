#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "shearlab/grid.hpp"

namespace shearlab {

using Complex = std::complex<double>;

/// Real samples of a scalar on the collocation grid.
class RealField {
 public:
  RealField() = default;
  explicit RealField(const Grid& g) : grid_(g), values_(g.size(), 0.0) {}
  RealField(const Grid& g, std::vector<double> values);

  /// Samples f(x, y, z) at every grid point.
  static RealField sample(const Grid& g, const std::function<double(double, double, double)>& f);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Fourier coefficients on the same grid, stored in FFT index order.
/// Forward transforms are unnormalized: the k = 0 coefficient is the sum of
/// the samples, i.e. mean * point count.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const Grid& g) : grid_(g), coeffs_(g.size(), Complex{}) {}
  SpectralField(const Grid& g, std::vector<Complex> coeffs);

  const Grid& grid() const { return grid_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }
  Complex operator[](std::size_t i) const { return coeffs_[i]; }
  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  Complex at(int ix, int iy, int iz) const { return coeffs_[grid_.index(ix, iy, iz)]; }
  std::size_t size() const { return coeffs_.size(); }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);

  /// Visits every coefficient with its signed wavenumber triple.
  template <class Fn>
  void for_each_mode(Fn&& fn) {
    const auto& d = grid_.dims();
    std::size_t idx = 0;
    for (int i = 0; i < d[0]; ++i) {
      const int kx = grid_.wavenumber(Axis::x, i);
      for (int j = 0; j < d[1]; ++j) {
        const int ky = grid_.wavenumber(Axis::y, j);
        for (int l = 0; l < d[2]; ++l, ++idx) {
          fn(coeffs_[idx], kx, ky, grid_.wavenumber(Axis::z, l));
        }
      }
    }
  }
  template <class Fn>
  void for_each_mode(Fn&& fn) const {
    const_cast<SpectralField*>(this)->for_each_mode(
        [&](Complex& c, int kx, int ky, int kz) { fn(static_cast<const Complex&>(c), kx, ky, kz); });
  }

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

}  // namespace shearlab
