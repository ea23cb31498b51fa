#include "shearlab/field.hpp"

#include <cmath>
#include <stdexcept>

namespace shearlab {

RealField::RealField(const Grid& g, std::vector<double> values) : grid_(g), values_(std::move(values)) {
  if (values_.size() != g.size()) throw std::invalid_argument("RealField: value count does not match grid");
}

RealField RealField::sample(const Grid& g, const std::function<double(double, double, double)>& f) {
  RealField out(g);
  const auto& d = g.dims();
  std::size_t idx = 0;
  for (int i = 0; i < d[0]; ++i) {
    const double x = g.coordinate(Axis::x, i);
    for (int j = 0; j < d[1]; ++j) {
      const double y = g.coordinate(Axis::y, j);
      for (int l = 0; l < d[2]; ++l) out.values_[idx++] = f(x, y, g.coordinate(Axis::z, l));
    }
  }
  return out;
}

bool RealField::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

SpectralField::SpectralField(const Grid& g, std::vector<Complex> coeffs) : grid_(g), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != g.size()) throw std::invalid_argument("SpectralField: coefficient count does not match grid");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (o.grid() != grid_) throw std::invalid_argument("SpectralField: grid mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (o.grid() != grid_) throw std::invalid_argument("SpectralField: grid mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

}  // namespace shearlab
