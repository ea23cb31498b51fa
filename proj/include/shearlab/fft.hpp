#pragma once

#include <span>
#include <utility>

#include "shearlab/field.hpp"

namespace shearlab {

/// Forward transform of a real field (unnormalized). Throws
/// std::invalid_argument on non-finite samples.
SpectralField transform(const RealField& f);

/// Inverse transform (divides by the point count) keeping the real part.
RealField inverse(const SpectralField& F);

/// Complex inverse transform, used where the field is not Hermitian.
std::vector<Complex> inverse_complex(const SpectralField& F);

/// Forward transforms of two real fields with one complex FFT of a + i b.
std::pair<SpectralField, SpectralField> transform_pair(const RealField& a, const RealField& b);

/// Inverse transforms of two Hermitian spectra with one complex FFT of
/// F + i G. Equals (inverse(F), inverse(G)) up to rounding.
std::pair<RealField, RealField> inverse_pair(const SpectralField& F, const SpectralField& G);

namespace fft {

enum class Direction { forward, backward };

/// In-place full 3-D transform of a buffer laid out on `g`. Backward
/// transforms are unnormalized here; callers divide by the point count.
void transform_inplace(const Grid& g, std::span<Complex> data, Direction dir);

/// In-place transform of every line along one axis (unnormalized).
void transform_axis_inplace(const Grid& g, Axis a, std::span<Complex> data, Direction dir);

/// In-place 1-D transform of a contiguous line of length n (unnormalized).
void transform_line(int n, std::span<Complex> line, Direction dir);

/// Pre-fetched 1-D plans for repeated line transforms; safe to share across
/// threads as long as each thread uses its own buffer.
class LineTransform {
 public:
  explicit LineTransform(int n);
  int size() const { return n_; }
  void forward(std::span<Complex> line) const;
  void backward(std::span<Complex> line) const;

 private:
  int n_;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

}  // namespace fft

}  // namespace shearlab
