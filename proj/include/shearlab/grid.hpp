#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <string>

namespace shearlab {

enum class Axis : int { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

constexpr int index_of(Axis a) { return static_cast<int>(a); }
char axis_label(Axis a);
Axis axis_from_label(char c);

/// Uniform periodic grid on the torus [0, 2pi)^3.
///
/// Axes with N = 1 are degenerate: fields are constant along them and every
/// axis operation is a no-op there. Active axes carry an even point count of
/// the form 2^a 3^b, at least 4. Storage is row-major with z fastest.
class Grid {
 public:
  static constexpr double kLength = 2.0 * std::numbers::pi;
  static constexpr std::size_t kDefaultPointCap = std::size_t{1} << 27;

  Grid() = default;
  Grid(int nx, int ny, int nz, std::size_t point_cap = kDefaultPointCap);

  static Grid line(Axis a, int n);

  int n(Axis a) const { return n_[index_of(a)]; }
  const std::array<int, 3>& dims() const { return n_; }
  bool active(Axis a) const { return n(a) > 1; }
  std::size_t size() const;

  std::size_t stride(Axis a) const;
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(ix) * n_[1] + iy) * n_[2] + iz;
  }

  /// Signed wavenumber of the FFT index along an axis. The Nyquist index maps
  /// to +N/2.
  int wavenumber(Axis a, int i) const {
    const int m = n(a);
    return i <= m / 2 ? i : i - m;
  }
  bool is_nyquist(Axis a, int i) const { return n(a) > 1 && 2 * i == n(a); }

  double spacing(Axis a) const { return kLength / n(a); }
  double coordinate(Axis a, int i) const { return spacing(a) * i; }

  /// Volume element of one grid cell on T^3 (the domain is always 3-D).
  double cell_volume() const;
  static double volume() { return kLength * kLength * kLength; }

  bool operator==(const Grid& o) const { return n_ == o.n_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

  std::string describe() const;

 private:
  std::array<int, 3> n_{1, 1, 1};
};

}  // namespace shearlab
