#include "shearlab/grid.hpp"

#include <stdexcept>

namespace shearlab {

char axis_label(Axis a) { return "xyz"[index_of(a)]; }

Axis axis_from_label(char c) {
  switch (c) {
    case 'x': return Axis::x;
    case 'y': return Axis::y;
    case 'z': return Axis::z;
    default: throw std::invalid_argument(std::string("unknown axis label '") + c + "'");
  }
}

namespace {
bool valid_extent(int n) {
  if (n == 1) return true;
  if (n < 4 || n % 2 != 0) return false;
  while (n % 2 == 0) n /= 2;
  while (n % 3 == 0) n /= 3;
  return n == 1;
}
}  // namespace

Grid::Grid(int nx, int ny, int nz, std::size_t point_cap) : n_{nx, ny, nz} {
  for (int a = 0; a < 3; ++a) {
    if (!valid_extent(n_[a])) {
      throw std::invalid_argument("grid extent along " + std::string(1, "xyz"[a]) +
                                  " must be 1 or an even 2^a 3^b >= 4, got " +
                                  std::to_string(n_[a]));
    }
  }
  if (size() > point_cap) {
    throw std::invalid_argument("grid " + describe() + " exceeds the point cap of " +
                                std::to_string(point_cap));
  }
}

Grid Grid::line(Axis a, int n) {
  std::array<int, 3> d{1, 1, 1};
  d[index_of(a)] = n;
  return Grid(d[0], d[1], d[2]);
}

std::size_t Grid::size() const {
  return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2];
}

std::size_t Grid::stride(Axis a) const {
  switch (a) {
    case Axis::x: return static_cast<std::size_t>(n_[1]) * n_[2];
    case Axis::y: return static_cast<std::size_t>(n_[2]);
    case Axis::z: return 1;
  }
  return 1;
}

double Grid::cell_volume() const { return volume() / static_cast<double>(size()); }

std::string Grid::describe() const {
  return std::to_string(n_[0]) + "x" + std::to_string(n_[1]) + "x" + std::to_string(n_[2]);
}

}  // namespace shearlab
