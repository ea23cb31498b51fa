#include "shearlab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace shearlab {

namespace fft {
namespace {

// Plans are created once per shape and shared; execution through the
// new-array interface is thread-safe, creation is not.
using PlanKey = std::tuple<int, int, int, int, int, int>;  // kind, nx, ny, nz, axis, sign

struct PlanCache {
  std::mutex mutex;
  std::map<PlanKey, fftw_plan> plans;
  ~PlanCache() {
    for (auto& [k, p] : plans) fftw_destroy_plan(p);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

int sign_of(Direction dir) { return dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD; }

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

template <class MakePlan>
fftw_plan get_plan(const PlanKey& key, std::size_t scratch, MakePlan&& make) {
  auto& c = cache();
  std::lock_guard<std::mutex> lock(c.mutex);
  auto it = c.plans.find(key);
  if (it != c.plans.end()) return it->second;
  std::vector<Complex> buf(scratch);
  fftw_plan p = make(as_fftw(buf.data()));
  if (p == nullptr) throw std::runtime_error("FFTW planner failed");
  c.plans.emplace(key, p);
  return p;
}

}  // namespace

void transform_inplace(const Grid& g, std::span<Complex> data, Direction dir) {
  if (data.size() != g.size()) throw std::invalid_argument("fft buffer size mismatch");
  const auto& d = g.dims();
  const int sign = sign_of(dir);
  fftw_plan p = get_plan({0, d[0], d[1], d[2], -1, sign}, g.size(), [&](fftw_complex* buf) {
    return fftw_plan_dft_3d(d[0], d[1], d[2], buf, buf, sign, kFlags);
  });
  fftw_execute_dft(p, as_fftw(data.data()), as_fftw(data.data()));
}

void transform_axis_inplace(const Grid& g, Axis a, std::span<Complex> data, Direction dir) {
  if (data.size() != g.size()) throw std::invalid_argument("fft buffer size mismatch");
  if (!g.active(a)) return;
  const auto& d = g.dims();
  const int sign = sign_of(dir);
  fftw_plan p = get_plan({1, d[0], d[1], d[2], index_of(a), sign}, g.size(), [&](fftw_complex* buf) {
    fftw_iodim dim{g.n(a), static_cast<int>(g.stride(a)), static_cast<int>(g.stride(a))};
    fftw_iodim many[2];
    int k = 0;
    for (Axis b : kAxes) {
      if (b == a) continue;
      many[k++] = fftw_iodim{g.n(b), static_cast<int>(g.stride(b)), static_cast<int>(g.stride(b))};
    }
    return fftw_plan_guru_dft(1, &dim, 2, many, buf, buf, sign, kFlags);
  });
  fftw_execute_dft(p, as_fftw(data.data()), as_fftw(data.data()));
}

void transform_line(int n, std::span<Complex> line, Direction dir) {
  if (line.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("fft line size mismatch");
  if (n == 1) return;
  const int sign = sign_of(dir);
  fftw_plan p = get_plan({2, n, 1, 1, -1, sign}, static_cast<std::size_t>(n), [&](fftw_complex* buf) {
    return fftw_plan_dft_1d(n, buf, buf, sign, kFlags);
  });
  fftw_execute_dft(p, as_fftw(line.data()), as_fftw(line.data()));
}

LineTransform::LineTransform(int n) : n_(n) {
  if (n <= 1) return;
  fwd_ = get_plan({2, n, 1, 1, -1, FFTW_FORWARD}, static_cast<std::size_t>(n), [&](fftw_complex* buf) {
    return fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, kFlags);
  });
  bwd_ = get_plan({2, n, 1, 1, -1, FFTW_BACKWARD}, static_cast<std::size_t>(n), [&](fftw_complex* buf) {
    return fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, kFlags);
  });
}

void LineTransform::forward(std::span<Complex> line) const {
  if (fwd_ == nullptr) return;
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(line.data()), as_fftw(line.data()));
}

void LineTransform::backward(std::span<Complex> line) const {
  if (bwd_ == nullptr) return;
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), as_fftw(line.data()), as_fftw(line.data()));
}

}  // namespace fft

SpectralField transform(const RealField& f) {
  if (!f.all_finite()) throw std::invalid_argument("transform: field contains non-finite samples");
  std::vector<Complex> buf(f.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = Complex(f[i], 0.0);
  fft::transform_inplace(f.grid(), buf, fft::Direction::forward);
  return SpectralField(f.grid(), std::move(buf));
}

std::vector<Complex> inverse_complex(const SpectralField& F) {
  std::vector<Complex> buf(F.coeffs().begin(), F.coeffs().end());
  fft::transform_inplace(F.grid(), buf, fft::Direction::backward);
  const double scale = 1.0 / static_cast<double>(F.size());
  for (auto& c : buf) c *= scale;
  return buf;
}

RealField inverse(const SpectralField& F) {
  auto buf = inverse_complex(F);
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  return RealField(F.grid(), std::move(out));
}

namespace {

// Flat index of the wavenumber-negated mode.
std::vector<std::size_t> mirror_index(const Grid& g) {
  const auto& d = g.dims();
  std::vector<std::size_t> m(g.size());
  std::size_t idx = 0;
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j)
      for (int l = 0; l < d[2]; ++l, ++idx)
        m[idx] = g.index((d[0] - i) % d[0], (d[1] - j) % d[1], (d[2] - l) % d[2]);
  return m;
}

}  // namespace

std::pair<SpectralField, SpectralField> transform_pair(const RealField& a, const RealField& b) {
  if (a.grid() != b.grid()) throw std::invalid_argument("transform_pair: grid mismatch");
  if (!a.all_finite() || !b.all_finite())
    throw std::invalid_argument("transform: field contains non-finite samples");
  const Grid& g = a.grid();
  std::vector<Complex> z(a.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = Complex(a[i], b[i]);
  fft::transform_inplace(g, z, fft::Direction::forward);
  const auto mirror = mirror_index(g);
  SpectralField A(g), B(g);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const Complex zm = std::conj(z[mirror[i]]);
    A[i] = 0.5 * (z[i] + zm);
    B[i] = Complex(0.0, -0.5) * (z[i] - zm);
  }
  return {std::move(A), std::move(B)};
}

std::pair<RealField, RealField> inverse_pair(const SpectralField& F, const SpectralField& G) {
  if (F.grid() != G.grid()) throw std::invalid_argument("inverse_pair: grid mismatch");
  const Grid& g = F.grid();
  std::vector<Complex> z(F.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = F[i] + Complex(-G[i].imag(), G[i].real());
  fft::transform_inplace(g, z, fft::Direction::backward);
  const double scale = 1.0 / static_cast<double>(z.size());
  RealField a(g), b(g);
  for (std::size_t i = 0; i < z.size(); ++i) {
    a[i] = z[i].real() * scale;
    b[i] = z[i].imag() * scale;
  }
  return {std::move(a), std::move(b)};
}

}  // namespace shearlab
