#include "shearlab/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "shearlab/fft.hpp"

namespace shearlab::kernels {

namespace {

Axis third_axis(Axis a, Axis b) {
  for (Axis c : kAxes) {
    if (c != a && c != b) return c;
  }
  throw std::invalid_argument("axes must differ");
}

int axis_index(Axis which, int i, int j, int l) {
  return which == Axis::x ? i : (which == Axis::y ? j : l);
}

}  // namespace

std::vector<Complex> shear_phase_table(const Grid& g, Axis flow, std::span<const double> integral) {
  const int nf = g.n(flow);
  const std::size_t ns = integral.size();
  std::vector<Complex> table(static_cast<std::size_t>(nf) * ns);
  for (int i = 0; i < nf; ++i) {
    const int k = g.wavenumber(flow, i);
    const bool nyq = g.is_nyquist(flow, i);
    for (std::size_t j = 0; j < ns; ++j) {
      table[i * ns + j] = nyq ? Complex{} : std::polar(1.0, -static_cast<double>(k) * integral[j]);
    }
  }
  return table;
}

void shear_phase_sweep(const Grid& g, Axis flow, Axis shear, std::span<const double> integral,
                       std::span<Complex> data) {
  if (flow == shear) throw std::invalid_argument("shear_phase_sweep: flow and shear axes coincide");
  const int ns = g.n(shear);
  if (integral.size() != static_cast<std::size_t>(ns)) {
    throw std::invalid_argument("shear_phase_sweep: integral length must equal the shear-axis extent");
  }
  if (!g.active(flow)) return;
  const Axis other = third_axis(flow, shear);
  const auto table = shear_phase_table(g, flow, integral);
  const fft::LineTransform line(ns);
  const int nf = g.n(flow);
  const int no = g.n(other);
  const std::size_t sf = g.stride(flow), so = g.stride(other), ss = g.stride(shear);
  const double inv_ns = 1.0 / ns;
  const long lines = static_cast<long>(nf) * no;

#pragma omp parallel
  {
    std::vector<Complex> buf(ns);
#pragma omp for schedule(static)
    for (long li = 0; li < lines; ++li) {
      const int i_f = static_cast<int>(li / no);
      const int i_o = static_cast<int>(li % no);
      const std::size_t base = i_f * sf + i_o * so;
      const Complex* ph = table.data() + static_cast<std::size_t>(i_f) * ns;
      for (int j = 0; j < ns; ++j) buf[j] = data[base + j * ss];
      line.backward(buf);
      for (int j = 0; j < ns; ++j) buf[j] *= ph[j] * inv_ns;
      line.forward(buf);
      for (int j = 0; j < ns; ++j) data[base + j * ss] = buf[j];
    }
  }
}

void shear_phase_sweep_serial(const Grid& g, Axis flow, Axis shear, std::span<const double> integral,
                              std::span<Complex> data) {
  if (flow == shear) throw std::invalid_argument("shear_phase_sweep: flow and shear axes coincide");
  if (!g.active(flow)) return;
  const int ns = g.n(shear);
  fft::transform_axis_inplace(g, shear, data, fft::Direction::backward);
  const auto& d = g.dims();
  std::size_t idx = 0;
  for (int i = 0; i < d[0]; ++i) {
    for (int j = 0; j < d[1]; ++j) {
      for (int l = 0; l < d[2]; ++l, ++idx) {
        const int i_f = axis_index(flow, i, j, l);
        const int i_s = axis_index(shear, i, j, l);
        if (g.is_nyquist(flow, i_f)) {
          data[idx] = 0.0;
          continue;
        }
        const double k = g.wavenumber(flow, i_f);
        data[idx] *= std::polar(1.0, -k * integral[i_s]) / static_cast<double>(ns);
      }
    }
  }
  fft::transform_axis_inplace(g, shear, data, fft::Direction::forward);
}

namespace {

std::vector<double> squared_wavenumbers(const Grid& g, Axis a) {
  std::vector<double> k2(g.n(a));
  for (int i = 0; i < g.n(a); ++i) {
    const double k = g.wavenumber(a, i);
    k2[i] = k * k;
  }
  return k2;
}

}  // namespace

void heat_factor(const Grid& g, double h, std::span<Complex> data) {
  const auto kx2 = squared_wavenumbers(g, Axis::x);
  const auto ky2 = squared_wavenumbers(g, Axis::y);
  const auto kz2 = squared_wavenumbers(g, Axis::z);
  std::vector<double> ez(kz2.size());
  for (std::size_t l = 0; l < kz2.size(); ++l) ez[l] = std::exp(-kz2[l] * h);
  const auto& d = g.dims();
  const long rows = static_cast<long>(d[0]) * d[1];
#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) {
    const int i = static_cast<int>(r / d[1]);
    const int j = static_cast<int>(r % d[1]);
    const double exy = std::exp(-(kx2[i] + ky2[j]) * h);
    Complex* row = data.data() + static_cast<std::size_t>(r) * d[2];
    for (int l = 0; l < d[2]; ++l) row[l] *= exy * ez[l];
  }
}

void heat_factor_serial(const Grid& g, double h, std::span<Complex> data) {
  const auto& d = g.dims();
  std::size_t idx = 0;
  for (int i = 0; i < d[0]; ++i) {
    const double kx = g.wavenumber(Axis::x, i);
    for (int j = 0; j < d[1]; ++j) {
      const double ky = g.wavenumber(Axis::y, j);
      for (int l = 0; l < d[2]; ++l, ++idx) {
        const double kz = g.wavenumber(Axis::z, l);
        data[idx] *= std::exp(-(kx * kx + ky * ky + kz * kz) * h);
      }
    }
  }
}

void coupled_heat(const Grid& g, double h, std::span<Complex> n, std::span<Complex> c) {
  const auto kx2 = squared_wavenumbers(g, Axis::x);
  const auto ky2 = squared_wavenumbers(g, Axis::y);
  const auto kz2 = squared_wavenumbers(g, Axis::z);
  std::vector<double> ez(kz2.size());
  for (std::size_t l = 0; l < kz2.size(); ++l) ez[l] = std::exp(-kz2[l] * h);
  const auto& d = g.dims();
  const long rows = static_cast<long>(d[0]) * d[1];
#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) {
    const int i = static_cast<int>(r / d[1]);
    const int j = static_cast<int>(r % d[1]);
    const double exy = std::exp(-(kx2[i] + ky2[j]) * h);
    const std::size_t off = static_cast<std::size_t>(r) * d[2];
    for (int l = 0; l < d[2]; ++l) {
      const std::size_t q = off + l;
      if (r == 0 && l == 0) continue;
      const double e = exy * ez[l];
      c[q] = e * (c[q] + h * n[q]);
      n[q] *= e;
    }
  }
}

void coupled_heat_serial(const Grid& g, double h, std::span<Complex> n, std::span<Complex> c) {
  const auto& d = g.dims();
  std::size_t idx = 0;
  for (int i = 0; i < d[0]; ++i) {
    const double kx = g.wavenumber(Axis::x, i);
    for (int j = 0; j < d[1]; ++j) {
      const double ky = g.wavenumber(Axis::y, j);
      for (int l = 0; l < d[2]; ++l, ++idx) {
        if (idx == 0) continue;
        const double kz = g.wavenumber(Axis::z, l);
        const double e = std::exp(-(kx * kx + ky * ky + kz * kz) * h);
        c[idx] = e * (c[idx] + h * n[idx]);
        n[idx] *= e;
      }
    }
  }
}

void flux_products(std::span<const double> n, std::span<const double> gx, std::span<const double> gy,
                   std::span<const double> gz, std::span<double> fx, std::span<double> fy,
                   std::span<double> fz) {
  const long m = static_cast<long>(n.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < m; ++i) {
    fx[i] = n[i] * gx[i];
    fy[i] = n[i] * gy[i];
    fz[i] = n[i] * gz[i];
  }
}

void flux_products_serial(std::span<const double> n, std::span<const double> gx,
                          std::span<const double> gy, std::span<const double> gz, std::span<double> fx,
                          std::span<double> fy, std::span<double> fz) {
  for (std::size_t i = 0; i < n.size(); ++i) {
    fx[i] = n[i] * gx[i];
    fy[i] = n[i] * gy[i];
    fz[i] = n[i] * gz[i];
  }
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace shearlab::kernels
