#include "fkdv/spectral_oracle.hpp"

#include "fkdv/block_circulant.hpp"
#include "fkdv/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace fkdv {

using cplx = std::complex<double>;

SpectralGrid::SpectralGrid(int m, double a, double b) : m_(m), a_(a), b_(b) {
  if (m < 4 || (m & (m - 1)) != 0)
    throw ConfigError(fmt::format("spectral grid size must be a power of two >= 4, got {}", m));
  if (!(b > a))
    throw ConfigError("spectral grid needs a < b");
}

double SpectralGrid::wavenumber(int l) const noexcept {
  if (2 * l == m_)
    return 0.0;
  return 2.0 * std::numbers::pi * l / length();
}

namespace {

std::vector<cplx> forward(const Eigen::VectorXd& u) {
  const int m = static_cast<int>(u.size());
  std::vector<cplx> h(static_cast<std::size_t>(m / 2 + 1));
  RealFft(m, 1).forward(u.data(), h.data());
  return h;
}

Eigen::VectorXd backward(std::vector<cplx> h, int m) {
  Eigen::VectorXd u(m);
  RealFft(m, 1).backward(h.data(), u.data());
  return u / m;
}

} // namespace

Eigen::VectorXd spectral_frac_apply(const Eigen::VectorXd& samples, double alpha, const SpectralGrid& grid) {
  if (samples.size() != grid.size())
    throw ConfigError("sample count does not match the spectral grid");
  auto h = forward(samples);
  for (std::size_t l = 0; l < h.size(); ++l) {
    const double k = std::abs(2.0 * std::numbers::pi * static_cast<double>(l) / grid.length());
    h[l] *= l == 0 ? 0.0 : std::pow(k, alpha);
  }
  return backward(std::move(h), grid.size());
}

double spectral_eval(const Eigen::VectorXd& samples, const SpectralGrid& grid, double x) {
  const auto h = forward(samples);
  const int m = grid.size();
  const double th = 2.0 * std::numbers::pi * (x - grid.a()) / grid.length();
  double v = h[0].real();
  for (int l = 1; l < m / 2; ++l)
    v += 2.0 * (h[static_cast<std::size_t>(l)] * std::polar(1.0, l * th)).real();
  v += h[static_cast<std::size_t>(m / 2)].real() * std::cos(0.5 * m * th);
  return v / m;
}

double spectral_l2_norm(const Eigen::VectorXd& samples, const SpectralGrid& grid) {
  const auto h = forward(samples);
  const int m = grid.size();
  double s = std::norm(h[0]) + std::norm(h[static_cast<std::size_t>(m / 2)]);
  for (int l = 1; l < m / 2; ++l)
    s += 2.0 * std::norm(h[static_cast<std::size_t>(l)]);
  return std::sqrt(s * grid.length()) / m;
}

Eigen::VectorXd spectral_reference_solve(const Eigen::VectorXd& u0_samples, double alpha, double t0, double t_final,
                                         const SpectralGrid& grid, double dt) {
  if (u0_samples.size() != grid.size())
    throw ConfigError("sample count does not match the spectral grid");
  if (!(dt > 0.0) || !(t_final >= t0) || !(alpha >= 0.0))
    throw ConfigError("spectral solve needs dt > 0, t_final >= t0 and alpha >= 0");
  const int m = grid.size();
  const int nc = m / 2 + 1;
  const long steps = t_final > t0 ? static_cast<long>(std::ceil((t_final - t0) / dt * (1.0 - 1e-12))) : 0;
  if (steps == 0)
    return u0_samples;
  const double h = (t_final - t0) / static_cast<double>(steps);

  std::vector<cplx> ik(static_cast<std::size_t>(nc)), e1(ik.size()), e2(ik.size());
  std::vector<double> mask(ik.size());
  for (int l = 0; l < nc; ++l) {
    const double k = grid.wavenumber(l);
    const auto i = static_cast<std::size_t>(l);
    ik[i] = cplx(0.0, k);
    // u_t = D^a u_x - (u^2/2)_x: linear symbol i k |k|^a
    const cplx lin(0.0, k * std::pow(std::abs(k), alpha));
    e1[i] = std::exp(0.5 * h * lin);
    e2[i] = e1[i] * e1[i];
    mask[i] = 3 * l < m ? 1.0 : 0.0;
  }
  auto nonlin = [&](const std::vector<cplx>& v) {
    Eigen::VectorXd u = backward(v, m);
    auto sq = forward(u.array().square().matrix());
    for (std::size_t l = 0; l < sq.size(); ++l)
      sq[l] *= -0.5 * ik[l] * mask[l];
    return sq;
  };

  std::vector<cplx> v = forward(u0_samples);
  for (std::size_t l = 0; l < v.size(); ++l)
    v[l] *= mask[l];
  std::vector<cplx> tmp(v.size());
  for (long n = 1; n <= steps; ++n) {
    auto a = nonlin(v);
    for (std::size_t l = 0; l < v.size(); ++l)
      tmp[l] = e1[l] * (v[l] + 0.5 * h * a[l]);
    auto b = nonlin(tmp);
    for (std::size_t l = 0; l < v.size(); ++l)
      tmp[l] = e1[l] * v[l] + 0.5 * h * b[l];
    auto c = nonlin(tmp);
    for (std::size_t l = 0; l < v.size(); ++l)
      tmp[l] = e2[l] * v[l] + e1[l] * h * c[l];
    auto d = nonlin(tmp);
    bool finite = true;
    for (std::size_t l = 0; l < v.size(); ++l) {
      v[l] = e2[l] * v[l] + h * (e2[l] * a[l] + 2.0 * e1[l] * (b[l] + c[l]) + d[l]) / 6.0;
      finite = finite && std::isfinite(v[l].real()) && std::isfinite(v[l].imag());
    }
    if (!finite)
      throw DivergenceError(fmt::format("spectral reference blew up at step {}", n), n, 0.0);
  }
  return backward(std::move(v), m);
}

} // namespace fkdv
