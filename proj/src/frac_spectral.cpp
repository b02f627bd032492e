#include "fkdv/frac_assembly.hpp"

#include "fkdv/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <numbers>

namespace fkdv {
namespace {

using cplx = std::complex<double>;

// Fourier transforms int phi(xi) exp(-i w xi) dxi of the reference shapes.
double hat_f(double w) {
  const double w2 = w * w;
  if (std::abs(w) < 0.25)
    return 1.0 - w2 / 15.0 + w2 * w2 / 560.0 - w2 * w2 * w2 / 37800.0 + w2 * w2 * w2 * w2 / 3326400.0;
  return 12.0 * (2.0 - 2.0 * std::cos(w) - w * std::sin(w)) / (w2 * w2);
}

cplx hat_g(double w) {
  const double w2 = w * w;
  if (std::abs(w) < 0.25)
    return {0.0, w * (-1.0 / 15.0 + w2 / 315.0 - w2 * w2 / 15120.0 + w2 * w2 * w2 / 1247400.0)};
  return {0.0, 4.0 * (3.0 * std::sin(w) - w * (2.0 + std::cos(w))) / (w2 * w2)};
}

cplx multiplier(OperatorKind kind, double k, double alpha) {
  switch (kind) {
  case OperatorKind::mass:
    return 1.0;
  case OperatorKind::disp:
    return {0.0, k * std::pow(std::abs(k), alpha)};
  case OperatorKind::gram_half:
    return std::pow(std::abs(k), alpha);
  }
  return 0.0;
}

} // namespace

// B(m) = sum_l F(k_l) dx^2/L phi_t^(k_l dx) conj(phi_s^(k_l dx)) exp(-2 pi i l m / N);
// wavenumbers alias onto the N node frequencies r = l mod N.
OffsetBlocks assemble_offset_blocks_spectral(const Grid& grid, FractionalOrder alpha, OperatorKind kind,
                                             long m_modes, double tail_tol) {
  const int n = grid.n_elems();
  if (m_modes < n)
    throw ConfigError(fmt::format("m_modes = {} is below the node count {}", m_modes, n));
  const int nc = n / 2 + 1;
  const double dx = grid.dx();
  const double pref = dx * dx / grid.length();
  const double a = alpha.value();
  std::vector<cplx> sym(static_cast<std::size_t>(4 * nc), 0.0);
  double last = 0.0;
  for (long l = -m_modes; l <= m_modes; ++l) {
    const long r = ((l % n) + n) % n;
    if (r >= nc)
      continue;
    const double k = 2.0 * std::numbers::pi * static_cast<double>(l) / grid.length();
    const double w = k * dx;
    const std::array<cplx, 2> phi{cplx(hat_f(w)), hat_g(w)};
    const cplx f = pref * multiplier(kind, k, a);
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t)
        sym[static_cast<std::size_t>(4 * r + 2 * s + t)] += f * phi[static_cast<std::size_t>(t)] *
                                                             std::conj(phi[static_cast<std::size_t>(s)]);
    if (std::abs(l) == m_modes)
      last = std::max(last, std::abs(f) * std::norm(phi[0]) + std::abs(f) * std::norm(phi[1]));
  }
  double peak = 0.0;
  for (const auto& v : sym)
    peak = std::max(peak, std::abs(v));
  // terms decay like l^(a-5) at worst (disp), so the tail is about last * M / (4 - a)
  const double decay = kind == OperatorKind::disp ? 4.0 - a : kind == OperatorKind::gram_half ? 5.0 - a : 6.0;
  const double tail = last * static_cast<double>(m_modes) / decay;
  if (peak > 0.0 && tail > tail_tol * peak)
    throw QuadratureError(fmt::format("spectral assembly: tail estimate {:.3g} exceeds tolerance at m_modes = {}",
                                      tail / peak, m_modes));
  // B real, so B(m) = sum_r exp(+2 pi i r m / N) conj(S(r)): an unnormalized c2r transform.
  for (auto& v : sym)
    v = std::conj(v);
  std::vector<double> out(static_cast<std::size_t>(4 * n));
  RealFft(n, 4).backward(sym.data(), out.data());
  OffsetBlocks blocks(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const double* b = &out[static_cast<std::size_t>(4 * m)];
    blocks[static_cast<std::size_t>(m)] << b[0], b[1], b[2], b[3];
  }
  if (kind == OperatorKind::mass) {
    // supports are disjoint beyond offset 1; drop aliasing round-off there
    for (int m = 2; m < n - 1; ++m)
      blocks[static_cast<std::size_t>(m)].setZero();
  }
  return blocks;
}

Eigen::MatrixXd assemble_dispersion_spectral(const Grid& grid, FractionalOrder alpha, long m_modes) {
  return BlockCirculant(assemble_offset_blocks_spectral(grid, alpha, OperatorKind::disp, m_modes)).dense();
}

} // namespace fkdv
