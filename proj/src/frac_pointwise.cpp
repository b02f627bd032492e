#include "fkdv/frac_assembly.hpp"

#include "fkdv/errors.hpp"

#include "frac_common.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace fkdv {
namespace {

// Real-line D^a of a reference shape at xi, in reference units:
//   c_a int_0^inf (2 phi(xi) - phi(xi + z) - phi(xi - z)) z^{-1-a} dz.
// The numerator is a2 z^2 + a3 z^3 from the pieces adjacent to xi, minus one
// jump term in (z - z_b)^2, (z - z_b)^3 for every kink b crossed at z_b = |b - xi|.
// Each term integrates in closed form without cancellation near a kink.
double shape_frac_laplacian(Shape s, double xi, double a) {
  if (std::abs(xi) >= 2.0) {
    // outside the support: -c_a int phi(y) |xi - y|^{-1-a} dy, smooth integrand
    const auto& gl = gauss_legendre(20);
    double sum = 0.0;
    for (int side = 0; side < 2; ++side) {
      const Cubic& p = shape_piece(s, side);
      sum += gl.integrate([&](double y) { return p(y) * std::pow(std::abs(xi - y), -1.0 - a); }, side - 1.0,
                          side);
    }
    return -sum;
  }
  // int_lo^hi z^{i-1-a} dz
  auto power_integral = [a](int i, double lo, double hi) {
    const double e = i - a;
    return e == 0.0 ? std::log(hi / lo) : (std::pow(hi, e) - std::pow(lo, e)) / e;
  };
  const double z_max = std::abs(xi) + 1.0; // beyond this both arguments leave the support
  const Cubic right = shape_piece_at(s, xi, true);
  const Cubic left = shape_piece_at(s, xi, false);
  const double a2 = -0.5 * (right.d2(xi) + left.d2(xi));
  const double a3 = -(right.d3() - left.d3()) / 6.0;
  double sum = a2 * std::pow(z_max, 2.0 - a) / (2.0 - a) + a3 * std::pow(z_max, 3.0 - a) / (3.0 - a);

  for (int b = -1; b <= 1; ++b) {
    const double zb = std::abs(b - xi);
    if (zb == 0.0 || zb >= z_max)
      continue;
    const Cubic before_b = shape_piece_at(s, b, b < xi);
    const Cubic after_b = shape_piece_at(s, b, b > xi);
    const double d2 = after_b.d2(b) - before_b.d2(b);
    const double d3 = (after_b.d3() - before_b.d3()) * (b > xi ? 1.0 : -1.0);
    // -(d2/2 w^2 + d3/6 w^3), w = z - zb, expanded in powers of z
    const std::array<double, 4> c{-(0.5 * d2 * zb * zb - d3 / 6.0 * zb * zb * zb),
                                  -(-d2 * zb + 0.5 * d3 * zb * zb), -(0.5 * d2 - 0.5 * d3 * zb), -d3 / 6.0};
    for (int i = 0; i < 4; ++i)
      sum += c[static_cast<std::size_t>(i)] * power_integral(i, zb, z_max);
  }
  return sum + 2.0 * right(xi) * std::pow(z_max, -a) / a;
}

} // namespace

double pv_frac_laplacian_basis(int j, double x, const Grid& grid, FractionalOrder alpha, const QuadratureSpec& quad) {
  quad.validate();
  if (j < 0 || j >= grid.n_dofs())
    throw ConfigError(fmt::format("dof index {} out of range", j));
  const double a = alpha.value();
  const int n = grid.n_elems();
  const auto shape = static_cast<Shape>(j % 2);
  double xi = (grid.wrap(x) - grid.node(j / 2)) / grid.dx();
  if (xi >= 0.5 * n)
    xi -= n;
  else if (xi < -0.5 * n)
    xi += n;

  double value = shape_frac_laplacian(shape, xi, a);

  // images xi + kN, k != 0: -c_a int phi(y) |z - y|^{-1-a} dy expanded in y / z
  double tail = 0.0;
  for (int k = 0;; ++k) {
    const double mk = shape_moment(shape, k);
    if (mk == 0.0)
      continue;
    const double sig = k + 1.0 + a;
    const double lat = std::pow(static_cast<double>(n), -sig) *
                       ((k % 2 ? -1.0 : 1.0) * detail::hurwitz_zeta(sig, 1.0 + xi / n) +
                        detail::hurwitz_zeta(sig, 1.0 - xi / n));
    const double term = detail::binom(-1.0 - a, k) * mk * lat;
    tail -= term;
    if (k >= 2 && std::abs(term) <= quad.image_tail_tol)
      break;
    if (k >= quad.max_images)
      throw QuadratureError(
          fmt::format("periodic image sum not converged after {} terms; domain too short for the tolerance", k));
  }
  return frac_constant(alpha) * (value + tail) * std::pow(grid.dx(), -a);
}

double pv_frac_laplacian(const RealFn& f, double x, FractionalOrder alpha, const QuadratureSpec& quad,
                         const PvOptions& opt) {
  quad.validate();
  if (!(opt.eps > 0.0 && opt.scale > opt.eps && opt.cutoff > opt.scale))
    throw ConfigError("pv options need 0 < eps < scale < cutoff");
  const double a = alpha.value();
  const double fx = f(x);
  auto h = [&](double z) { return 2.0 * fx - f(x + z) - f(x - z); };
  const auto& gl = gauss_legendre(quad.pv_pts);
  auto panel = [&](double lo, double hi) {
    return gl.integrate([&](double z) { return h(z) * std::pow(z, -1.0 - a); }, lo, hi);
  };

  double sum = h(opt.eps) / (opt.eps * opt.eps) * std::pow(opt.eps, 2.0 - a) / (2.0 - a);
  double z = opt.eps;
  while (z < opt.scale) {
    const double next = std::min(2.0 * z, opt.scale);
    sum += panel(z, next);
    z = next;
  }
  while (z < opt.cutoff) {
    const double next = std::min(z + opt.scale, opt.cutoff);
    sum += panel(z, next);
    z = next;
  }
  sum += 2.0 * fx * std::pow(opt.cutoff, -a) / a;
  return frac_constant(alpha) * sum;
}

} // namespace fkdv
