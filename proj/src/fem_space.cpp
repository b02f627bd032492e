#include "fkdv/fem_space.hpp"

#include "fkdv/block_circulant.hpp"
#include "fkdv/errors.hpp"
#include "fkdv/kernels.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fkdv {

Grid::Grid(double a, double b, int n_elems) : a_(a), b_(b), n_(n_elems), dx_(0.0) {
  if (!(std::isfinite(a) && std::isfinite(b)) || !(b > a))
    throw ConfigError(fmt::format("grid: need a < b, got [{}, {}]", a, b));
  if (n_elems < 4)
    throw ConfigError(fmt::format("grid: need at least 4 elements, got {}", n_elems));
  dx_ = (b - a) / n_elems;
}

double Grid::wrap(double x) const noexcept {
  const double L = length();
  double r = std::fmod(x - a_, L);
  if (r < 0.0)
    r += L;
  if (r >= L)
    r = 0.0;
  return a_ + r;
}

double shape_f(double y) noexcept {
  const double t = std::abs(y);
  return t >= 1.0 ? 0.0 : 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

double shape_g(double y) noexcept {
  const double t = std::abs(y);
  return t >= 1.0 ? 0.0 : y * (1.0 - t) * (1.0 - t);
}

namespace {

const Cubic kZero{};
const Cubic kPieces[2][2] = {
    {Cubic{{1.0, 0.0, -3.0, -2.0}}, Cubic{{1.0, 0.0, -3.0, 2.0}}},
    {Cubic{{0.0, 1.0, 2.0, 1.0}}, Cubic{{0.0, 1.0, -2.0, 1.0}}},
};

} // namespace

const Cubic& shape_piece(Shape s, int side) noexcept {
  if (side != 0 && side != 1)
    return kZero;
  return kPieces[static_cast<int>(s)][side];
}

Cubic shape_piece_at(Shape s, double y, bool right) noexcept {
  if (y < -1.0 || y > 1.0 || (y == -1.0 && !right) || (y == 1.0 && right))
    return kZero;
  if (y < 0.0 || (y == 0.0 && !right))
    return shape_piece(s, 0);
  return shape_piece(s, 1);
}

double shape_moment(Shape s, int n) noexcept {
  if (n < 0)
    return 0.0;
  const double m = n;
  if (s == Shape::value)
    return n % 2 ? 0.0 : 2.0 * (1.0 / (m + 1) - 3.0 / (m + 3) + 2.0 / (m + 4));
  return n % 2 ? 2.0 * (1.0 / (m + 2) - 2.0 / (m + 3) + 1.0 / (m + 4)) : 0.0;
}

std::array<double, 4> element_shapes(double t) noexcept {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {1.0 - 3.0 * t2 + 2.0 * t3, t - 2.0 * t2 + t3, 3.0 * t2 - 2.0 * t3, t3 - t2};
}

std::array<double, 4> element_shape_derivs(double t) noexcept {
  const double t2 = t * t;
  return {-6.0 * t + 6.0 * t2, 1.0 - 4.0 * t + 3.0 * t2, 6.0 * t - 6.0 * t2, 3.0 * t2 - 2.0 * t};
}

FemFunction::FemFunction(Grid grid) : grid_(grid), coeffs_(Eigen::VectorXd::Zero(grid.n_dofs())) {}

FemFunction::FemFunction(Grid grid, Eigen::VectorXd coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.n_dofs())
    throw ConfigError(fmt::format("coefficient vector has {} entries, grid needs {}", coeffs_.size(),
                                  grid_.n_dofs()));
}

Eigen::VectorXd FemFunction::nodal_values() const {
  Eigen::VectorXd v(grid_.n_elems());
  for (int j = 0; j < grid_.n_elems(); ++j)
    v[j] = coeffs_[2 * j];
  return v;
}

namespace {

// Element index and local coordinate of x.
std::pair<int, double> locate(const Grid& g, double x) {
  const double s = (g.wrap(x) - g.a()) / g.dx();
  int e = static_cast<int>(std::floor(s));
  if (e >= g.n_elems())
    e = g.n_elems() - 1;
  if (e < 0)
    e = 0;
  return {e, s - e};
}

double combine(const FemFunction& u, int e, const std::array<double, 4>& phi) {
  return u.value_coeff(e) * phi[0] + u.slope_coeff(e) * phi[1] + u.value_coeff(e + 1) * phi[2] +
         u.slope_coeff(e + 1) * phi[3];
}

} // namespace

double eval(const FemFunction& u, double x) {
  const auto [e, t] = locate(u.grid(), x);
  return combine(u, e, element_shapes(t));
}

double eval_deriv(const FemFunction& u, double x) {
  const auto [e, t] = locate(u.grid(), x);
  return combine(u, e, element_shape_derivs(t)) / u.grid().dx();
}

FemFunction hermite_interpolate(const RealFn& f, const RealFn& fprime, const Grid& grid) {
  FemFunction u(grid);
  for (int j = 0; j < grid.n_elems(); ++j) {
    u.coeffs()[2 * j] = f(grid.node(j));
    u.coeffs()[2 * j + 1] = grid.dx() * fprime(grid.node(j));
  }
  return u;
}

std::array<Eigen::Matrix2d, 3> hermite_mass_blocks(double dx) {
  Eigen::Matrix4d L;
  L << 156, 22, 54, -13, 22, 4, 13, -3, 54, 13, 156, -22, -13, -3, -22, 4;
  L *= dx / 420.0;
  return {L.topLeftCorner<2, 2>() + L.bottomRightCorner<2, 2>(), L.topRightCorner<2, 2>(),
          L.bottomLeftCorner<2, 2>()};
}

FemFunction l2_project(const RealFn& f, const Grid& grid, const QuadratureSpec& quad) {
  quad.validate();
  const int n = grid.n_elems();
  const auto mb = hermite_mass_blocks(grid.dx());
  std::vector<Eigen::Matrix2d> blocks(static_cast<std::size_t>(n), Eigen::Matrix2d::Zero());
  blocks[0] = mb[0];
  blocks[1] += mb[1];
  blocks[static_cast<std::size_t>(n - 1)] += mb[2];
  const CirculantSolver solver{BlockCirculant(std::move(blocks))};
  return FemFunction(grid, solver.solve(kernels::parallel::projection_load(f, grid, quad.inner_pts)));
}

double l2_norm(const FemFunction& u) {
  const auto mb = hermite_mass_blocks(u.grid().dx());
  double s = 0.0;
  for (int j = 0; j < u.grid().n_elems(); ++j) {
    const Eigen::Vector2d cj(u.value_coeff(j), u.slope_coeff(j));
    const Eigen::Vector2d cn(u.value_coeff(j + 1), u.slope_coeff(j + 1));
    s += cj.dot(mb[0] * cj) + 2.0 * cj.dot(mb[1] * cn);
  }
  return std::sqrt(std::max(0.0, s));
}

double sup_norm(const FemFunction& u, int pts_per_elem) {
  const auto& rule = gauss_legendre(pts_per_elem);
  std::vector<std::array<double, 4>> tab;
  for (int g = 0; g < rule.size(); ++g)
    tab.push_back(element_shapes(rule.node(g)));
  double m = 0.0;
  for (int e = 0; e < u.grid().n_elems(); ++e) {
    m = std::max(m, std::abs(u.value_coeff(e)));
    for (const auto& phi : tab)
      m = std::max(m, std::abs(combine(u, e, phi)));
  }
  return m;
}

} // namespace fkdv
