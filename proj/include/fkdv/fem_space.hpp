#pragma once

#include "fkdv/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>

namespace fkdv {

using RealFn = std::function<double(double)>;

/// Uniform periodic grid on [a, b) with n_elems elements; node j sits at a + j*dx.
class Grid {
public:
  Grid(double a, double b, int n_elems);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }
  int n_elems() const noexcept { return n_; }
  int n_dofs() const noexcept { return 2 * n_; }
  double dx() const noexcept { return dx_; }
  double node(int j) const noexcept { return a_ + j * dx_; }
  int wrap(int j) const noexcept { return ((j % n_) + n_) % n_; }
  /// Maps x into [a, b).
  double wrap(double x) const noexcept;

  bool operator==(const Grid& other) const noexcept {
    return a_ == other.a_ && b_ == other.b_ && n_ == other.n_;
  }

private:
  double a_;
  double b_;
  int n_;
  double dx_;
};

// Reference shapes on [-1, 1]: f carries the nodal value, g the scaled slope.
double shape_f(double y) noexcept;
double shape_g(double y) noexcept;

enum class Shape { value = 0, slope = 1 };

/// Cubic c0 + c1 y + c2 y^2 + c3 y^3.
struct Cubic {
  std::array<double, 4> c{};

  double operator()(double y) const noexcept { return c[0] + y * (c[1] + y * (c[2] + y * c[3])); }
  double d1(double y) const noexcept { return c[1] + y * (2.0 * c[2] + 3.0 * y * c[3]); }
  double d2(double y) const noexcept { return 2.0 * c[2] + 6.0 * y * c[3]; }
  double d3() const noexcept { return 6.0 * c[3]; }
};

/// Polynomial piece of a reference shape on [-1,0] (side 0) or [0,1] (side 1);
/// outside [-1, 1] the shape is the zero polynomial.
const Cubic& shape_piece(Shape s, int side) noexcept;

/// Piece of `s` active at y (zero cubic outside [-1, 1]). `right` picks the
/// piece on the right of a breakpoint.
Cubic shape_piece_at(Shape s, double y, bool right) noexcept;

/// Moments of the reference shapes: int_{-1}^{1} y^n phi(y) dy.
double shape_moment(Shape s, int n) noexcept;

/// Local element basis on t in [0, 1]: (f, g) at the left node, then (f, g) at the right node.
std::array<double, 4> element_shapes(double t) noexcept;
/// d/dt of element_shapes.
std::array<double, 4> element_shape_derivs(double t) noexcept;

/// Coefficients over the periodic Hermite-cubic space. Entry 2j is u(x_j), 2j+1 is dx*u'(x_j).
class FemFunction {
public:
  explicit FemFunction(Grid grid);
  FemFunction(Grid grid, Eigen::VectorXd coeffs);

  const Grid& grid() const noexcept { return grid_; }
  const Eigen::VectorXd& coeffs() const noexcept { return coeffs_; }
  Eigen::VectorXd& coeffs() noexcept { return coeffs_; }

  double value_coeff(int j) const { return coeffs_[2 * grid_.wrap(j)]; }
  double slope_coeff(int j) const { return coeffs_[2 * grid_.wrap(j) + 1]; }

  /// Nodal values c_{2j}.
  Eigen::VectorXd nodal_values() const;

private:
  Grid grid_;
  Eigen::VectorXd coeffs_;
};

double eval(const FemFunction& u, double x);
double eval_deriv(const FemFunction& u, double x);

FemFunction hermite_interpolate(const RealFn& f, const RealFn& fprime, const Grid& grid);

/// Mass-matrix offset blocks: block m pairs node 0 with node m (m = 0, 1, N-1 are nonzero).
/// Entry (s, t) is <v_{m,t}, v_{0,s}>.
std::array<Eigen::Matrix2d, 3> hermite_mass_blocks(double dx);

/// L^2-orthogonal projection onto the Hermite space with `quad.inner_pts` Gauss points per element.
FemFunction l2_project(const RealFn& f, const Grid& grid, const QuadratureSpec& quad = {});

/// Exact L^2 norm over the period (element mass matrices).
double l2_norm(const FemFunction& u);

/// sup |u| sampled at nodes and at the Gauss points of every element.
double sup_norm(const FemFunction& u, int pts_per_elem = 8);

} // namespace fkdv
