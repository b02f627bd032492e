#pragma once

#include "fkdv/fem_space.hpp"
#include "fkdv/quadrature.hpp"

#include <array>
#include <vector>

namespace fkdv::kernels::detail {

/// Element basis values and t-derivatives tabulated at the Gauss points.
struct ElementTable {
  explicit ElementTable(int pts) : rule(gauss_legendre(pts)) {
    for (int g = 0; g < rule.size(); ++g) {
      phi.push_back(element_shapes(rule.node(g)));
      dphi.push_back(element_shape_derivs(rule.node(g)));
    }
  }
  const GaussLegendre& rule;
  std::vector<std::array<double, 4>> phi;
  std::vector<std::array<double, 4>> dphi;
};

inline std::array<double, 4> element_coeffs(const Eigen::VectorXd& c, int e, int n) {
  const int r = (e + 1) % n;
  return {c[2 * e], c[2 * e + 1], c[2 * r], c[2 * r + 1]};
}

inline double element_value(const std::array<double, 4>& loc, const std::array<double, 4>& phi) {
  return loc[0] * phi[0] + loc[1] * phi[1] + loc[2] * phi[2] + loc[3] * phi[3];
}

/// Local 4-vector of sum_g w_g z(t_g)^2 dphi_a/dt(t_g), z = (w+u)/2 on element e.
inline std::array<double, 4> nonlinear_local(const ElementTable& tab, const Eigen::VectorXd& w,
                                             const Eigen::VectorXd& u, int e, int n) {
  const auto lw = element_coeffs(w, e, n);
  const auto lu = element_coeffs(u, e, n);
  std::array<double, 4> loc{};
  for (int g = 0; g < tab.rule.size(); ++g) {
    const double z = 0.5 * (element_value(lw, tab.phi[g]) + element_value(lu, tab.phi[g]));
    const double wz = tab.rule.weight(g) * z * z;
    for (int a = 0; a < 4; ++a)
      loc[a] += wz * tab.dphi[g][a];
  }
  return loc;
}

inline std::array<double, 4> projection_local(const ElementTable& tab, const RealFn& f,
                                              const Grid& grid, int e) {
  const double x0 = grid.node(e);
  const double dx = grid.dx();
  std::array<double, 4> loc{};
  for (int g = 0; g < tab.rule.size(); ++g) {
    const double fw = tab.rule.weight(g) * dx * f(x0 + dx * tab.rule.node(g));
    for (int a = 0; a < 4; ++a)
      loc[a] += fw * tab.phi[g][a];
  }
  return loc;
}

inline double cubic_local(const ElementTable& tab, const Eigen::VectorXd& c, int e, int n,
                          double dx) {
  const auto lc = element_coeffs(c, e, n);
  double s = 0.0;
  for (int g = 0; g < tab.rule.size(); ++g) {
    const double v = element_value(lc, tab.phi[g]);
    s += tab.rule.weight(g) * v * v * v;
  }
  return s * dx;
}

} // namespace fkdv::kernels::detail
