#include "fkdv/kernels.hpp"

#include "kernels_common.hpp"

namespace fkdv::kernels::serial {

Eigen::VectorXd nonlinear_load(const FemFunction& w, const FemFunction& u, int pts) {
  const int n = u.grid().n_elems();
  const detail::ElementTable tab(pts);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(2 * n);
  for (int e = 0; e < n; ++e) {
    const auto loc = detail::nonlinear_local(tab, w.coeffs(), u.coeffs(), e, n);
    const int r = (e + 1) % n;
    q[2 * e] += loc[0];
    q[2 * e + 1] += loc[1];
    q[2 * r] += loc[2];
    q[2 * r + 1] += loc[3];
  }
  return q;
}

Eigen::VectorXd projection_load(const RealFn& f, const Grid& grid, int pts) {
  const int n = grid.n_elems();
  const detail::ElementTable tab(pts);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * n);
  for (int e = 0; e < n; ++e) {
    const auto loc = detail::projection_local(tab, f, grid, e);
    const int r = (e + 1) % n;
    b[2 * e] += loc[0];
    b[2 * e + 1] += loc[1];
    b[2 * r] += loc[2];
    b[2 * r + 1] += loc[3];
  }
  return b;
}

double cubic_integral(const FemFunction& u, int pts) {
  const int n = u.grid().n_elems();
  const detail::ElementTable tab(pts);
  double s = 0.0;
  for (int e = 0; e < n; ++e)
    s += detail::cubic_local(tab, u.coeffs(), e, n, u.grid().dx());
  return s;
}

std::vector<Eigen::Matrix2d> offset_blocks(int n, const BlockFn& block) {
  std::vector<Eigen::Matrix2d> out(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m)
    out[static_cast<std::size_t>(m)] = block(m);
  return out;
}

} // namespace fkdv::kernels::serial
