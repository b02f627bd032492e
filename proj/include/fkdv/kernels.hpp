#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version (used by the
// library) and a serial reference kept for tests and the benchmark; both
// produce bit-identical results.

#include "fkdv/fem_space.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace fkdv::kernels {

using BlockFn = std::function<Eigen::Matrix2d(int)>;

namespace serial {

/// q_i = int ((w+u)/2)^2 dv_i/dx dx, `pts` Gauss points per element.
Eigen::VectorXd nonlinear_load(const FemFunction& w, const FemFunction& u, int pts);
/// b_i = int f v_i dx.
Eigen::VectorXd projection_load(const RealFn& f, const Grid& grid, int pts);
/// int u^3 dx.
double cubic_integral(const FemFunction& u, int pts);
/// blocks[m] = block(m) for m = 0..n-1.
std::vector<Eigen::Matrix2d> offset_blocks(int n, const BlockFn& block);

} // namespace serial

namespace parallel {

Eigen::VectorXd nonlinear_load(const FemFunction& w, const FemFunction& u, int pts);
Eigen::VectorXd projection_load(const RealFn& f, const Grid& grid, int pts);
double cubic_integral(const FemFunction& u, int pts);
std::vector<Eigen::Matrix2d> offset_blocks(int n, const BlockFn& block);

} // namespace parallel

/// Number of OpenMP threads the parallel kernels will use.
int max_threads();
void set_threads(int n);

} // namespace fkdv::kernels
