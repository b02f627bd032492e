#include "fkdv/kernels.hpp"

#include "kernels_common.hpp"

#include <omp.h>

#include <exception>
#include <mutex>

namespace fkdv::kernels {

int max_threads() { return omp_get_max_threads(); }
void set_threads(int n) { omp_set_num_threads(n > 0 ? n : 1); }

namespace parallel {
namespace {

// Node j collects the left half of element j and the right half of element j-1,
// in the same order as the serial scatter loop.
Eigen::VectorXd gather(const std::vector<std::array<double, 4>>& local, int n) {
  Eigen::VectorXd out(2 * n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    const auto& own = local[static_cast<std::size_t>(j)];
    const auto& prev = local[static_cast<std::size_t>((j + n - 1) % n)];
    out[2 * j] = (0.0 + own[0]) + prev[2];
    out[2 * j + 1] = (0.0 + own[1]) + prev[3];
  }
  return out;
}

// Exceptions must not leave an OpenMP region; keep the one from the lowest index
// so the error matches the serial loop.
class FirstError {
public:
  template <class F> void guard(int i, F&& body) {
    try {
      body();
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!err_ || i < index_) {
        err_ = std::current_exception();
        index_ = i;
      }
    }
  }
  void rethrow() const {
    if (err_)
      std::rethrow_exception(err_);
  }

private:
  std::mutex mu_;
  std::exception_ptr err_;
  int index_ = 0;
};

} // namespace

Eigen::VectorXd nonlinear_load(const FemFunction& w, const FemFunction& u, int pts) {
  const int n = u.grid().n_elems();
  const detail::ElementTable tab(pts);
  std::vector<std::array<double, 4>> local(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (int e = 0; e < n; ++e)
    local[static_cast<std::size_t>(e)] = detail::nonlinear_local(tab, w.coeffs(), u.coeffs(), e, n);
  return gather(local, n);
}

Eigen::VectorXd projection_load(const RealFn& f, const Grid& grid, int pts) {
  const int n = grid.n_elems();
  const detail::ElementTable tab(pts);
  std::vector<std::array<double, 4>> local(static_cast<std::size_t>(n));
  FirstError err;
#pragma omp parallel for schedule(static)
  for (int e = 0; e < n; ++e)
    err.guard(e, [&] { local[static_cast<std::size_t>(e)] = detail::projection_local(tab, f, grid, e); });
  err.rethrow();
  return gather(local, n);
}

double cubic_integral(const FemFunction& u, int pts) {
  const int n = u.grid().n_elems();
  const detail::ElementTable tab(pts);
  std::vector<double> local(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (int e = 0; e < n; ++e)
    local[static_cast<std::size_t>(e)] = detail::cubic_local(tab, u.coeffs(), e, n, u.grid().dx());
  // fixed-order reduction keeps the result schedule independent
  double s = 0.0;
  for (double v : local)
    s += v;
  return s;
}

std::vector<Eigen::Matrix2d> offset_blocks(int n, const BlockFn& block) {
  std::vector<Eigen::Matrix2d> out(static_cast<std::size_t>(n));
  FirstError err;
#pragma omp parallel for schedule(dynamic, 16)
  for (int m = 0; m < n; ++m)
    err.guard(m, [&] { out[static_cast<std::size_t>(m)] = block(m); });
  err.rethrow();
  return out;
}

} // namespace parallel
} // namespace fkdv::kernels
