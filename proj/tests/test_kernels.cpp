#include "fkdv/fem_space.hpp"
#include "fkdv/frac_assembly.hpp"
#include "fkdv/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fkdv;

namespace {

FemFunction random_function(const Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  FemFunction u(g);
  for (int i = 0; i < g.n_dofs(); ++i)
    u.coeffs()[i] = nd(rng);
  return u;
}

bool bit_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && std::equal(a.data(), a.data() + a.size(), b.data());
}

struct ThreadScope {
  int saved = kernels::max_threads();
  explicit ThreadScope(int n) { kernels::set_threads(n); }
  ~ThreadScope() { kernels::set_threads(saved); }
};

} // namespace

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  for (int threads : {1, 2, 3, 5}) {
    ThreadScope scope(threads);
    for (int n : {4, 7, 64, 301}) {
      const Grid g(-2.0, 3.0, n);
      const FemFunction w = random_function(g, 1 + n), u = random_function(g, 2 + n);
      CHECK(bit_equal(kernels::serial::nonlinear_load(w, u, 8), kernels::parallel::nonlinear_load(w, u, 8)));
      auto f = [](double x) { return std::exp(-x * x) + std::sin(3 * x); };
      CHECK(bit_equal(kernels::serial::projection_load(f, g, 8), kernels::parallel::projection_load(f, g, 8)));
      CHECK(kernels::serial::cubic_integral(u, 8) == kernels::parallel::cubic_integral(u, 8));
    }
  }
}

TEST_CASE("parallel offset blocks match the serial loop") {
  ThreadScope scope(4);
  auto fn = [](int m) {
    Eigen::Matrix2d b;
    b << m, std::sin(m), std::cos(m), 1.0 / (m + 1);
    return b;
  };
  const auto s = kernels::serial::offset_blocks(37, fn);
  const auto p = kernels::parallel::offset_blocks(37, fn);
  REQUIRE(s.size() == p.size());
  for (std::size_t m = 0; m < s.size(); ++m)
    CHECK(s[m] == p[m]);
}

TEST_CASE("parallel assembly equals the serial assembly") {
  ThreadScope scope(3);
  const Grid g(0.0, 10.0, 40);
  for (auto kind : {OperatorKind::disp, OperatorKind::gram_half}) {
    const auto s = assemble_offset_blocks_serial(g, FractionalOrder(1.3), {}, kind);
    const auto p = assemble_offset_blocks(g, FractionalOrder(1.3), {}, kind);
    REQUIRE(s.size() == p.size());
    for (std::size_t m = 0; m < s.size(); ++m)
      CHECK(s[m] == p[m]);
  }
}

TEST_CASE("nonlinear load against direct quadrature") {
  // q_i = int ((w+u)/2)^2 v_i' ; with w = u = const c: q = c^2 int v_i' = 0
  const Grid g(0.0, 1.0, 8);
  FemFunction c(g);
  for (int j = 0; j < 8; ++j)
    c.coeffs()[2 * j] = 2.0;
  CHECK(kernels::serial::nonlinear_load(c, c, 8).norm() < 1e-14);
  // u = sin(2 pi x): int u^2 v' at the value dof of node j is -int 2 u u' v
  const auto u = hermite_interpolate([](double x) { return std::sin(2 * std::numbers::pi * x); },
                                     [](double x) { return 2 * std::numbers::pi * std::cos(2 * std::numbers::pi * x); },
                                     Grid(0.0, 1.0, 256));
  const auto q = kernels::serial::nonlinear_load(u, u, 8);
  // node 32 sits at x = 1/8; -int 2 u u' f ~ -2 u u' dx
  const double x = 0.125, pi2 = 2 * std::numbers::pi;
  const double expect = -2.0 * std::sin(pi2 * x) * pi2 * std::cos(pi2 * x) / 256.0;
  CHECK(q[64] == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("cubic integral of a constant") {
  const Grid g(0.0, 3.0, 6);
  FemFunction c(g);
  for (int j = 0; j < 6; ++j)
    c.coeffs()[2 * j] = 2.0;
  CHECK(kernels::parallel::cubic_integral(c, 8) == doctest::Approx(24.0));
}
