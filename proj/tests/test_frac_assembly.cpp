#include "fkdv/errors.hpp"
#include "fkdv/frac_assembly.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

using namespace fkdv;
using std::numbers::pi;

namespace {

double rel_diff(const OffsetBlocks& a, const OffsetBlocks& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    num += (a[m] - b[m]).squaredNorm();
    den += b[m].squaredNorm();
  }
  return std::sqrt(num / den);
}

Eigen::VectorXd constant_coeffs(int n) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n);
  for (int j = 0; j < n; ++j)
    c[2 * j] = 1.0;
  return c;
}

// v_i evaluated at x on the periodic grid (dof i = 2*node + shape)
double basis(int i, double x, const Grid& g) {
  const double y = (g.wrap(x - g.node(i / 2) + 0.5 * g.length()) - g.a() - 0.5 * g.length()) / g.dx();
  return i % 2 ? shape_g(y) : shape_f(y);
}

} // namespace

TEST_CASE("fractional order range") {
  CHECK_NOTHROW(FractionalOrder(1.0));
  CHECK_NOTHROW(FractionalOrder(1.999));
  CHECK_THROWS_AS(FractionalOrder(2.0), ConfigError);
  CHECK_THROWS_AS(FractionalOrder(0.99), ConfigError);
  CHECK_THROWS_AS(FractionalOrder(std::numeric_limits<double>::quiet_NaN()), ConfigError);
}

TEST_CASE("normalization constant") {
  // 2^a Gamma((1+a)/2) / (sqrt(pi) |Gamma(-a/2)|), evaluated independently
  CHECK(frac_constant(FractionalOrder(1.0)) == doctest::Approx(1.0 / pi).epsilon(1e-14));
  CHECK(frac_constant(FractionalOrder(1.5)) == doctest::Approx(0.2992067103010746).epsilon(1e-14));
  CHECK(frac_constant(FractionalOrder(1.999)) == doctest::Approx(0.00099907742775566543).epsilon(1e-12));
}

TEST_CASE("assembled blocks match an independent Fourier-series evaluation") {
  // alpha = 1.5, N = 16 on [0, 16); closed-form shape transforms summed over 8e6 modes
  const Grid g(0.0, 16.0, 16);
  const FractionalOrder a(1.5);
  const auto G = assemble_offset_blocks(g, a, {}, OperatorKind::gram_half);
  const auto D = assemble_offset_blocks(g, a, {}, OperatorKind::disp);
  Eigen::Matrix2d g0, g1, g3, d0, d1, d3;
  g0 << 1.5500835329023643, 0.0, 0.0, 0.12974754369205424;
  g1 << -0.6428235600689587, 0.012501202151001726, -0.012501202151001724, -0.02739648291226358;
  g3 << -0.0230884172026507, 0.0013320889389571437, -0.0013320889389571507, 0.00011184610495702376;
  d0 << 0.0, 1.070417875622828, -1.070417875622828, 0.0;
  d1 << 0.4526997950098541, -0.5625052657518622, 0.5625052657518622, -0.22432331077363024;
  d3 << -0.02086334729387148, 0.0017925322430075645, -0.0017925322430075714, 0.0001930419458900454;
  CHECK((G[0] - g0).norm() <= 1e-11 * g0.norm());
  CHECK((G[1] - g1).norm() <= 1e-11 * g0.norm());
  CHECK((G[3] - g3).norm() <= 1e-11 * g0.norm());
  CHECK((D[0] - d0).norm() <= 1e-11 * d0.norm());
  CHECK((D[1] - d1).norm() <= 1e-11 * d0.norm());
  CHECK((D[3] - d3).norm() <= 1e-11 * d0.norm());
}

TEST_CASE("Gram matrix against a naive quadrature of v_i times the pointwise operator") {
  // O(N^2) oracle: graded Gauss-Legendre over the support of v_i, pointwise D^a v_j
  const Grid g(0.0, 16.0, 16);
  const FractionalOrder a(1.5);
  const auto G = assemble_offset_blocks(g, a, {}, OperatorKind::gram_half);
  const auto& gl = gauss_legendre(16);
  auto integrate_element = [&](int i, int j, double lo, double hi) {
    // geometric grading toward both ends, where D^a v_j has kinks
    double sum = 0.0;
    for (int side = 0; side < 2; ++side) {
      double w = 0.5 * (hi - lo);
      for (int level = 0; level < 40; ++level) {
        const double inner = w * 0.5;
        double p0, p1;
        if (side == 0) {
          p0 = lo + inner;
          p1 = lo + w;
        } else {
          p0 = hi - w;
          p1 = hi - inner;
        }
        if (level == 39) {
          if (side == 0)
            p0 = lo;
          else
            p1 = hi;
        }
        sum += gl.integrate([&](double x) { return basis(i, x, g) * pv_frac_laplacian_basis(j, x, g, a); }, p0, p1);
        w = inner;
      }
    }
    return sum;
  };
  for (int m : {0, 1, 2, 5, 8}) {
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) {
        const int i = s, j = 2 * m + t;
        // v_i lives on the elements left and right of node 0
        const double naive = integrate_element(i, j, g.b() - g.dx(), g.b()) + integrate_element(i, j, 0.0, g.dx());
        CHECK(std::abs(naive - G[static_cast<std::size_t>(m)](s, t)) <= 1e-10 * G[0].norm());
      }
  }
}

TEST_CASE("structural properties for several orders") {
  for (double av : {1.0, 1.3, 1.5, 1.999}) {
    CAPTURE(av);
    const Grid g(-3.0, 5.0, 48);
    const FractionalOrder a(av);
    const OperatorMatrices ops = build_operators(g, a);
    const Eigen::MatrixXd M = ops.dense(OperatorKind::mass);
    const Eigen::MatrixXd D = ops.dense(OperatorKind::disp);
    const Eigen::MatrixXd G = ops.dense(OperatorKind::gram_half);
    CHECK((D + D.transpose()).norm() <= 1e-10 * D.norm());
    CHECK((G - G.transpose()).norm() <= 1e-10 * G.norm());
    CHECK((M - M.transpose()).norm() == 0.0);
    const auto em = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues();
    CHECK(em.minCoeff() > 0.0);
    const auto eg = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues();
    CHECK(eg.minCoeff() >= -1e-10 * eg.maxCoeff());
    const Eigen::VectorXd one = constant_coeffs(48);
    CHECK((G * one).norm() <= 1e-10 * G.norm() * one.norm());
    CHECK((D * one).norm() <= 1e-10 * D.norm() * one.norm());
    // the kernel of G is exactly the constants
    CHECK(eg[1] > 1e-8 * eg.maxCoeff());
  }
}

TEST_CASE("real-space and spectral assembly agree at N = 64") {
  for (double av : {1.0, 1.5, 1.999}) {
    CAPTURE(av);
    const Grid g(-15.0, 15.0, 64);
    const FractionalOrder a(av);
    for (auto kind : {OperatorKind::disp, OperatorKind::gram_half}) {
      const auto rs = assemble_offset_blocks(g, a, {}, kind);
      const auto sp = assemble_offset_blocks_spectral(g, a, kind);
      CHECK(rel_diff(rs, sp) <= 1e-6);
    }
    const auto dense = assemble_dispersion_spectral(g, a);
    const OperatorMatrices ops = build_operators(g, a);
    CHECK((dense - ops.dense(OperatorKind::disp)).norm() <= 1e-6 * dense.norm());
  }
}

TEST_CASE("Galerkin forms reproduce the Fourier symbol on a single mode") {
  const Grid g(0.0, 2 * pi, 128);
  for (double av : {1.0, 1.5, 1.999}) {
    CAPTURE(av);
    const OperatorMatrices ops = build_operators(g, FractionalOrder(av));
    for (double k : {1.0, 3.0}) {
      const auto s = hermite_interpolate([k](double x) { return std::sin(k * x); },
                                         [k](double x) { return k * std::cos(k * x); }, g);
      const auto c = hermite_interpolate([k](double x) { return std::cos(k * x); },
                                         [k](double x) { return -k * std::sin(k * x); }, g);
      const double energy = s.coeffs().dot(ops.gram_half.apply(s.coeffs()));
      CHECK(energy == doctest::Approx(std::pow(k, av) * pi).epsilon(1e-5));
      // <D^a d/dx cos, sin> = -k^{a+1} pi
      const double cross = s.coeffs().dot(ops.disp.apply(c.coeffs()));
      CHECK(cross == doctest::Approx(-std::pow(k, av + 1) * pi).epsilon(1e-5));
    }
  }
}

TEST_CASE("pointwise principal value reproduces the symbol on sin(kx)") {
  for (double av : {1.0, 1.5, 1.999}) {
    for (double k : {1.0, 2.0, 3.0}) {
      CAPTURE(av);
      CAPTURE(k);
      for (double x : {-1.1, 0.0, 0.4, 2.5}) {
        const double got = pv_frac_laplacian([k](double y) { return std::sin(k * y); }, x, FractionalOrder(av));
        CHECK(std::abs(got - std::pow(k, av) * std::sin(k * x)) <= 1e-4 * std::pow(k, av));
      }
    }
  }
}

TEST_CASE("pointwise basis operator annihilates constants and decays") {
  const Grid g(0.0, 10.0, 20);
  const FractionalOrder a(1.5);
  for (double x : {0.0, 0.26, 3.7, 9.999}) {
    double sum = 0.0, scale = 0.0;
    for (int j = 0; j < 20; ++j) {
      const double v = pv_frac_laplacian_basis(2 * j, x, g, a);
      sum += v;
      scale += std::abs(v);
    }
    CHECK(std::abs(sum) <= 1e-12 * scale);
  }
  // off the support only the -int v(y) |x - y|^{-1-a} part remains
  CHECK(pv_frac_laplacian_basis(0, 5.0, g, a) < 0.0);
  CHECK_THROWS_AS(pv_frac_laplacian_basis(40, 1.0, g, a), ConfigError);
}

TEST_CASE("pointwise basis operator matches direct quadrature away from the support") {
  const Grid g(0.0, 40.0, 40); // dx = 1, images far away
  const FractionalOrder a(1.3);
  const double x = 3.5;
  const auto& gl = gauss_legendre(20);
  double direct = 0.0;
  for (int k = -200; k <= 200; ++k)
    for (double lo : {-1.0, 0.0})
      direct += gl.integrate([&](double y) { return -shape_f(y) * std::pow(std::abs(x - y - 40.0 * k), -2.3); },
                             lo, lo + 1.0);
  // remaining images as point masses (int f = 1)
  for (int k = 201; k < 200000; ++k)
    direct -= std::pow(x + 40.0 * k, -2.3) + std::pow(40.0 * k - x, -2.3);
  CHECK(pv_frac_laplacian_basis(0, x, g, a) ==
        doctest::Approx(frac_constant(a) * direct).epsilon(1e-6));
}

TEST_CASE("quadrature failures and refusals") {
  const Grid g(0.0, 1.0, 64);
  CHECK_THROWS_AS(assemble_offset_blocks_spectral(g, FractionalOrder(1.5), OperatorKind::disp, 128, 1e-8),
                  QuadratureError);
  CHECK_THROWS_AS(assemble_offset_blocks_spectral(g, FractionalOrder(1.5), OperatorKind::disp, 32), ConfigError);
  QuadratureSpec tight;
  tight.image_tail_tol = 1e-300;
  tight.max_images = 4;
  CHECK_THROWS_AS(assemble_offset_blocks(Grid(0.0, 1.0, 8), FractionalOrder(1.5), tight, OperatorKind::disp),
                  QuadratureError);
  const OperatorMatrices ops = build_operators(Grid(0.0, 1.0, 16), FractionalOrder(1.5));
  CHECK_THROWS_AS(ops.dense(OperatorKind::disp, 8), ConfigError);
  CHECK_THROWS_AS(materialize(Grid(0.0, 1.0, 16), FractionalOrder(1.5), {}, {}, {}), ConfigError);
}

TEST_CASE("spectral backend through build_operators") {
  const Grid g(0.0, 2 * pi, 32);
  AssemblyOptions opt;
  opt.backend = AssemblyBackend::spectral;
  const auto sp = build_operators(g, FractionalOrder(1.5), opt);
  const auto rs = build_operators(g, FractionalOrder(1.5));
  CHECK(rel_diff(sp.disp.blocks(), rs.disp.blocks()) <= 1e-6);
  CHECK(rel_diff(sp.mass.blocks(), rs.mass.blocks()) <= 1e-12);
}

TEST_CASE("names") {
  CHECK(to_string(OperatorKind::gram_half) == "gram_half");
  CHECK(to_string(AssemblyBackend::spectral) == "spectral");
}
