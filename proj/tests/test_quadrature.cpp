#include "fkdv/errors.hpp"
#include "fkdv/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace fkdv;

TEST_CASE("gauss-legendre is exact up to degree 2n-1") {
  for (int n : {1, 2, 4, 7, 16}) {
    const auto& gl = gauss_legendre(n);
    CHECK(gl.size() == n);
    double wsum = 0.0;
    for (double w : gl.weights())
      wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      const double got = gl.integrate([p](double x) { return std::pow(x, p); }, -1.0, 2.0);
      const double want = (std::pow(2.0, p + 1) - std::pow(-1.0, p + 1)) / (p + 1);
      CHECK(got == doctest::Approx(want).epsilon(1e-13));
    }
  }
}

TEST_CASE("gauss-legendre nodes lie inside the unit interval, sorted") {
  const auto& gl = gauss_legendre(9);
  for (int i = 0; i < gl.size(); ++i) {
    CHECK(gl.node(i) > 0.0);
    CHECK(gl.node(i) < 1.0);
    if (i > 0)
      CHECK(gl.node(i) > gl.node(i - 1));
  }
}

TEST_CASE("cached rules are shared") { CHECK(&gauss_legendre(5) == &gauss_legendre(5)); }

TEST_CASE("rule size must be positive") { CHECK_THROWS_AS(GaussLegendre(0), ConfigError); }

TEST_CASE("quadrature spec validation") {
  QuadratureSpec q;
  CHECK_NOTHROW(q.validate());
  q.inner_pts = 3; // products of cubics need 4 points
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q = {};
  q.near_split = 0.0;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q = {};
  q.pv_pts = 0;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q = {};
  q.image_tail_tol = 0.0;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q = {};
  q.max_images = 3;
  CHECK_THROWS_AS(q.validate(), ConfigError);
}
