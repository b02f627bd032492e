#include "fkdv/errors.hpp"
#include "fkdv/reference_solutions.hpp"
#include "fkdv/spectral_oracle.hpp"
#include "fkdv/stepper.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fkdv;
using std::numbers::pi;

namespace {

Eigen::VectorXd sample(const SpectralGrid& g, auto&& f) {
  Eigen::VectorXd v(g.size());
  for (int j = 0; j < g.size(); ++j)
    v[j] = f(g.node(j));
  return v;
}

} // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(SpectralGrid(100, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(SpectralGrid(2, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(SpectralGrid(64, 1.0, 1.0), ConfigError);
  const SpectralGrid g(64, 0.0, 2 * pi);
  CHECK(g.wavenumber(3) == doctest::Approx(3.0));
  CHECK(g.wavenumber(32) == 0.0);
  CHECK_THROWS_AS(spectral_frac_apply(Eigen::VectorXd::Zero(32), 1.0, g), ConfigError);
}

TEST_CASE("symbol action on trigonometric data") {
  const SpectralGrid g(128, -pi, pi);
  const auto one = sample(g, [](double) { return 3.0; });
  CHECK(spectral_frac_apply(one, 1.5, g).cwiseAbs().maxCoeff() < 1e-13);
  for (double alpha : {1.0, 1.5, 1.999}) {
    for (int k : {1, 5, 17}) {
      const auto s = sample(g, [k](double x) { return std::sin(k * x); });
      const auto r = spectral_frac_apply(s, alpha, g);
      CHECK((r - std::pow(k, alpha) * s).cwiseAbs().maxCoeff() <= 1e-11 * std::pow(k, alpha));
    }
  }
  // alpha = 2 is -d^2/dx^2
  const auto u = sample(g, [](double x) { return std::exp(std::cos(x)); });
  const auto uxx = sample(g, [](double x) { return (std::sin(x) * std::sin(x) - std::cos(x)) * std::exp(std::cos(x)); });
  CHECK((spectral_frac_apply(u, 2.0, g) + uxx).cwiseAbs().maxCoeff() < 1e-11);
  // band-limited interpolation
  CHECK(spectral_eval(u, g, 0.123) == doctest::Approx(std::exp(std::cos(0.123))).epsilon(1e-13));
}

TEST_CASE("Parseval") {
  const SpectralGrid g(256, 0.0, 5.0);
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(256);
  for (int j = 0; j < 256; ++j)
    v[j] = nd(rng);
  const double direct = std::sqrt(v.squaredNorm() * 5.0 / 256);
  CHECK(spectral_l2_norm(v, g) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("zero data stays zero") {
  const SpectralGrid g(64, 0.0, 2 * pi);
  const auto r = spectral_reference_solve(Eigen::VectorXd::Zero(64), 1.5, 0.0, 1.0, g, 0.01);
  CHECK(r.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(spectral_reference_solve(Eigen::VectorXd::Zero(64), 1.5, 1.0, 0.0, g, 0.01), ConfigError);
  CHECK_THROWS_AS(spectral_reference_solve(Eigen::VectorXd::Zero(64), 1.5, 0.0, 1.0, g, 0.0), ConfigError);
}

TEST_CASE("alpha = 2 reproduces the KdV soliton") {
  const SpectralGrid g(1024, -15.0, 15.0);
  const auto u0 = sample(g, [](double x) { return kdv_one_soliton(x, -1.0); });
  const auto u1 = spectral_reference_solve(u0, 2.0, -1.0, 0.0, g, 1e-4);
  const auto ex = sample(g, [](double x) { return kdv_one_soliton(x, 0.0); });
  CHECK((u1 - ex).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("smooth sine: L2 drift and agreement with the Galerkin solution") {
  const SpectralGrid g(1 << 12, 0.0, 2 * pi);
  const auto u0 = sample(g, smooth_sin_data);
  const auto u1 = spectral_reference_solve(u0, 1.5, 0.0, 1.0, g, 2e-4);
  const double drift = std::abs(spectral_l2_norm(u1, g) - spectral_l2_norm(u0, g));
  CHECK(drift <= 1e-10); // measured 2.5e-13

  const Grid fg(0.0, 2 * pi, 1024);
  const auto ops = build_operators(fg, FractionalOrder(1.5));
  const auto uh = hermite_interpolate(smooth_sin_data, [](double x) { return 0.5 * std::cos(x); }, fg);
  const FemFunction fin = run(uh, 0.0, 1.0, ops, SchemeConfig{}).final_state();
  double num = 0.0, den = 0.0;
  for (int j = 0; j < 1024; ++j) {
    const double ref = u1[4 * j];
    num += (fin.coeffs()[2 * j] - ref) * (fin.coeffs()[2 * j] - ref);
    den += ref * ref;
  }
  CHECK(std::sqrt(num / den) <= 5e-3);
}

TEST_CASE("huge steps blow up") {
  const SpectralGrid g(256, 0.0, 2 * pi);
  const auto u0 = sample(g, [](double x) { return 5.0 * std::sin(x); });
  CHECK_THROWS_AS(spectral_reference_solve(u0, 1.5, 0.0, 100.0, g, 1.0), DivergenceError);
}
