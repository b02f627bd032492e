#include "fkdv/block_circulant.hpp"
#include "fkdv/errors.hpp"

#include <doctest.h>

#include <random>

using namespace fkdv;

namespace {

std::vector<Eigen::Matrix2d> random_blocks(int n, unsigned seed, bool sparse = false) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<Eigen::Matrix2d> b(static_cast<std::size_t>(n), Eigen::Matrix2d::Zero());
  for (int m = 0; m < n; ++m) {
    if (sparse && m > 1 && m < n - 1)
      continue;
    for (int i = 0; i < 4; ++i)
      b[static_cast<std::size_t>(m)](i / 2, i % 2) = nd(rng);
  }
  return b;
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = nd(rng);
  return v;
}

} // namespace

TEST_CASE("dense layout follows the offset convention") {
  const int n = 5;
  const BlockCirculant c(random_blocks(n, 1));
  const Eigen::MatrixXd d = c.dense();
  for (int a = 0; a < n; ++a)
    for (int m = 0; m < n; ++m)
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
          CHECK(d(2 * a + s, 2 * ((a + m) % n) + t) == c.block(m)(s, t));
}

TEST_CASE("FFT product, direct product and dense product agree") {
  for (int n : {4, 7, 16, 33}) {
    const BlockCirculant c(random_blocks(n, 2 + n));
    const Eigen::VectorXd x = random_vector(2 * n, 3);
    const Eigen::VectorXd ref = c.dense() * x;
    CHECK((c.apply(x) - ref).norm() <= 1e-12 * ref.norm());
    CHECK((c.apply_direct(x) - ref).norm() <= 1e-13 * ref.norm());
  }
}

TEST_CASE("direct product skips zero offsets") {
  const BlockCirculant c(random_blocks(64, 5, true));
  const Eigen::VectorXd x = random_vector(128, 6);
  CHECK((c.apply_direct(x) - c.dense() * x).norm() <= 1e-13 * x.norm());
}

TEST_CASE("solver inverts the matrix") {
  for (int n : {4, 9, 32}) {
    auto b = random_blocks(n, 10 + n);
    b[0] += 8.0 * Eigen::Matrix2d::Identity() * n;
    const BlockCirculant c(b);
    const Eigen::VectorXd rhs = random_vector(2 * n, 4);
    const Eigen::VectorXd x = CirculantSolver(c).solve(rhs);
    CHECK((c.dense() * x - rhs).norm() <= 1e-12 * rhs.norm());
  }
}

TEST_CASE("singular symbol is reported") {
  std::vector<Eigen::Matrix2d> b(8, Eigen::Matrix2d::Zero());
  b[0] = Eigen::Matrix2d::Identity();
  b[1] = -Eigen::Matrix2d::Identity(); // annihilates constants
  CHECK_THROWS_AS(CirculantSolver{BlockCirculant(b)}, SingularMatrixError);
}

TEST_CASE("combine and frobenius norm") {
  const BlockCirculant a(random_blocks(6, 20)), b(random_blocks(6, 21));
  const BlockCirculant c = a.combine(2.0, b, -0.5);
  CHECK((c.dense() - (2.0 * a.dense() - 0.5 * b.dense())).norm() < 1e-13);
  CHECK(a.frobenius_norm() == doctest::Approx(a.dense().norm()).epsilon(1e-14));
}

TEST_CASE("empty block list is rejected") { CHECK_THROWS_AS(BlockCirculant(std::vector<Eigen::Matrix2d>{}), ConfigError); }

TEST_CASE("real FFT round trip") {
  const int n = 12, ch = 3;
  const RealFft fft(n, ch);
  Eigen::VectorXd x = random_vector(n * ch, 8);
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(fft.spectrum_size() * ch));
  fft.forward(x.data(), spec.data());
  Eigen::VectorXd back(n * ch);
  fft.backward(spec.data(), back.data());
  CHECK((back / n - x).norm() < 1e-13 * x.norm());
}
