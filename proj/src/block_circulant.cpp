#include "fkdv/block_circulant.hpp"

#include "fkdv/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <string>
#include <mutex>
#include <utility>

namespace fkdv {
namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

PlanPair plans_for(int n, int channels) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find({n, channels});
  if (it != cache.end())
    return it->second;
  const int nc = n / 2 + 1;
  double* rbuf = fftw_alloc_real(static_cast<std::size_t>(n * channels));
  fftw_complex* cbuf = fftw_alloc_complex(static_cast<std::size_t>(nc * channels));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_many_dft_r2c(1, &n, channels, rbuf, nullptr, channels, 1, cbuf, nullptr,
                                     channels, 1, flags);
  p.backward = fftw_plan_many_dft_c2r(1, &n, channels, cbuf, nullptr, channels, 1, rbuf, nullptr,
                                      channels, 1, flags | FFTW_DESTROY_INPUT);
  fftw_free(rbuf);
  fftw_free(cbuf);
  cache.emplace(std::make_pair(n, channels), p);
  return p;
}

} // namespace

RealFft::RealFft(int n, int channels) : n_(n), channels_(channels) {
  if (n < 1 || channels < 1)
    throw ConfigError("RealFft needs positive size and channel count");
  const PlanPair p = plans_for(n, channels);
  forward_plan_ = p.forward;
  backward_plan_ = p.backward;
}

void RealFft::forward(const double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFft::backward(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_plan_), reinterpret_cast<fftw_complex*>(in),
                       out);
}

BlockCirculant::BlockCirculant(std::vector<Eigen::Matrix2d> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty())
    throw ConfigError("BlockCirculant needs at least one block");
  for (int m = 0; m < n_nodes(); ++m)
    if (blocks_[static_cast<std::size_t>(m)].cwiseAbs().maxCoeff() != 0.0)
      nonzero_.push_back(m);
  compute_symbols();
}

void BlockCirculant::compute_symbols() {
  const int n = n_nodes();
  RealFft fft(n, 4);
  std::vector<double> in(static_cast<std::size_t>(4 * n));
  for (int m = 0; m < n; ++m) {
    const auto& b = blocks_[static_cast<std::size_t>(m)];
    in[4 * m + 0] = b(0, 0);
    in[4 * m + 1] = b(0, 1);
    in[4 * m + 2] = b(1, 0);
    in[4 * m + 3] = b(1, 1);
  }
  std::vector<std::complex<double>> out(static_cast<std::size_t>(4 * fft.spectrum_size()));
  fft.forward(in.data(), out.data());
  symbols_.resize(static_cast<std::size_t>(fft.spectrum_size()));
  for (int r = 0; r < fft.spectrum_size(); ++r) {
    auto& s = symbols_[static_cast<std::size_t>(r)];
    // conj turns the forward sign into exp(+2 pi i r m / N)
    s(0, 0) = std::conj(out[4 * r + 0]);
    s(0, 1) = std::conj(out[4 * r + 1]);
    s(1, 0) = std::conj(out[4 * r + 2]);
    s(1, 1) = std::conj(out[4 * r + 3]);
  }
}

Eigen::VectorXd BlockCirculant::apply(const Eigen::VectorXd& c) const {
  const int n = n_nodes();
  if (c.size() != 2 * n)
    throw ConfigError("BlockCirculant::apply: size mismatch");
  RealFft fft(n, 2);
  const int nc = fft.spectrum_size();
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(2 * nc));
  fft.forward(c.data(), spec.data());
  for (int r = 0; r < nc; ++r) {
    const Eigen::Vector2cd x(spec[2 * r], spec[2 * r + 1]);
    const Eigen::Vector2cd y = symbols_[static_cast<std::size_t>(r)] * x;
    spec[2 * r] = y[0];
    spec[2 * r + 1] = y[1];
  }
  Eigen::VectorXd out(2 * n);
  fft.backward(spec.data(), out.data());
  out /= static_cast<double>(n);
  return out;
}

Eigen::VectorXd BlockCirculant::apply_direct(const Eigen::VectorXd& c) const {
  const int n = n_nodes();
  if (c.size() != 2 * n)
    throw ConfigError("BlockCirculant::apply_direct: size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
  for (int a = 0; a < n; ++a) {
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    for (int m : nonzero_) {
      const int b = (a + m) % n;
      acc += blocks_[static_cast<std::size_t>(m)] * c.segment<2>(2 * b);
    }
    out.segment<2>(2 * a) = acc;
  }
  return out;
}

Eigen::MatrixXd BlockCirculant::dense() const {
  const int n = n_nodes();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int a = 0; a < n; ++a)
    for (int m : nonzero_) {
      const int b = (a + m) % n;
      d.block<2, 2>(2 * a, 2 * b) = blocks_[static_cast<std::size_t>(m)];
    }
  return d;
}

BlockCirculant BlockCirculant::combine(double a, const BlockCirculant& other, double b) const {
  if (other.n_nodes() != n_nodes())
    throw ConfigError("BlockCirculant::combine: size mismatch");
  std::vector<Eigen::Matrix2d> out(blocks_.size());
  for (std::size_t m = 0; m < blocks_.size(); ++m)
    out[m] = a * blocks_[m] + b * other.blocks_[m];
  return BlockCirculant(std::move(out));
}

double BlockCirculant::frobenius_norm() const {
  double s = 0.0;
  for (const auto& b : blocks_)
    s += b.squaredNorm();
  return std::sqrt(s * n_nodes());
}

CirculantSolver::CirculantSolver(const BlockCirculant& matrix) : n_(matrix.n_nodes()) {
  const auto& sym = matrix.symbols();
  inverses_.resize(sym.size());
  for (std::size_t r = 0; r < sym.size(); ++r) {
    const Eigen::Matrix2cd& s = sym[r];
    const std::complex<double> det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    const double scale = s.cwiseAbs().maxCoeff();
    if (!(std::abs(det) > 1e-14 * scale * scale))
      throw SingularMatrixError("block-circulant symbol is singular at frequency " +
                                std::to_string(r));
    Eigen::Matrix2cd inv;
    inv << s(1, 1), -s(0, 1), -s(1, 0), s(0, 0);
    inverses_[r] = inv / det;
  }
}

Eigen::VectorXd CirculantSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != 2 * n_)
    throw ConfigError("CirculantSolver::solve: size mismatch");
  RealFft fft(n_, 2);
  const int nc = fft.spectrum_size();
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(2 * nc));
  fft.forward(rhs.data(), spec.data());
  for (int r = 0; r < nc; ++r) {
    const Eigen::Vector2cd y(spec[2 * r], spec[2 * r + 1]);
    const Eigen::Vector2cd x = inverses_[static_cast<std::size_t>(r)] * y;
    spec[2 * r] = x[0];
    spec[2 * r + 1] = x[1];
  }
  Eigen::VectorXd out(2 * n_);
  fft.backward(spec.data(), out.data());
  out /= static_cast<double>(n_);
  return out;
}

} // namespace fkdv
