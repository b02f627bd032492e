#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace fkdv {

/// Interleaved real-to-complex FFT of `channels` sequences of length n.
/// Input layout: in[i*channels + c]; output: out[r*channels + c], r = 0..n/2.
/// Forward uses exp(-2 pi i r b / n); backward is unnormalized.
class RealFft {
public:
  RealFft(int n, int channels);

  int size() const noexcept { return n_; }
  int channels() const noexcept { return channels_; }
  int spectrum_size() const noexcept { return n_ / 2 + 1; }

  void forward(const double* in, std::complex<double>* out) const;
  /// Destroys the contents of `in`.
  void backward(std::complex<double>* in, double* out) const;

private:
  int n_;
  int channels_;
  void* forward_plan_;
  void* backward_plan_;
};

/// 2x2-block circulant matrix over N periodic nodes. blocks()[m](s, t) is the entry
/// pairing row dof (a, s) with column dof (a + m mod N, t), for every node a.
class BlockCirculant {
public:
  BlockCirculant() = default;
  explicit BlockCirculant(std::vector<Eigen::Matrix2d> blocks);

  int n_nodes() const noexcept { return static_cast<int>(blocks_.size()); }
  const Eigen::Matrix2d& block(int m) const { return blocks_[static_cast<std::size_t>(m)]; }
  const std::vector<Eigen::Matrix2d>& blocks() const noexcept { return blocks_; }

  /// FFT-based product, O(N log N).
  Eigen::VectorXd apply(const Eigen::VectorXd& c) const;
  /// Offset convolution without FFT; O(N * nonzero offsets).
  Eigen::VectorXd apply_direct(const Eigen::VectorXd& c) const;
  /// Dense 2N x 2N materialization.
  Eigen::MatrixXd dense() const;

  /// Block symbols sum_m B(m) exp(+2 pi i r m / N) for r = 0..N/2.
  const std::vector<Eigen::Matrix2cd>& symbols() const noexcept { return symbols_; }

  /// a * this + b * other.
  BlockCirculant combine(double a, const BlockCirculant& other, double b) const;

  /// Frobenius norm of the full 2N x 2N matrix.
  double frobenius_norm() const;

private:
  void compute_symbols();

  std::vector<Eigen::Matrix2d> blocks_;
  std::vector<Eigen::Matrix2cd> symbols_;
  std::vector<int> nonzero_;
};

/// Direct solver for a block-circulant system via per-frequency 2x2 inverses.
class CirculantSolver {
public:
  explicit CirculantSolver(const BlockCirculant& matrix);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  int n_nodes() const noexcept { return n_; }

private:
  int n_;
  std::vector<Eigen::Matrix2cd> inverses_;
};

} // namespace fkdv
