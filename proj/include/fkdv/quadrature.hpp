#pragma once

#include <cstddef>
#include <vector>

namespace fkdv {

/// Gauss-Legendre rule mapped to the unit interval [0, 1].
class GaussLegendre {
public:
  explicit GaussLegendre(int points);

  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Integral of f over [lo, hi].
  template <class F> double integrate(F&& f, double lo, double hi) const {
    const double len = hi - lo;
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      sum += weights_[i] * f(lo + len * nodes_[i]);
    return sum * len;
  }

private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Cached rule for a given number of points. Thread-safe.
const GaussLegendre& gauss_legendre(int points);

/// Quadrature parameters shared by projection loads and the fractional operator.
struct QuadratureSpec {
  int inner_pts = 8;            ///< element inner-product rule
  int pv_pts = 7;               ///< points per principal-value panel
  double near_split = 1.0;      ///< near-field radius in units of dx
  double image_tail_tol = 1e-12;
  int max_images = 64;          ///< cap on the multipole order of the image sum

  /// Throws ConfigError when a field violates its invariant.
  void validate() const;
};

} // namespace fkdv
