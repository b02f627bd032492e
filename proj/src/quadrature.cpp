#include "fkdv/quadrature.hpp"

#include "fkdv/errors.hpp"

#include <gsl/gsl_integration.h>

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace fkdv {

GaussLegendre::GaussLegendre(int points) {
  if (points < 1)
    throw ConfigError("Gauss-Legendre rule needs at least one point");
  gsl_integration_glfixed_table* table =
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(points));
  if (table == nullptr)
    throw ConfigError("cannot build Gauss-Legendre rule with " + std::to_string(points) + " points");
  nodes_.resize(static_cast<std::size_t>(points));
  weights_.resize(static_cast<std::size_t>(points));
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    gsl_integration_glfixed_point(0.0, 1.0, i, &nodes_[i], &weights_[i], table);
  gsl_integration_glfixed_table_free(table);
}

const GaussLegendre& gauss_legendre(int points) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[points];
  if (!slot)
    slot = std::make_unique<GaussLegendre>(points);
  return *slot;
}

void QuadratureSpec::validate() const {
  if (inner_pts < 4)
    throw ConfigError("inner_pts must be >= 4 to integrate products of cubics exactly");
  if (pv_pts < 2)
    throw ConfigError("pv_pts must be >= 2");
  if (!(near_split > 0.0))
    throw ConfigError("near_split must be positive");
  if (!(image_tail_tol > 0.0))
    throw ConfigError("image_tail_tol must be positive");
  if (max_images < 4)
    throw ConfigError("max_images must be >= 4");
}

} // namespace fkdv
