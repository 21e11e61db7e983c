#pragma once

#include "lbd/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace lbd {

//! Density values on an increasing grid.
//!
//! `normalized` declares that the trapezoid integral over the grid is one
//! (to 1e-6). Analytic densities evaluated on a grid leave it unset.
struct DensityEstimate
{
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
  bool normalized = false;
};

//! `points` equally spaced values on [lo, hi].
inline Eigen::VectorXd
make_grid(double lo, double hi, Eigen::Index points)
{
  if (points < 2 || !(hi > lo) || lo < 0.0) {
    throw ConfigError("grid needs >= 2 points on [lo, hi] with 0 <= lo < hi");
  }
  return Eigen::VectorXd::LinSpaced(points, lo, hi);
}

//! Throws ConfigError unless `grid` is strictly increasing and nonnegative.
inline void
validate_grid(const Eigen::VectorXd& grid)
{
  if (grid.size() < 2) {
    throw ConfigError("grid needs at least 2 points");
  }
  if (grid(0) < 0.0) {
    throw ConfigError("grid must be nonnegative");
  }
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    if (!(grid(i) > grid(i - 1))) {
      throw ConfigError("grid must be strictly increasing");
    }
  }
}

//! Trapezoid rule on a (possibly nonuniform) grid.
template<typename DerivedX, typename DerivedY>
double
trapezoid(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y)
{
  const Eigen::Index n = x.size();
  if (n < 2) {
    return 0.0;
  }
  const auto dx = x.tail(n - 1) - x.head(n - 1);
  const auto mid = 0.5 * (y.tail(n - 1) + y.head(n - 1));
  return dx.dot(mid);
}

//! Rescales `values` so that the trapezoid integral over `grid` is one.
inline DensityEstimate
normalize_on_grid(Eigen::VectorXd grid, Eigen::VectorXd values)
{
  const double mass = trapezoid(grid, values);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw NumericalError("density has no mass on the evaluation grid");
  }
  values /= mass;
  return DensityEstimate{ std::move(grid), std::move(values), true };
}

} // namespace lbd
