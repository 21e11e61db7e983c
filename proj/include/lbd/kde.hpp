#pragma once

#include "lbd/density_estimate.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace lbd {

enum class BandwidthMethod
{
  sj_average,
  plugin,
  ste,
  silverman_fallback,
  manual
};

std::string to_string(BandwidthMethod m);

struct Bandwidth
{
  double h = 1.0;
  BandwidthMethod method = BandwidthMethod::manual;
};

//! n / sum_i 1/y_i. Throws DataError for empty data or a nonpositive entry.
double harmonic_mean(const Eigen::VectorXd& data);

//! Kernel weights of the indirect-data estimator: mu_hat / (n y_j).
Eigen::VectorXd jones_weights(const Eigen::VectorXd& data);

//! n^-1 sum_j N(y | y_j, h^2) restricted to y >= 0, renormalized on `grid`.
DensityEstimate classical_kde(const Eigen::VectorXd& data, const Bandwidth& h,
                              const Eigen::VectorXd& grid);

//! n^-1 mu_hat sum_j y_j^-1 N(y | y_j, h^2) restricted to y >= 0,
//! renormalized on `grid`. Throws DataError for a nonpositive datum.
DensityEstimate jones_kde(const Eigen::VectorXd& data, const Bandwidth& h,
                          const Eigen::VectorXd& grid);

//! Weighted Gaussian KDE on a grid with nonnegative `weights` summing to one.
//! Not renormalized.
Eigen::VectorXd gaussian_kde_values(const Eigen::VectorXd& data,
                                    const Eigen::VectorXd& weights, double h,
                                    const Eigen::VectorXd& grid);

namespace bandwidth {

//! min(sd, IQR / 1.349), with the type-7 sample quantiles.
double robust_scale(const Eigen::VectorXd& x);

//! 0.9 min(sd, IQR/1.34) n^(-1/5).
double silverman(const Eigen::VectorXd& x);

//! Kernel estimates of the density functionals psi_4 and psi_6 at pilot
//! bandwidth g, using all pairs including the diagonal.
double psi4(const Eigen::VectorXd& x, double g);
double psi6(const Eigen::VectorXd& x, double g);

//! Sheather–Jones direct plug-in. Empty when a pilot functional has the
//! wrong sign.
std::optional<double> sj_plugin(const Eigen::VectorXd& x);

//! Sheather–Jones solve-the-equation, bracketed bisection to relative
//! tolerance `rel_tol`. Empty when no bracket can be found.
std::optional<double> sj_ste(const Eigen::VectorXd& x, double rel_tol = 1e-6);

} // namespace bandwidth

//! Mean of the plug-in and solve-the-equation bandwidths; Silverman's rule
//! (method = silverman_fallback) when either is unavailable. Requires n >= 3;
//! throws DataError for zero variance.
Bandwidth select_bandwidth(const Eigen::VectorXd& data);

} // namespace lbd
