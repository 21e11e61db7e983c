#pragma once

#include "lbd/density_estimate.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <functional>
#include <vector>

namespace lbd {

//! Trace quantities behind the running-average and autocorrelation plots.
struct TraceSummary
{
  //! Running mean of the debiased (Metropolis) sample.
  std::vector<double> running_mean;
  //! Running mean of the posterior-predictive sample.
  std::vector<double> predictive_running_mean;
  //! Autocorrelation of the posterior-predictive sample, lag 0..max_lag.
  std::vector<double> acf;
  //! Metropolis acceptance rate after each step.
  std::vector<double> acceptance_running;
  std::vector<int> cluster_counts;
};

void to_json(nlohmann::json& j, const TraceSummary& t);
void from_json(const nlohmann::json& j, TraceSummary& t);

//! out[k] = mean(x[0..k]). Throws DataError when empty.
std::vector<double> running_average(const std::vector<double>& x);

//! Biased-normalized autocorrelation for lags 0..max_lag.
//! Throws DataError unless size > max_lag >= 1 and the variance is nonzero.
std::vector<double> acf(const std::vector<double>& x, int max_lag = 100);

//! Mean number of occupied components. Throws DataError when empty.
double average_clusters(const std::vector<int>& cluster_counts);

//! Trapezoid integral of |p - q| over the shared grid. Throws ConfigError
//! when the grids differ.
double l1_distance(const DensityEstimate& p, const DensityEstimate& q);

//! sup |F_n - F|. Throws DataError for an empty sample.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

} // namespace lbd
