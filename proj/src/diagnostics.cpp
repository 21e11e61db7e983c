#include "lbd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lbd {

void
to_json(nlohmann::json& j, const TraceSummary& t)
{
  j = nlohmann::json{ { "running_mean", t.running_mean },
                      { "predictive_running_mean", t.predictive_running_mean },
                      { "acf", t.acf },
                      { "acceptance_running", t.acceptance_running },
                      { "cluster_counts", t.cluster_counts } };
}

void
from_json(const nlohmann::json& j, TraceSummary& t)
{
  j.at("running_mean").get_to(t.running_mean);
  j.at("acf").get_to(t.acf);
  j.at("acceptance_running").get_to(t.acceptance_running);
  j.at("cluster_counts").get_to(t.cluster_counts);
  if (j.contains("predictive_running_mean")) {
    j.at("predictive_running_mean").get_to(t.predictive_running_mean);
  }
}

std::vector<double>
running_average(const std::vector<double>& x)
{
  if (x.empty()) {
    throw DataError("running_average: empty sequence");
  }
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sum += x[k];
    out[k] = sum / static_cast<double>(k + 1);
  }
  return out;
}

std::vector<double>
acf(const std::vector<double>& x, int max_lag)
{
  const auto n = static_cast<Eigen::Index>(x.size());
  if (max_lag < 1 || n <= max_lag) {
    throw DataError("acf: need length > max_lag >= 1");
  }
  const Eigen::Map<const Eigen::VectorXd> xs(x.data(), n);
  const Eigen::VectorXd c = xs.array() - xs.mean();
  const double denom = c.squaredNorm();
  if (!(denom > 0.0)) {
    throw DataError("acf: zero variance");
  }
  std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
  out[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) {
    out[static_cast<std::size_t>(k)] = c.head(n - k).dot(c.tail(n - k)) / denom;
  }
  return out;
}

double
average_clusters(const std::vector<int>& cluster_counts)
{
  if (cluster_counts.empty()) {
    throw DataError("average_clusters: empty trace");
  }
  double sum = 0.0;
  for (int k : cluster_counts) {
    sum += k;
  }
  return sum / static_cast<double>(cluster_counts.size());
}

double
l1_distance(const DensityEstimate& p, const DensityEstimate& q)
{
  if (p.grid.size() != q.grid.size() || p.grid != q.grid ||
      p.values.size() != p.grid.size() || q.values.size() != q.grid.size()) {
    throw ConfigError("l1_distance: estimates are not on the same grid");
  }
  return trapezoid(p.grid, (p.values - q.values).cwiseAbs());
}

double
ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf)
{
  if (sample.empty()) {
    throw DataError("ks_statistic: empty sample");
  }
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({ d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n });
  }
  return d;
}

} // namespace lbd
