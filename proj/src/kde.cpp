#include "lbd/kde.hpp"
#include "lbd/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace lbd {

namespace {

void
check_bandwidth(const Bandwidth& h)
{
  if (!(h.h > 0.0) || !std::isfinite(h.h)) {
    throw ConfigError("bandwidth must be a finite positive number");
  }
}

double
sample_sd(const Eigen::VectorXd& x)
{
  const double m = x.mean();
  return std::sqrt((x.array() - m).square().sum() / static_cast<double>(x.size() - 1));
}

double
quantile7(std::vector<double> sorted, double p)
{
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) {
    return sorted.back();
  }
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

std::string
to_string(BandwidthMethod m)
{
  switch (m) {
    case BandwidthMethod::sj_average:
      return "sj_average";
    case BandwidthMethod::plugin:
      return "plugin";
    case BandwidthMethod::ste:
      return "ste";
    case BandwidthMethod::silverman_fallback:
      return "silverman_fallback";
    case BandwidthMethod::manual:
      return "manual";
  }
  return "unknown";
}

double
harmonic_mean(const Eigen::VectorXd& data)
{
  if (data.size() == 0) {
    throw DataError("harmonic_mean: empty data");
  }
  std::vector<double> inv(static_cast<std::size_t>(data.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (!(data(i) > 0.0)) {
      throw DataError("harmonic_mean: entry " + std::to_string(i + 1) +
                      " is not positive");
    }
    inv[static_cast<std::size_t>(i)] = 1.0 / data(i);
  }
  std::sort(inv.begin(), inv.end());
  const double inv_sum = std::accumulate(inv.begin(), inv.end(), 0.0);
  return static_cast<double>(data.size()) / inv_sum;
}

Eigen::VectorXd
jones_weights(const Eigen::VectorXd& data)
{
  const double mu_hat = harmonic_mean(data);
  const double n = static_cast<double>(data.size());
  return (mu_hat / n) * data.cwiseInverse();
}

Eigen::VectorXd
gaussian_kde_values(const Eigen::VectorXd& data, const Eigen::VectorXd& weights, double h,
                    const Eigen::VectorXd& grid)
{
  // summed in sorted order so the result does not depend on input order
  std::vector<Eigen::Index> order(static_cast<std::size_t>(data.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{ 0 });
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return data(a) < data(b) || (data(a) == data(b) && weights(a) < weights(b));
  });

  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.size());
  const double k = kInvSqrt2Pi / h;
  for (Eigen::Index j : order) {
    const Eigen::ArrayXd z = (grid.array() - data(j)) / h;
    out.array() += weights(j) * k * (-0.5 * z.square()).exp();
  }
  return out;
}

DensityEstimate
classical_kde(const Eigen::VectorXd& data, const Bandwidth& h, const Eigen::VectorXd& grid)
{
  check_bandwidth(h);
  validate_grid(grid);
  if (data.size() == 0) {
    throw DataError("classical_kde: empty data");
  }
  const Eigen::VectorXd weights =
    Eigen::VectorXd::Constant(data.size(), 1.0 / static_cast<double>(data.size()));
  return normalize_on_grid(grid, gaussian_kde_values(data, weights, h.h, grid));
}

DensityEstimate
jones_kde(const Eigen::VectorXd& data, const Bandwidth& h, const Eigen::VectorXd& grid)
{
  check_bandwidth(h);
  validate_grid(grid);
  const Eigen::VectorXd weights = jones_weights(data);
  return normalize_on_grid(grid, gaussian_kde_values(data, weights, h.h, grid));
}

namespace bandwidth {

double
robust_scale(const Eigen::VectorXd& x)
{
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile7(sorted, 0.75) - quantile7(sorted, 0.25);
  return std::min(sample_sd(x), iqr / 1.349);
}

double
silverman(const Eigen::VectorXd& x)
{
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile7(sorted, 0.75) - quantile7(sorted, 0.25);
  double scale = std::min(sample_sd(x), iqr / 1.34);
  if (!(scale > 0.0)) {
    scale = sample_sd(x);
  }
  return 0.9 * scale * std::pow(static_cast<double>(x.size()), -0.2);
}

double
psi4(const Eigen::VectorXd& x, double g)
{
  const Eigen::Index n = x.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double z = (x(i) - x(j)) / g;
      const double d = z * z;
      if (d >= 1000.0) {
        continue;
      }
      sum += std::exp(-0.5 * d) * (d * d - 6.0 * d + 3.0);
    }
  }
  sum = 2.0 * sum + 3.0 * static_cast<double>(n);
  const double nn = static_cast<double>(n);
  return sum / (nn * (nn - 1.0) * std::pow(g, 5.0) * std::sqrt(2.0 * std::numbers::pi));
}

double
psi6(const Eigen::VectorXd& x, double g)
{
  const Eigen::Index n = x.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double z = (x(i) - x(j)) / g;
      const double d = z * z;
      if (d >= 1000.0) {
        continue;
      }
      sum += std::exp(-0.5 * d) * (d * d * d - 15.0 * d * d + 45.0 * d - 15.0);
    }
  }
  sum = 2.0 * sum - 15.0 * static_cast<double>(n);
  const double nn = static_cast<double>(n);
  return sum / (nn * (nn - 1.0) * std::pow(g, 7.0) * std::sqrt(2.0 * std::numbers::pi));
}

std::optional<double>
sj_plugin(const Eigen::VectorXd& x)
{
  const double n = static_cast<double>(x.size());
  const double scale = robust_scale(x);
  const double b = 1.23 * scale * std::pow(n, -1.0 / 9.0);
  const double c1 = 1.0 / (2.0 * std::sqrt(std::numbers::pi) * n);
  const double td = -psi6(x, b);
  if (!(td > 0.0) || !std::isfinite(td)) {
    return std::nullopt;
  }
  const double s4 = psi4(x, std::pow(2.394 / (n * td), 1.0 / 7.0));
  if (!(s4 > 0.0) || !std::isfinite(s4)) {
    return std::nullopt;
  }
  return std::pow(c1 / s4, 0.2);
}

std::optional<double>
sj_ste(const Eigen::VectorXd& x, double rel_tol)
{
  const double n = static_cast<double>(x.size());
  const double scale = robust_scale(x);
  const double a = 1.24 * scale * std::pow(n, -1.0 / 7.0);
  const double b = 1.23 * scale * std::pow(n, -1.0 / 9.0);
  const double c1 = 1.0 / (2.0 * std::sqrt(std::numbers::pi) * n);
  const double td = -psi6(x, b);
  if (!(td > 0.0) || !std::isfinite(td)) {
    return std::nullopt;
  }
  const double alpha2 = 1.357 * std::pow(psi4(x, a) / td, 1.0 / 7.0);
  if (!std::isfinite(alpha2) || !(alpha2 > 0.0)) {
    return std::nullopt;
  }
  auto f = [&](double h) {
    return std::pow(c1 / psi4(x, alpha2 * std::pow(h, 5.0 / 7.0)), 0.2) - h;
  };

  const double hmax = 1.144 * scale * std::pow(n, -0.2);
  double lo = 0.1 * hmax;
  double hi = hmax;
  double flo = f(lo);
  double fhi = f(hi);
  for (int tries = 1; !(flo * fhi <= 0.0); ++tries) {
    if (tries > 99) {
      return std::nullopt;
    }
    if (tries % 2) {
      hi *= 1.2;
      fhi = f(hi);
    } else {
      lo /= 1.2;
      flo = f(lo);
    }
  }
  while (hi - lo > rel_tol * 0.5 * (hi + lo)) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (!std::isfinite(fmid)) {
      return std::nullopt;
    }
    if ((fmid <= 0.0) == (flo <= 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace bandwidth

Bandwidth
select_bandwidth(const Eigen::VectorXd& data)
{
  if (data.size() < 3) {
    throw DataError("bandwidth selection needs at least 3 observations");
  }
  const double m = data.mean();
  if (!((data.array() - m).square().sum() > 0.0)) {
    throw DataError("bandwidth selection needs positive sample variance");
  }
  auto dpi = bandwidth::sj_plugin(data);
  auto ste = bandwidth::sj_ste(data);
  if (dpi && ste) {
    return Bandwidth{ 0.5 * (*dpi + *ste), BandwidthMethod::sj_average };
  }
  return Bandwidth{ bandwidth::silverman(data), BandwidthMethod::silverman_fallback };
}

} // namespace lbd
