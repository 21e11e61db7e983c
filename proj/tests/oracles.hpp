#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the code paths it is used to check.

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

//! Adaptive quadrature over [a, b].
inline double
integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13)
{
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol);
}

//! Adaptive quadrature over (0, inf), split at `split` into a finite piece and
//! an exp-sinh tail.
inline double
integrate_half_line(const std::function<double(double)>& f, double split = 1.0)
{
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double head = ts.integrate(f, 0.0, split);
  const double tail = es.integrate(f, split, std::numeric_limits<double>::infinity());
  return head + tail;
}

//! Whole-line quadrature centered at `center`.
inline double
integrate_line(const std::function<double(double)>& f, double center = 0.0)
{
  boost::math::quadrature::exp_sinh<double> es;
  const double inf = std::numeric_limits<double>::infinity();
  return es.integrate([&](double t) { return f(center + t); }, 0.0, inf) +
         es.integrate([&](double t) { return f(center - t); }, 0.0, inf);
}

inline double
gamma_cdf(double x, double shape, double rate)
{
  if (x <= 0) {
    return 0.0;
  }
  return boost::math::cdf(boost::math::gamma_distribution<double>(shape, 1.0 / rate), x);
}

inline double
beta_cdf(double x, double a, double b)
{
  return boost::math::cdf(boost::math::beta_distribution<double>(a, b), std::clamp(x, 0.0, 1.0));
}

inline double
normal_cdf(double x, double mean, double sd)
{
  return boost::math::cdf(boost::math::normal_distribution<double>(mean, sd), x);
}

inline double
lognormal_cdf(double y, double mu, double sigma)
{
  if (y <= 0) {
    return 0.0;
  }
  return boost::math::cdf(boost::math::lognormal_distribution<double>(mu, sigma), y);
}

inline double
gamma_density(double x, double shape, double rate)
{
  if (x < 0) {
    return 0.0;
  }
  if (x == 0) {
    return shape == 1 ? rate : (shape < 1 ? std::numeric_limits<double>::infinity() : 0.0);
  }
  return boost::math::pdf(boost::math::gamma_distribution<double>(shape, 1.0 / rate), x);
}

//! One-sample KS statistic, written independently of the library version.
inline double
ks(std::vector<double> xs, const std::function<double(double)>& cdf)
{
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  return d;
}

//! KS critical value at alpha ~ 0.01 for a large i.i.d. sample.
inline double
ks_critical_01(std::size_t n)
{
  return 1.63 / std::sqrt(static_cast<double>(n));
}

inline double
sample_mean(const std::vector<double>& x)
{
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

//! Monte Carlo standard error of the mean by non-overlapping batch means, valid
//! for autocorrelated chains.
inline double
batch_means_se(const std::vector<double>& x, std::size_t batches = 50)
{
  const std::size_t len = x.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      s += x[b * len + k];
    }
    means[b] = s / static_cast<double>(len);
  }
  const double m = sample_mean(means);
  double ss = 0.0;
  for (double v : means) {
    ss += (v - m) * (v - m);
  }
  return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

//! Normalized probabilities on an equally spaced grid from unnormalized log
//! density values (midpoint cells).
inline std::vector<double>
grid_posterior(const std::vector<double>& log_density)
{
  const double top = *std::max_element(log_density.begin(), log_density.end());
  std::vector<double> p(log_density.size());
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = std::exp(log_density[k] - top);
    total += p[k];
  }
  for (auto& v : p) {
    v /= total;
  }
  return p;
}

//! Histogram of draws on [lo, hi) with `bins` equal cells, as probabilities
//! over all draws (mass outside counts toward none of the bins).
inline std::vector<double>
histogram(const std::vector<double>& draws, double lo, double hi, std::size_t bins)
{
  std::vector<double> h(bins, 0.0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double x : draws) {
    if (x >= lo && x < hi) {
      h[static_cast<std::size_t>((x - lo) / width)] += 1.0;
    }
  }
  for (auto& v : h) {
    v /= static_cast<double>(draws.size());
  }
  return h;
}

inline double
total_variation(const std::vector<double>& p, const std::vector<double>& q)
{
  double tv = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    tv += std::abs(p[k] - q[k]);
  }
  return 0.5 * tv;
}

} // namespace oracle

namespace oracle {

//! Probabilities of `bins` equal cells on [lo, hi) under the unnormalized
//! density f, normalized by the total `mass` of f.
inline std::vector<double>
cell_probabilities(const std::function<double(double)>& f, double lo, double hi,
                   std::size_t bins, double mass)
{
  std::vector<double> p(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    p[k] = integrate(f, lo + k * width, lo + (k + 1) * width, 1e-10) / mass;
  }
  return p;
}

} // namespace oracle
