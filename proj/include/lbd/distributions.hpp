#pragma once

#include "lbd/errors.hpp"
#include "lbd/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lbd {

//! Log-normal on (0, inf): log y ~ N(mu, 1/lambda). Variance of log y is
//! derived from the precision, never stored.
struct LogNormalParams
{
  double mu = 0.0;
  double lambda = 1.0;

  double log_variance() const { return 1.0 / lambda; }
};

//! Gamma with density proportional to x^(shape-1) exp(-rate x).
struct GammaParams
{
  double shape = 1.0;
  double rate = 1.0;
};

struct ExponentialParams
{
  double rate = 1.0;
};

struct NormalParams
{
  double mean = 0.0;
  double sd = 1.0;
};

struct BetaParams
{
  double a = 1.0;
  double b = 1.0;
};

struct UniformParams
{
  double lo = 0.0;
  double hi = 1.0;
};

struct Distribution;

//! Finite mixture; weights must be positive and sum to one.
struct MixtureParams
{
  std::vector<double> weights;
  std::vector<Distribution> components;
};

//! Closed set of distributions the pipeline needs, for truth curves,
//! synthetic data and config descriptors.
struct Distribution
  : std::variant<GammaParams,
                 ExponentialParams,
                 NormalParams,
                 LogNormalParams,
                 BetaParams,
                 UniformParams,
                 MixtureParams>
{
  using variant::variant;
};

// ---------------------------------------------------------------------------
// Scalar kernels. Templated so they compose with Eigen array expressions.

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

template<typename Scalar>
Scalar
normal_pdf(Scalar x, double mean, double sd)
{
  const Scalar z = (x - mean) / sd;
  return Scalar(kInvSqrt2Pi / sd) * std::exp(Scalar(-0.5) * z * z);
}

inline double
normal_cdf(double x, double mean = 0.0, double sd = 1.0)
{
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

//! (lambda / 2 pi)^(1/2) y^-1 exp{-(lambda/2)(log y - mu)^2}; throws for y <= 0.
template<typename Scalar>
Scalar
lognormal_pdf(Scalar y, const LogNormalParams& p)
{
  if (!(y > Scalar(0))) {
    throw DomainError("lognormal_pdf: y must be positive");
  }
  const Scalar r = std::log(y) - p.mu;
  return Scalar(kInvSqrt2Pi * std::sqrt(p.lambda)) / y *
         std::exp(Scalar(-0.5 * p.lambda) * r * r);
}

//! Log-normal density on an array of points; points <= 0 evaluate to the
//! limit value 0 instead of throwing.
template<typename Derived>
Eigen::ArrayXd
lognormal_pdf(const Eigen::ArrayBase<Derived>& y, const LogNormalParams& p)
{
  const double k = kInvSqrt2Pi * std::sqrt(p.lambda);
  Eigen::ArrayXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double yi = y(i);
    if (yi > 0.0) {
      const double r = std::log(yi) - p.mu;
      out(i) = k / yi * std::exp(-0.5 * p.lambda * r * r);
    } else {
      out(i) = 0.0;
    }
  }
  return out;
}

inline double
lognormal_cdf(double y, const LogNormalParams& p)
{
  if (y <= 0.0) {
    return 0.0;
  }
  return normal_cdf(std::log(y), p.mu, std::sqrt(p.log_variance()));
}

//! E[1/Y] for Y ~ LN(mu, 1/lambda): exp(-mu + 1/(2 lambda)).
inline double
lognormal_inverse_moment(const LogNormalParams& p)
{
  return std::exp(-p.mu + 0.5 / p.lambda);
}

template<typename Scalar>
Scalar
gamma_pdf(Scalar x, const GammaParams& p)
{
  if (x < Scalar(0)) {
    return Scalar(0);
  }
  if (x == Scalar(0)) {
    if (p.shape < 1.0) {
      return std::numeric_limits<Scalar>::infinity();
    }
    return p.shape == 1.0 ? Scalar(p.rate) : Scalar(0);
  }
  const double log_norm = p.shape * std::log(p.rate) - std::lgamma(p.shape);
  return std::exp(Scalar(log_norm) + Scalar(p.shape - 1.0) * std::log(x) -
                  Scalar(p.rate) * x);
}

// ---------------------------------------------------------------------------
// Descriptor-level operations.

//! Throws ConfigError when parameters violate their invariants.
void validate(const Distribution& dist);

//! Normalized density value; zero outside the support.
double pdf_eval(const Distribution& dist, double y);

//! pdf_eval on every point of `ys`.
Eigen::VectorXd pdf_eval(const Distribution& dist, const Eigen::VectorXd& ys);

//! One draw; reproducible for a fixed generator state.
double sample(const Distribution& dist, Rng& rng);

//! Mean of the distribution (used for moment checks and reporting).
double mean(const Distribution& dist);

//! Parse a textual descriptor, e.g. "gamma(2,0.5)", "exp(0.5)",
//! "lognormal(0,1)", "0.25*gamma(2,1)+0.75*gamma(10,1)".
Distribution parse_distribution(std::string_view text);

//! Inverse of parse_distribution (round-trip exact at 17 digits).
std::string to_string(const Distribution& dist);

} // namespace lbd
