#pragma once

#include "lbd/distributions.hpp"
#include "lbd/dpmm.hpp"
#include "lbd/rng.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lbd {

struct LengthWeight
{};

//! w(y) = y^p.
struct PowerWeight
{
  double p = 1.0;
};

//! Positive w tabulated on increasing abscissae, linearly interpolated and
//! held constant beyond the end points.
struct TabulatedWeight
{
  std::vector<double> x;
  std::vector<double> w;
};

//! Selection weight w(y) > 0 linking the biased density g ∝ w f to f.
class WeightFn
{
public:
  WeightFn() = default;
  WeightFn(LengthWeight l) : kind_(l) {}
  WeightFn(PowerWeight p);
  WeightFn(TabulatedWeight t);

  double operator()(double y) const;

  //! Exponent p when w(y) = y^p (length bias is p = 1); empty for tables.
  std::optional<double> power() const;

  std::string describe() const;

  //! "length", "power:<p>" or "table:<x1>:<w1>,<x2>:<w2>,...".
  static WeightFn parse(std::string_view text);

private:
  std::variant<LengthWeight, PowerWeight, TabulatedWeight> kind_;
};

//! Metropolis state for converting draws of g into draws of f.
struct DebiasChain
{
  double x_current = 1.0;
  long accept_count = 0;
  long step_count = 0;
  bool keep_history = false;
  std::vector<double> history;
  std::vector<char> accepted;

  explicit DebiasChain(double x0 = 1.0, bool keep = false);

  double acceptance_rate() const
  {
    return step_count ? static_cast<double>(accept_count) / step_count : 0.0;
  }
};

//! min{1, w(x_prev) / w(y_prop)}; throws DomainError for nonpositive input.
double accept_probability(double x_prev, double y_prop, const WeightFn& w);

//! Moves to y_prop with accept_probability, otherwise stays. Returns whether
//! the proposal was accepted.
bool debias_step(DebiasChain& chain, double y_prop, const WeightFn& w, Rng& rng);

struct DebiasRun
{
  std::vector<double> samples;
  std::vector<char> accepted;
  //! Acceptance rate after each step.
  std::vector<double> acceptance_running;
};

//! One debias_step per proposal, starting from x0.
DebiasRun run_debias(const std::vector<double>& proposals, double x0, const WeightFn& w,
                     Rng& rng);

//! Streaming variant: `next` yields each proposal.
DebiasRun run_debias(const std::function<double()>& next, long steps, double x0,
                     const WeightFn& w, Rng& rng);

// -- Closed forms under the log-normal mixture --------------------------------

//! ∫ y^-p g(y) dy for the state's mixture (p = 1 for length bias):
//! sum_j w_j exp(-p mu_j + p^2 / (2 lambda)) plus the remainder term with the
//! base-measure atom integrated out.
double debias_normalizer(const ChainState& state, const Hyperparams& hp,
                         const WeightFn& w = LengthWeight{});

//! y^-p mixture_density(y) / debias_normalizer; throws DomainError for y <= 0.
double exact_debias_density(const ChainState& state, const Hyperparams& hp, double y,
                            const WeightFn& w = LengthWeight{});

Eigen::VectorXd exact_debias_density(const ChainState& state, const Hyperparams& hp,
                                     const Eigen::VectorXd& grid,
                                     const WeightFn& w = LengthWeight{});

//! CDF of exact_debias_density (a reweighted, shifted log-normal mixture).
double exact_debias_cdf(const ChainState& state, const Hyperparams& hp, double y,
                        const WeightFn& w = LengthWeight{});

//! Distribution of f ∝ g / w for analytic g. Gamma components Ga(k, r) map to
//! Ga(k - p, r), log-normals LN(mu, 1/lambda) to LN(mu - p/lambda, 1/lambda),
//! with mixture weights reweighted by the component normalizers. Throws
//! ConfigError when no closed form exists (tables, k <= p, other families).
Distribution debiased_distribution(const Distribution& g, const WeightFn& w);

} // namespace lbd
