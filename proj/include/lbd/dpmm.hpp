#pragma once

#include "lbd/density_estimate.hpp"
#include "lbd/distributions.hpp"
#include "lbd/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lbd {

//! Prior constants and run lengths for the log-normal DP mixture.
//!
//! lambda ~ Ga(a, b), with a = b = 0 meaning pi(lambda) ∝ 1/lambda; atoms
//! from the base measure N(0, 1/s); DP concentration c. Defaults reproduce
//! the noninformative simulation setup.
struct Hyperparams
{
  double a = 0.0;
  double b = 0.0;
  double s = 0.5;
  double c = 1.0;
  long n_iter = 60000;
  long burn_in = 10000;
  long thin = 10;
  //! Hard cap on instantiated components; 0 selects 10 n + 100.
  long n_max = 0;
  std::uint64_t seed = 1;

  bool improper_lambda_prior() const { return a == 0.0 && b == 0.0; }
  long truncation_guard(std::size_t n) const
  {
    return n_max > 0 ? n_max : 10 * static_cast<long>(n) + 100;
  }
};

//! Throws ConfigError when the invariants on Hyperparams fail.
void validate(const Hyperparams& hp);

//! Biased observations with cached logs.
struct Dataset
{
  Eigen::VectorXd y;
  Eigen::VectorXd log_y;

  std::size_t size() const { return static_cast<std::size_t>(y.size()); }

  //! Throws DataError if empty or any value is nonpositive / non-finite.
  static Dataset from(const std::vector<double>& values);
};

//! Full Gibbs state of the slice sampler.
//!
//! Component indices are 0-based. `w` holds the stick-breaking weights of the
//! instantiated components 0..N-1, `u` the slice level and `d` the allocation
//! of each datum.
struct ChainState
{
  std::vector<double> v;
  std::vector<double> w;
  std::vector<double> mu;
  double lambda = 1.0;
  std::vector<double> u;
  std::vector<int> d;
  long iteration = 0;

  std::size_t n_active() const { return w.size(); }

  //! Weight not covered by the instantiated components.
  double remainder_mass() const;

  //! Number of distinct allocated components.
  int cluster_count() const;
};

//! Recompute w from v: w_j = v_j prod_{l<j}(1 - v_l), accumulated left to right.
void recompute_weights(ChainState& state);

//! Checks the stick identity, slice admissibility (u_i < w_{d_i}) and coverage
//! (sum_j w_j > 1 - min_i u_i). Returns an empty string when all hold.
std::string invariant_violation(const ChainState& state);

//! Initial state: quantile split of log y into min(n, 5) clusters, atoms at
//! cluster means, lambda = 1 / var(log y), sticks from Beta(1, c), slices
//! below the allocated weights, N extended to coverage.
ChainState init_chain(const Dataset& data, const Hyperparams& hp, Rng& rng);

// -- Full conditionals ------------------------------------------------------

//! Ga(a + n/2, b + sum_i (log y_i - mu_{d_i})^2 / 2). Throws NumericalError
//! when the rate is not positive (improper prior with zero residuals).
GammaParams lambda_conditional(const ChainState& state,
                               const Dataset& data,
                               const Hyperparams& hp);

//! N(lambda S_j / (s + lambda n_j), 1 / (s + lambda n_j)) for component j.
NormalParams atom_conditional(const ChainState& state,
                              const Dataset& data,
                              const Hyperparams& hp,
                              std::size_t j);

//! Beta(1 + n_j, c + sum_{l>j} n_l) parameters for each component in `counts`.
std::vector<BetaParams> stick_conditionals(const std::vector<int>& counts, double c);

//! Allocation probabilities of datum i over the instantiated components,
//! proportional to 1(w_j > u_i) LN(y_i | mu_j, 1/lambda).
Eigen::VectorXd allocation_probabilities(const ChainState& state,
                                         const Dataset& data,
                                         std::size_t i);

// -- Gibbs steps --------------------------------------------------------------

void update_lambda(ChainState& state, const Dataset& data, const Hyperparams& hp,
                   Rng& rng);

//! Occupied atoms from their conditional; empty ones from N(0, 1/s).
void update_atoms(ChainState& state, const Dataset& data, const Hyperparams& hp,
                  Rng& rng);

//! Blocked (v, u) move. Trims to the highest occupied component, redraws v
//! from its conditional with u integrated out, recomputes w, redraws the
//! slices u_i ~ U(0, w_{d_i}) and extends N until coverage holds.
void update_sticks(ChainState& state, const Dataset& data, const Hyperparams& hp,
                   Rng& rng);

//! u_i ~ U(0, w_{d_i}); extend N to coverage with prior sticks and atoms;
//! d_i from allocation_probabilities. Throws NumericalError if N would pass
//! the truncation guard.
void update_slices_allocations(ChainState& state, const Dataset& data,
                               const Hyperparams& hp, Rng& rng);

//! One sweep in the fixed order slices/allocations, sticks, atoms, precision.
void gibbs_sweep(ChainState& state, const Dataset& data, const Hyperparams& hp,
                 Rng& rng);

// -- Predictive ---------------------------------------------------------------

struct PredictiveDraw
{
  double value = 0.0;
  //! Index of the selected component, or n_active() for a fresh base atom.
  std::size_t component = 0;
  bool fresh_atom = false;
};

//! Cumulative-weight component choice on a uniform r; a fresh N(0, 1/s) atom
//! when r exceeds the instantiated mass; then a log-normal draw.
PredictiveDraw draw_predictive(const ChainState& state, const Hyperparams& hp,
                               Rng& rng);

inline double
sample_predictive(const ChainState& state, const Hyperparams& hp, Rng& rng)
{
  return draw_predictive(state, hp, rng).value;
}

//! Truncated mixture plus remainder mass times the base-measure predictive,
//! whose log is N(0, 1/s + 1/lambda). Throws DomainError for y <= 0.
double mixture_density(const ChainState& state, const Hyperparams& hp, double y);

//! mixture_density on a grid; points <= 0 take the limit value 0.
Eigen::VectorXd mixture_density(const ChainState& state, const Hyperparams& hp,
                                const Eigen::VectorXd& grid);

// -- Driver -------------------------------------------------------------------

struct ChainHooks
{
  //! Called once per kept iteration with the current state and its predictive draw.
  std::function<void(const ChainState&, double)> on_kept;
};

struct ChainReport
{
  std::vector<double> predictive;
  std::vector<int> cluster_counts;
  std::vector<double> lambda_trace;
  //! Average of mixture_density over kept iterations.
  DensityEstimate predictive_density;
  long iterations_run = 0;
  bool valid = true;
  std::string error;
};

//! Runs hp.n_iter sweeps. After burn-in, every hp.thin-th iteration draws one
//! predictive value, invokes hooks, records the cluster count and accumulates
//! the mixture density on `grid`. A NumericalError stops the run and returns
//! the partial report with valid = false.
ChainReport run_chain(const Dataset& data, const Hyperparams& hp, Rng& rng,
                      const ChainHooks& hooks, const Eigen::VectorXd& grid);

} // namespace lbd
