#include "lbd/dpmm.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>

namespace lbd {

namespace {

// Sticks are kept strictly inside (0, 1) so every weight stays positive.
double
clamp_stick(double v)
{
  return std::clamp(v, DBL_MIN, std::nextafter(1.0, 0.0));
}

double
sequential_sum(const std::vector<double>& x)
{
  double total = 0.0;
  for (double xi : x) {
    total += xi;
  }
  return total;
}

// prod_{l < N} (1 - v_l), accumulated exactly as recompute_weights does.
double
uncovered_product(const std::vector<double>& v)
{
  double rest = 1.0;
  for (double vj : v) {
    rest *= (1.0 - vj);
  }
  return rest;
}

std::vector<int>
allocation_counts(const ChainState& state)
{
  std::vector<int> counts(state.n_active(), 0);
  for (int di : state.d) {
    ++counts[static_cast<std::size_t>(di)];
  }
  return counts;
}

// Appends prior components until sum_j w_j > 1 - min_i u_i.
void
extend_to_coverage(ChainState& state, const Hyperparams& hp, std::size_t n,
                   Rng& rng)
{
  const double u_min = *std::min_element(state.u.begin(), state.u.end());
  const double target = 1.0 - u_min;
  double total = sequential_sum(state.w);
  double rest = uncovered_product(state.v);
  const long guard = hp.truncation_guard(n);
  const double base_sd = 1.0 / std::sqrt(hp.s);

  while (!(total > target)) {
    if (static_cast<long>(state.n_active()) >= guard) {
      throw NumericalError("slice sampler truncation guard exceeded: N would pass " +
                           std::to_string(guard) + " components");
    }
    const double v = clamp_stick(rng.beta(1.0, hp.c));
    const double w = v * rest;
    rest *= (1.0 - v);
    state.v.push_back(v);
    state.w.push_back(w);
    state.mu.push_back(rng.normal(0.0, base_sd));
    total += w;
  }
}

void
draw_slices(ChainState& state, Rng& rng)
{
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    state.u[i] = rng.uniform() * state.w[static_cast<std::size_t>(state.d[i])];
  }
}

} // namespace

void
validate(const Hyperparams& hp)
{
  if (!(hp.a >= 0.0) || !(hp.b >= 0.0)) {
    throw ConfigError("lambda prior requires a >= 0 and b >= 0");
  }
  if ((hp.a == 0.0) != (hp.b == 0.0)) {
    throw ConfigError("lambda prior (a, b) must be jointly zero or jointly positive");
  }
  if (!(hp.s > 0.0) || !std::isfinite(hp.s)) {
    throw ConfigError("base-measure precision s must be positive");
  }
  if (!(hp.c > 0.0) || !std::isfinite(hp.c)) {
    throw ConfigError("DP concentration c must be positive");
  }
  if (hp.n_iter <= 0 || hp.burn_in < 0 || hp.burn_in >= hp.n_iter) {
    throw ConfigError("need n_iter > 0 and 0 <= burn_in < n_iter");
  }
  if (hp.thin <= 0 || hp.thin > hp.n_iter - hp.burn_in) {
    throw ConfigError("thin must be in [1, n_iter - burn_in]");
  }
  if (hp.n_max < 0) {
    throw ConfigError("n_max must be nonnegative (0 = automatic)");
  }
}

Dataset
Dataset::from(const std::vector<double>& values)
{
  if (values.empty()) {
    throw DataError("dataset is empty");
  }
  Dataset data;
  data.y.resize(static_cast<Eigen::Index>(values.size()));
  data.log_y.resize(data.y.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double yi = values[i];
    if (!(yi > 0.0) || !std::isfinite(yi)) {
      throw DataError("observation " + std::to_string(i + 1) +
                      " is not a finite positive number");
    }
    data.y(static_cast<Eigen::Index>(i)) = yi;
    data.log_y(static_cast<Eigen::Index>(i)) = std::log(yi);
  }
  return data;
}

double
ChainState::remainder_mass() const
{
  return std::max(0.0, 1.0 - sequential_sum(w));
}

int
ChainState::cluster_count() const
{
  std::vector<char> seen(n_active(), 0);
  int count = 0;
  for (int di : d) {
    if (!seen[static_cast<std::size_t>(di)]) {
      seen[static_cast<std::size_t>(di)] = 1;
      ++count;
    }
  }
  return count;
}

void
recompute_weights(ChainState& state)
{
  state.w.resize(state.v.size());
  double rest = 1.0;
  for (std::size_t j = 0; j < state.v.size(); ++j) {
    state.w[j] = state.v[j] * rest;
    rest *= (1.0 - state.v[j]);
  }
}

std::string
invariant_violation(const ChainState& state)
{
  const std::size_t N = state.n_active();
  if (state.v.size() != N || state.mu.size() != N) {
    return "v, w and mu lengths differ";
  }
  if (state.u.size() != state.d.size() || state.u.empty()) {
    return "u and d must have one entry per datum";
  }
  if (!(state.lambda > 0.0)) {
    return "lambda must be positive";
  }
  double rest = 1.0;
  double partial = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    if (!(state.v[j] > 0.0 && state.v[j] < 1.0)) {
      return "stick " + std::to_string(j) + " outside (0, 1)";
    }
    if (state.w[j] != state.v[j] * rest) {
      return "stick identity fails at component " + std::to_string(j);
    }
    rest *= (1.0 - state.v[j]);
    partial += state.w[j];
    if (!(partial < 1.0)) {
      return "partial weight sum reached 1 at component " + std::to_string(j);
    }
  }
  double u_min = 1.0;
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    const int di = state.d[i];
    if (di < 0 || static_cast<std::size_t>(di) >= N) {
      return "allocation of datum " + std::to_string(i) + " out of range";
    }
    if (!(state.u[i] > 0.0 && state.u[i] < state.w[static_cast<std::size_t>(di)])) {
      return "slice admissibility fails at datum " + std::to_string(i);
    }
    u_min = std::min(u_min, state.u[i]);
  }
  if (!(partial > 1.0 - u_min)) {
    return "coverage fails: sum w = " + std::to_string(partial) +
           " <= 1 - min u = " + std::to_string(1.0 - u_min);
  }
  return {};
}

ChainState
init_chain(const Dataset& data, const Hyperparams& hp, Rng& rng)
{
  const std::size_t n = data.size();
  if (n == 0) {
    throw DataError("dataset is empty");
  }
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    if (!(data.y(i) > 0.0)) {
      throw DataError("observation " + std::to_string(i + 1) + " is not positive");
    }
  }

  const std::size_t k = std::min<std::size_t>(n, 5);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{ 0 });
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.log_y(static_cast<Eigen::Index>(a)) <
           data.log_y(static_cast<Eigen::Index>(b));
  });

  ChainState state;
  state.d.assign(n, 0);
  state.u.assign(n, 0.0);
  std::vector<double> sums(k, 0.0);
  std::vector<int> counts(k, 0);
  for (std::size_t rank = 0; rank < n; ++rank) {
    const auto j = static_cast<int>(rank * k / n);
    const std::size_t i = order[rank];
    state.d[i] = j;
    sums[static_cast<std::size_t>(j)] += data.log_y(static_cast<Eigen::Index>(i));
    ++counts[static_cast<std::size_t>(j)];
  }
  state.mu.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    state.mu[j] = sums[j] / counts[j];
  }

  state.lambda = 1.0;
  if (n > 1) {
    const double m = data.log_y.mean();
    const double var = (data.log_y.array() - m).square().sum() / static_cast<double>(n - 1);
    if (var > 0.0) {
      state.lambda = 1.0 / var;
    }
  }

  state.v.resize(k);
  for (auto& vj : state.v) {
    vj = clamp_stick(rng.beta(1.0, hp.c));
  }
  recompute_weights(state);
  draw_slices(state, rng);
  extend_to_coverage(state, hp, n, rng);
  return state;
}

GammaParams
lambda_conditional(const ChainState& state, const Dataset& data, const Hyperparams& hp)
{
  double ss = 0.0;
  for (std::size_t i = 0; i < state.d.size(); ++i) {
    const double r = data.log_y(static_cast<Eigen::Index>(i)) -
                     state.mu[static_cast<std::size_t>(state.d[i])];
    ss += r * r;
  }
  const double shape = hp.a + 0.5 * static_cast<double>(data.size());
  const double rate = hp.b + 0.5 * ss;
  if (!(rate > 0.0) || !(shape > 0.0)) {
    throw NumericalError("degenerate lambda conditional: Ga(" + std::to_string(shape) +
                         ", " + std::to_string(rate) + ") is improper");
  }
  return GammaParams{ shape, rate };
}

NormalParams
atom_conditional(const ChainState& state, const Dataset& data, const Hyperparams& hp,
                 std::size_t j)
{
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < state.d.size(); ++i) {
    if (static_cast<std::size_t>(state.d[i]) == j) {
      sum += data.log_y(static_cast<Eigen::Index>(i));
      ++count;
    }
  }
  const double precision = hp.s + state.lambda * count;
  return NormalParams{ state.lambda * sum / precision, 1.0 / std::sqrt(precision) };
}

std::vector<BetaParams>
stick_conditionals(const std::vector<int>& counts, double c)
{
  std::vector<BetaParams> out(counts.size());
  long tail = std::accumulate(counts.begin(), counts.end(), 0L);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    tail -= counts[j];
    out[j] = BetaParams{ 1.0 + counts[j], c + static_cast<double>(tail) };
  }
  return out;
}

Eigen::VectorXd
allocation_probabilities(const ChainState& state, const Dataset& data, std::size_t i)
{
  const std::size_t N = state.n_active();
  const double ly = data.log_y(static_cast<Eigen::Index>(i));
  Eigen::VectorXd logp(static_cast<Eigen::Index>(N));
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < N; ++j) {
    double lp = -std::numeric_limits<double>::infinity();
    if (state.w[j] > state.u[i]) {
      const double r = ly - state.mu[j];
      lp = -0.5 * state.lambda * r * r;
    }
    logp(static_cast<Eigen::Index>(j)) = lp;
    best = std::max(best, lp);
  }
  if (!std::isfinite(best)) {
    throw NumericalError("empty slice set for datum " + std::to_string(i));
  }
  Eigen::VectorXd p = (logp.array() - best).exp().matrix();
  return p / p.sum();
}

void
update_lambda(ChainState& state, const Dataset& data, const Hyperparams& hp, Rng& rng)
{
  const GammaParams cond = lambda_conditional(state, data, hp);
  const double draw = rng.gamma(cond.shape, cond.rate);
  if (!(draw > 0.0) || !std::isfinite(draw)) {
    throw NumericalError("lambda draw is not a finite positive number");
  }
  state.lambda = draw;
}

void
update_atoms(ChainState& state, const Dataset& data, const Hyperparams& hp, Rng& rng)
{
  const std::size_t N = state.n_active();
  std::vector<double> sums(N, 0.0);
  std::vector<int> counts(N, 0);
  for (std::size_t i = 0; i < state.d.size(); ++i) {
    const auto j = static_cast<std::size_t>(state.d[i]);
    sums[j] += data.log_y(static_cast<Eigen::Index>(i));
    ++counts[j];
  }
  for (std::size_t j = 0; j < N; ++j) {
    const double precision = hp.s + state.lambda * counts[j];
    const double m = state.lambda * sums[j] / precision;
    state.mu[j] = rng.normal(m, 1.0 / std::sqrt(precision));
  }
}

void
update_sticks(ChainState& state, const Dataset& data, const Hyperparams& hp, Rng& rng)
{
  const int top = *std::max_element(state.d.begin(), state.d.end());
  const auto k = static_cast<std::size_t>(top) + 1;
  state.v.resize(k);
  state.mu.resize(k);

  const auto params = stick_conditionals(allocation_counts(state), hp.c);
  for (std::size_t j = 0; j < k; ++j) {
    state.v[j] = clamp_stick(rng.beta(params[j].a, params[j].b));
  }
  recompute_weights(state);
  draw_slices(state, rng);
  extend_to_coverage(state, hp, data.size(), rng);
}

void
update_slices_allocations(ChainState& state, const Dataset& data, const Hyperparams& hp,
                          Rng& rng)
{
  draw_slices(state, rng);
  extend_to_coverage(state, hp, data.size(), rng);

  const std::size_t N = state.n_active();
  std::vector<double> logp(N);
  for (std::size_t i = 0; i < state.d.size(); ++i) {
    const double ly = data.log_y(static_cast<Eigen::Index>(i));
    const double ui = state.u[i];
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < N; ++j) {
      if (state.w[j] > ui) {
        const double r = ly - state.mu[j];
        logp[j] = -0.5 * state.lambda * r * r;
        best = std::max(best, logp[j]);
      } else {
        logp[j] = -std::numeric_limits<double>::infinity();
      }
    }
    double total = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      logp[j] = std::exp(logp[j] - best);
      total += logp[j];
    }
    const double r = rng.uniform() * total;
    double cum = 0.0;
    std::size_t pick = N;
    for (std::size_t j = 0; j < N; ++j) {
      if (logp[j] == 0.0) {
        continue;
      }
      pick = j;
      cum += logp[j];
      if (r <= cum) {
        break;
      }
    }
    if (pick == N) {
      throw NumericalError("empty slice set for datum " + std::to_string(i));
    }
    state.d[i] = static_cast<int>(pick);
  }
}

void
gibbs_sweep(ChainState& state, const Dataset& data, const Hyperparams& hp, Rng& rng)
{
  update_slices_allocations(state, data, hp, rng);
  update_sticks(state, data, hp, rng);
  update_atoms(state, data, hp, rng);
  update_lambda(state, data, hp, rng);
  ++state.iteration;
}

PredictiveDraw
draw_predictive(const ChainState& state, const Hyperparams& hp, Rng& rng)
{
  PredictiveDraw out;
  const double r = rng.uniform();
  double cum = 0.0;
  out.component = state.n_active();
  for (std::size_t j = 0; j < state.n_active(); ++j) {
    cum += state.w[j];
    if (r <= cum) {
      out.component = j;
      break;
    }
  }
  double atom = 0.0;
  if (out.component == state.n_active()) {
    out.fresh_atom = true;
    atom = rng.normal(0.0, 1.0 / std::sqrt(hp.s));
  } else {
    atom = state.mu[out.component];
  }
  out.value = std::exp(rng.normal(atom, 1.0 / std::sqrt(state.lambda)));
  return out;
}

double
mixture_density(const ChainState& state, const Hyperparams& hp, double y)
{
  if (!(y > 0.0)) {
    throw DomainError("mixture_density: y must be positive");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < state.n_active(); ++j) {
    total += state.w[j] * lognormal_pdf(y, LogNormalParams{ state.mu[j], state.lambda });
  }
  const double rem = state.remainder_mass();
  if (rem > 0.0) {
    const double base_lambda = 1.0 / (1.0 / hp.s + 1.0 / state.lambda);
    total += rem * lognormal_pdf(y, LogNormalParams{ 0.0, base_lambda });
  }
  return total;
}

Eigen::VectorXd
mixture_density(const ChainState& state, const Hyperparams& hp, const Eigen::VectorXd& grid)
{
  const Eigen::Index m = grid.size();
  const Eigen::ArrayXd positive = (grid.array() > 0.0).cast<double>();
  const Eigen::ArrayXd safe = grid.array().max(DBL_MIN);
  const Eigen::ArrayXd log_grid = safe.log();
  const Eigen::ArrayXd inv_grid = positive / safe;

  auto kernel = [&](double mu, double lambda) -> Eigen::ArrayXd {
    return (kInvSqrt2Pi * std::sqrt(lambda)) * inv_grid *
           (-0.5 * lambda * (log_grid - mu).square()).exp();
  };

  Eigen::ArrayXd total = Eigen::ArrayXd::Zero(m);
  for (std::size_t j = 0; j < state.n_active(); ++j) {
    total += state.w[j] * kernel(state.mu[j], state.lambda);
  }
  const double rem = state.remainder_mass();
  if (rem > 0.0) {
    total += rem * kernel(0.0, 1.0 / (1.0 / hp.s + 1.0 / state.lambda));
  }
  return total.matrix();
}

ChainReport
run_chain(const Dataset& data, const Hyperparams& hp, Rng& rng, const ChainHooks& hooks,
          const Eigen::VectorXd& grid)
{
  validate(hp);
  validate_grid(grid);

  ChainReport report;
  report.predictive_density.grid = grid;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid.size());
  long kept = 0;

  try {
    ChainState state = init_chain(data, hp, rng);
    for (long it = 1; it <= hp.n_iter; ++it) {
      gibbs_sweep(state, data, hp, rng);
      report.iterations_run = it;
      if (it <= hp.burn_in || (it - hp.burn_in) % hp.thin != 0) {
        continue;
      }
      const double draw = sample_predictive(state, hp, rng);
      report.predictive.push_back(draw);
      report.cluster_counts.push_back(state.cluster_count());
      report.lambda_trace.push_back(state.lambda);
      if (hooks.on_kept) {
        hooks.on_kept(state, draw);
      }
      acc += mixture_density(state, hp, grid);
      ++kept;
    }
  } catch (const NumericalError& e) {
    report.valid = false;
    report.error = e.what();
  }

  if (kept > 0) {
    acc /= static_cast<double>(kept);
  } else if (report.valid) {
    report.valid = false;
    report.error = "no kept iterations";
  }
  report.predictive_density.values = std::move(acc);
  report.predictive_density.normalized = false;
  return report;
}

} // namespace lbd
