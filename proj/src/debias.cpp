#include "lbd/debias.hpp"
#include "lbd/format.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

namespace lbd {

namespace {

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// One reweighted log-normal piece of y^-p g(y): mass factor and shifted params.
struct Tilted
{
  double mass;
  LogNormalParams params;
};

Tilted
tilt(double weight, double mu, double log_var, double p)
{
  return Tilted{ weight * std::exp(-p * mu + 0.5 * p * p * log_var),
                 LogNormalParams{ mu - p * log_var, 1.0 / log_var } };
}

std::vector<Tilted>
tilted_components(const ChainState& state, const Hyperparams& hp, double p)
{
  std::vector<Tilted> out;
  out.reserve(state.n_active() + 1);
  const double log_var = 1.0 / state.lambda;
  for (std::size_t j = 0; j < state.n_active(); ++j) {
    out.push_back(tilt(state.w[j], state.mu[j], log_var, p));
  }
  const double rem = state.remainder_mass();
  if (rem > 0.0) {
    out.push_back(tilt(rem, 0.0, 1.0 / hp.s + log_var, p));
  }
  return out;
}

double
require_power(const WeightFn& w)
{
  auto p = w.power();
  if (!p) {
    throw ConfigError("closed-form debiasing needs w(y) = y^p; got " + w.describe());
  }
  return *p;
}

} // namespace

WeightFn::WeightFn(PowerWeight p)
  : kind_(p)
{
  if (!std::isfinite(p.p)) {
    throw ConfigError("power weight exponent must be finite");
  }
}

WeightFn::WeightFn(TabulatedWeight t)
  : kind_(t)
{
  if (t.x.size() < 2 || t.x.size() != t.w.size()) {
    throw ConfigError("tabulated weight needs >= 2 matching (x, w) pairs");
  }
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    if (!(t.w[i] > 0.0) || !std::isfinite(t.w[i])) {
      throw ConfigError("tabulated weight values must be positive");
    }
    if (i > 0 && !(t.x[i] > t.x[i - 1])) {
      throw ConfigError("tabulated weight abscissae must increase");
    }
  }
}

double
WeightFn::operator()(double y) const
{
  return std::visit(
    overloaded{
      [y](const LengthWeight&) { return y; },
      [y](const PowerWeight& p) { return std::pow(y, p.p); },
      [y](const TabulatedWeight& t) {
        if (y <= t.x.front()) {
          return t.w.front();
        }
        if (y >= t.x.back()) {
          return t.w.back();
        }
        auto it = std::upper_bound(t.x.begin(), t.x.end(), y);
        const auto k = static_cast<std::size_t>(it - t.x.begin());
        const double s = (y - t.x[k - 1]) / (t.x[k] - t.x[k - 1]);
        return (1.0 - s) * t.w[k - 1] + s * t.w[k];
      },
    },
    kind_);
}

std::optional<double>
WeightFn::power() const
{
  if (std::holds_alternative<LengthWeight>(kind_)) {
    return 1.0;
  }
  if (const auto* p = std::get_if<PowerWeight>(&kind_)) {
    return p->p;
  }
  return std::nullopt;
}

std::string
WeightFn::describe() const
{
  return std::visit(
    overloaded{
      [](const LengthWeight&) { return std::string("length"); },
      [](const PowerWeight& p) { return "power:" + format_double(p.p); },
      [](const TabulatedWeight& t) {
        std::string out = "table:";
        for (std::size_t i = 0; i < t.x.size(); ++i) {
          if (i) {
            out += ",";
          }
          out += format_double(t.x[i]) + ":" + format_double(t.w[i]);
        }
        return out;
      },
    },
    kind_);
}

WeightFn
WeightFn::parse(std::string_view text)
{
  if (text == "length") {
    return LengthWeight{};
  }
  if (text.substr(0, 6) == "power:") {
    double p = 0.0;
    if (!parse_double(text.substr(6), p)) {
      throw ConfigError("bad power weight '" + std::string(text) + "'");
    }
    return PowerWeight{ p };
  }
  if (text.substr(0, 6) == "table:") {
    TabulatedWeight t;
    std::string_view rest = text.substr(6);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto pair = rest.substr(0, comma);
      auto colon = pair.find(':');
      double x = 0.0;
      double w = 0.0;
      if (colon == std::string_view::npos || !parse_double(pair.substr(0, colon), x) ||
          !parse_double(pair.substr(colon + 1), w)) {
        throw ConfigError("bad table weight entry '" + std::string(pair) + "'");
      }
      t.x.push_back(x);
      t.w.push_back(w);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    return WeightFn(std::move(t));
  }
  throw ConfigError("unknown weight function '" + std::string(text) +
                    "' (expected length, power:<p> or table:...)");
}

DebiasChain::DebiasChain(double x0, bool keep)
  : x_current(x0)
  , keep_history(keep)
{
  if (!(x0 > 0.0) || !std::isfinite(x0)) {
    throw DomainError("debias chain start must be a finite positive number");
  }
}

double
accept_probability(double x_prev, double y_prop, const WeightFn& w)
{
  if (!(x_prev > 0.0) || !(y_prop > 0.0)) {
    throw DomainError("accept_probability: states must be positive");
  }
  const double wx = w(x_prev);
  const double wy = w(y_prop);
  if (wx >= wy) {
    return 1.0;
  }
  return wx / wy;
}

bool
debias_step(DebiasChain& chain, double y_prop, const WeightFn& w, Rng& rng)
{
  const double alpha = accept_probability(chain.x_current, y_prop, w);
  // Draw unconditionally so the stream position does not depend on alpha.
  const double r = rng.uniform();
  const bool accept = r < alpha;
  if (accept) {
    chain.x_current = y_prop;
    ++chain.accept_count;
  }
  ++chain.step_count;
  if (chain.keep_history) {
    chain.history.push_back(chain.x_current);
    chain.accepted.push_back(static_cast<char>(accept));
  }
  return accept;
}

DebiasRun
run_debias(const std::function<double()>& next, long steps, double x0, const WeightFn& w,
           Rng& rng)
{
  DebiasChain chain(x0);
  DebiasRun out;
  out.samples.reserve(static_cast<std::size_t>(std::max(0L, steps)));
  out.accepted.reserve(out.samples.capacity());
  out.acceptance_running.reserve(out.samples.capacity());
  for (long k = 0; k < steps; ++k) {
    const bool acc = debias_step(chain, next(), w, rng);
    out.samples.push_back(chain.x_current);
    out.accepted.push_back(static_cast<char>(acc));
    out.acceptance_running.push_back(chain.acceptance_rate());
  }
  return out;
}

DebiasRun
run_debias(const std::vector<double>& proposals, double x0, const WeightFn& w, Rng& rng)
{
  std::size_t k = 0;
  return run_debias([&] { return proposals[k++]; }, static_cast<long>(proposals.size()),
                    x0, w, rng);
}

double
debias_normalizer(const ChainState& state, const Hyperparams& hp, const WeightFn& w)
{
  const double p = require_power(w);
  double total = 0.0;
  for (const auto& t : tilted_components(state, hp, p)) {
    total += t.mass;
  }
  return total;
}

double
exact_debias_density(const ChainState& state, const Hyperparams& hp, double y,
                     const WeightFn& w)
{
  if (!(y > 0.0)) {
    throw DomainError("exact_debias_density: y must be positive");
  }
  const double p = require_power(w);
  return std::pow(y, -p) * mixture_density(state, hp, y) / debias_normalizer(state, hp, w);
}

Eigen::VectorXd
exact_debias_density(const ChainState& state, const Hyperparams& hp,
                     const Eigen::VectorXd& grid, const WeightFn& w)
{
  const double p = require_power(w);
  const double c = debias_normalizer(state, hp, w);
  const Eigen::ArrayXd g = mixture_density(state, hp, grid).array();
  const Eigen::ArrayXd positive = (grid.array() > 0.0).cast<double>();
  const Eigen::ArrayXd scale = positive * grid.array().max(DBL_MIN).pow(-p);
  return (scale * g / c).matrix();
}

double
exact_debias_cdf(const ChainState& state, const Hyperparams& hp, double y, const WeightFn& w)
{
  if (y <= 0.0) {
    return 0.0;
  }
  const double p = require_power(w);
  const auto parts = tilted_components(state, hp, p);
  double total = 0.0;
  double acc = 0.0;
  for (const auto& t : parts) {
    total += t.mass;
    acc += t.mass * lognormal_cdf(y, t.params);
  }
  return acc / total;
}

Distribution
debiased_distribution(const Distribution& g, const WeightFn& w)
{
  const double p = require_power(w);

  // Returns (mass of y^-p times the component, debiased component).
  std::function<std::pair<double, Distribution>(const Distribution&)> one =
    [&](const Distribution& d) -> std::pair<double, Distribution> {
    return std::visit(
      overloaded{
        [&](const GammaParams& q) -> std::pair<double, Distribution> {
          if (!(q.shape > p)) {
            throw ConfigError("gamma shape must exceed the weight power to debias");
          }
          const double mass =
            std::exp(std::lgamma(q.shape - p) - std::lgamma(q.shape) + p * std::log(q.rate));
          return { mass, GammaParams{ q.shape - p, q.rate } };
        },
        [&](const ExponentialParams& q) -> std::pair<double, Distribution> {
          if (!(1.0 > p)) {
            throw ConfigError("exponential cannot be debiased for p >= 1");
          }
          const double mass = std::exp(std::lgamma(1.0 - p) + p * std::log(q.rate));
          return { mass, GammaParams{ 1.0 - p, q.rate } };
        },
        [&](const LogNormalParams& q) -> std::pair<double, Distribution> {
          auto t = tilt(1.0, q.mu, q.log_variance(), p);
          return { t.mass, t.params };
        },
        [&](const MixtureParams& q) -> std::pair<double, Distribution> {
          MixtureParams out;
          double total = 0.0;
          for (std::size_t k = 0; k < q.components.size(); ++k) {
            auto [mass, comp] = one(q.components[k]);
            out.weights.push_back(q.weights[k] * mass);
            out.components.push_back(std::move(comp));
            total += q.weights[k] * mass;
          }
          for (auto& wk : out.weights) {
            wk /= total;
          }
          return { total, Distribution(std::move(out)) };
        },
        [&](const auto&) -> std::pair<double, Distribution> {
          throw ConfigError("no closed-form debiased version of " + to_string(d));
        },
      },
      d);
  };
  return one(g).second;
}

} // namespace lbd
