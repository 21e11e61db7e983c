#include "lbd/distributions.hpp"
#include "lbd/format.hpp"

#include <cctype>
#include <numeric>
#include <type_traits>

namespace lbd {

namespace {

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void
require(bool ok, const char* what)
{
  if (!ok) {
    throw ConfigError(what);
  }
}

std::string_view
trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<double>
parse_args(std::string_view args, std::string_view name)
{
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= args.size()) {
    std::size_t comma = args.find(',', start);
    if (comma == std::string_view::npos) {
      comma = args.size();
    }
    double v = 0.0;
    if (!parse_double(args.substr(start, comma - start), v)) {
      throw ConfigError("bad numeric argument in '" + std::string(name) + "(" +
                        std::string(args) + ")'");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

Distribution
parse_simple(std::string_view text)
{
  text = trim(text);
  auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw ConfigError("malformed distribution descriptor '" + std::string(text) +
                      "'");
  }
  std::string name(trim(text.substr(0, open)));
  for (auto& ch : name) {
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  auto args = parse_args(text.substr(open + 1, text.size() - open - 2), name);
  auto expect = [&](std::size_t k) {
    if (args.size() != k) {
      throw ConfigError("'" + name + "' expects " + std::to_string(k) +
                        " arguments");
    }
  };

  Distribution d;
  if (name == "gamma" || name == "ga") {
    expect(2);
    d = GammaParams{ args[0], args[1] };
  } else if (name == "exp" || name == "exponential") {
    expect(1);
    d = ExponentialParams{ args[0] };
  } else if (name == "normal" || name == "n") {
    expect(2);
    d = NormalParams{ args[0], args[1] };
  } else if (name == "lognormal" || name == "ln") {
    expect(2);
    d = LogNormalParams{ args[0], args[1] };
  } else if (name == "beta") {
    expect(2);
    d = BetaParams{ args[0], args[1] };
  } else if (name == "uniform" || name == "u") {
    expect(2);
    d = UniformParams{ args[0], args[1] };
  } else {
    throw ConfigError("unsupported distribution '" + name + "'");
  }
  validate(d);
  return d;
}

} // namespace

void
validate(const Distribution& dist)
{
  std::visit(
    overloaded{
      [](const GammaParams& p) {
        require(p.shape > 0 && p.rate > 0 && std::isfinite(p.shape) &&
                  std::isfinite(p.rate),
                "gamma requires shape > 0 and rate > 0");
      },
      [](const ExponentialParams& p) {
        require(p.rate > 0 && std::isfinite(p.rate), "exponential requires rate > 0");
      },
      [](const NormalParams& p) {
        require(std::isfinite(p.mean) && p.sd > 0 && std::isfinite(p.sd),
                "normal requires finite mean and sd > 0");
      },
      [](const LogNormalParams& p) {
        require(std::isfinite(p.mu) && p.lambda > 0 && std::isfinite(p.lambda),
                "lognormal requires finite mu and lambda > 0");
      },
      [](const BetaParams& p) {
        require(p.a > 0 && p.b > 0 && std::isfinite(p.a) && std::isfinite(p.b),
                "beta requires a > 0 and b > 0");
      },
      [](const UniformParams& p) {
        require(std::isfinite(p.lo) && std::isfinite(p.hi) && p.lo < p.hi,
                "uniform requires lo < hi");
      },
      [](const MixtureParams& p) {
        require(!p.components.empty() &&
                  p.components.size() == p.weights.size(),
                "mixture requires matching nonempty weights and components");
        double total = 0.0;
        for (double w : p.weights) {
          require(w > 0 && std::isfinite(w), "mixture weights must be positive");
          total += w;
        }
        require(std::abs(total - 1.0) < 1e-9, "mixture weights must sum to 1");
        for (const auto& c : p.components) {
          validate(c);
        }
      },
    },
    dist);
}

double
pdf_eval(const Distribution& dist, double y)
{
  return std::visit(
    overloaded{
      [y](const GammaParams& p) { return gamma_pdf(y, p); },
      [y](const ExponentialParams& p) {
        return y < 0 ? 0.0 : p.rate * std::exp(-p.rate * y);
      },
      [y](const NormalParams& p) { return normal_pdf(y, p.mean, p.sd); },
      [y](const LogNormalParams& p) {
        return y > 0 ? lognormal_pdf(y, p) : 0.0;
      },
      [y](const BetaParams& p) {
        if (y < 0 || y > 1) {
          return 0.0;
        }
        const double log_b =
          std::lgamma(p.a) + std::lgamma(p.b) - std::lgamma(p.a + p.b);
        if (y == 0 || y == 1) {
          const double e = (y == 0) ? p.a : p.b;
          if (e < 1) {
            return std::numeric_limits<double>::infinity();
          }
          return e == 1 ? std::exp(-log_b) : 0.0;
        }
        return std::exp((p.a - 1) * std::log(y) + (p.b - 1) * std::log1p(-y) -
                        log_b);
      },
      [y](const UniformParams& p) {
        return (y < p.lo || y > p.hi) ? 0.0 : 1.0 / (p.hi - p.lo);
      },
      [y](const MixtureParams& p) {
        double total = 0.0;
        for (std::size_t k = 0; k < p.components.size(); ++k) {
          total += p.weights[k] * pdf_eval(p.components[k], y);
        }
        return total;
      },
    },
    dist);
}

Eigen::VectorXd
pdf_eval(const Distribution& dist, const Eigen::VectorXd& ys)
{
  Eigen::VectorXd out(ys.size());
  for (Eigen::Index i = 0; i < ys.size(); ++i) {
    out(i) = pdf_eval(dist, ys(i));
  }
  return out;
}

double
sample(const Distribution& dist, Rng& rng)
{
  return std::visit(
    overloaded{
      [&](const GammaParams& p) { return rng.gamma(p.shape, p.rate); },
      [&](const ExponentialParams& p) { return -std::log(rng.uniform()) / p.rate; },
      [&](const NormalParams& p) { return rng.normal(p.mean, p.sd); },
      [&](const LogNormalParams& p) {
        return std::exp(rng.normal(p.mu, std::sqrt(p.log_variance())));
      },
      [&](const BetaParams& p) { return rng.beta(p.a, p.b); },
      [&](const UniformParams& p) {
        return p.lo + (p.hi - p.lo) * rng.uniform();
      },
      [&](const MixtureParams& p) {
        const double r = rng.uniform();
        double cum = 0.0;
        std::size_t k = 0;
        for (; k + 1 < p.weights.size(); ++k) {
          cum += p.weights[k];
          if (r <= cum) {
            break;
          }
        }
        return sample(p.components[k], rng);
      },
    },
    dist);
}

double
mean(const Distribution& dist)
{
  return std::visit(
    overloaded{
      [](const GammaParams& p) { return p.shape / p.rate; },
      [](const ExponentialParams& p) { return 1.0 / p.rate; },
      [](const NormalParams& p) { return p.mean; },
      [](const LogNormalParams& p) { return std::exp(p.mu + 0.5 / p.lambda); },
      [](const BetaParams& p) { return p.a / (p.a + p.b); },
      [](const UniformParams& p) { return 0.5 * (p.lo + p.hi); },
      [](const MixtureParams& p) {
        double m = 0.0;
        for (std::size_t k = 0; k < p.components.size(); ++k) {
          m += p.weights[k] * mean(p.components[k]);
        }
        return m;
      },
    },
    dist);
}

Distribution
parse_distribution(std::string_view text)
{
  text = trim(text);
  if (text.empty()) {
    throw ConfigError("empty distribution descriptor");
  }

  // split on '+' at depth 0 that follows a closing parenthesis
  std::vector<std::string_view> terms;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == '(') {
      ++depth;
    } else if (ch == ')') {
      --depth;
    } else if (ch == '+' && depth == 0 && !trim(text.substr(start, i - start)).empty() &&
               trim(text.substr(start, i - start)).back() == ')') {
      terms.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  terms.push_back(text.substr(start));

  auto has_weight = [](std::string_view term) {
    auto star = term.find('*');
    return star != std::string_view::npos && star < term.find('(');
  };

  if (terms.size() == 1 && !has_weight(terms[0])) {
    return parse_simple(terms[0]);
  }

  MixtureParams mix;
  for (auto term : terms) {
    term = trim(term);
    auto star = term.find('*');
    if (star == std::string_view::npos || star > term.find('(')) {
      throw ConfigError("mixture term '" + std::string(term) +
                        "' needs a weight, e.g. 0.5*gamma(2,1)");
    }
    double w = 0.0;
    if (!parse_double(term.substr(0, star), w)) {
      throw ConfigError("bad mixture weight in '" + std::string(term) + "'");
    }
    mix.weights.push_back(w);
    mix.components.push_back(parse_simple(term.substr(star + 1)));
  }
  Distribution d = std::move(mix);
  validate(d);
  return d;
}

std::string
to_string(const Distribution& dist)
{
  auto two = [](const char* name, double a, double b) {
    return std::string(name) + "(" + format_double(a) + "," + format_double(b) + ")";
  };
  return std::visit(
    overloaded{
      [&](const GammaParams& p) { return two("gamma", p.shape, p.rate); },
      [&](const ExponentialParams& p) {
        return "exp(" + format_double(p.rate) + ")";
      },
      [&](const NormalParams& p) { return two("normal", p.mean, p.sd); },
      [&](const LogNormalParams& p) { return two("lognormal", p.mu, p.lambda); },
      [&](const BetaParams& p) { return two("beta", p.a, p.b); },
      [&](const UniformParams& p) { return two("uniform", p.lo, p.hi); },
      [&](const MixtureParams& p) {
        std::string out;
        for (std::size_t k = 0; k < p.components.size(); ++k) {
          if (k) {
            out += "+";
          }
          out += format_double(p.weights[k]) + "*" + to_string(p.components[k]);
        }
        return out;
      },
    },
    dist);
}

} // namespace lbd
