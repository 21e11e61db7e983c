#include "lbd/debias.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <set>
#include <vector>

using namespace lbd;
using fixture::hand_state;

namespace {

std::vector<double>
gamma_stream(double shape, double rate, std::size_t n, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) {
    x = rng.gamma(shape, rate);
  }
  return out;
}

std::vector<double>
squares(const std::vector<double>& x)
{
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = x[k] * x[k];
  }
  return out;
}

} // namespace

TEST_CASE("weight functions")
{
  const WeightFn length;
  CHECK(length(3.0) == 3.0);
  CHECK(length.power() == 1.0);

  const auto sq = WeightFn::parse("power:2");
  CHECK(sq(3.0) == doctest::Approx(9.0));
  CHECK(sq.power() == 2.0);

  const auto table = WeightFn::parse("table:1:2,3:6");
  CHECK(table(0.5) == 2.0);
  CHECK(table(2.0) == doctest::Approx(4.0));
  CHECK(table(10.0) == 6.0);
  CHECK_FALSE(table.power().has_value());

  CHECK(WeightFn::parse("length").power() == 1.0);
  CHECK_THROWS_AS(WeightFn::parse("cubic"), ConfigError);
  CHECK_THROWS_AS(WeightFn::parse("table:1:2,0.5:3"), ConfigError);
  CHECK_THROWS_AS(WeightFn::parse("table:1:-2"), ConfigError);
  CHECK_THROWS_AS(WeightFn::parse("power:x"), ConfigError);
}

TEST_CASE("accept_probability")
{
  const WeightFn length;
  CHECK(accept_probability(2.0, 1.0, length) == 1.0);
  CHECK(accept_probability(1.0, 2.0, length) == 0.5);
  CHECK(accept_probability(1.0, 2.0, PowerWeight{ 2.0 }) == doctest::Approx(0.25));
  CHECK_THROWS_AS(accept_probability(0.0, 1.0, length), DomainError);
  CHECK_THROWS_AS(accept_probability(1.0, -1.0, length), DomainError);

  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double x = rng.gamma(2, 1), y = rng.gamma(2, 1);
    const double a = accept_probability(x, y, length);
    REQUIRE(a >= 0.0);
    REQUIRE(a <= 1.0);
    if (x >= y) {
      REQUIRE(a == 1.0);
    }
  }
}

TEST_CASE("debias_step")
{
  Rng rng(2);
  SUBCASE("downhill proposals are always accepted")
  {
    for (int k = 0; k < 1000; ++k) {
      DebiasChain chain(2.0);
      CHECK(debias_step(chain, 1.0, WeightFn{}, rng));
      CHECK(chain.x_current == 1.0);
    }
  }
  SUBCASE("far uphill proposals are almost never accepted")
  {
    DebiasChain chain(1.0);
    for (int k = 0; k < 100000; ++k) {
      debias_step(chain, 1e6, WeightFn{}, rng);
      chain.x_current = 1.0;
    }
    CHECK(chain.accept_count <= 10);
    CHECK(chain.step_count == 100000);
  }
  SUBCASE("rejects nonpositive starts")
  {
    CHECK_THROWS_AS(DebiasChain(0.0), DomainError);
    CHECK_THROWS_AS(DebiasChain(-1.0), DomainError);
  }
  SUBCASE("history")
  {
    DebiasChain chain(1.0, true);
    debias_step(chain, 0.5, WeightFn{}, rng);
    debias_step(chain, 0.25, WeightFn{}, rng);
    CHECK(chain.history == std::vector<double>{ 0.5, 0.25 });
    CHECK(chain.accepted.size() == 2);
    CHECK(chain.accept_count <= chain.step_count);
  }
}

TEST_CASE("run_debias")
{
  SUBCASE("constant proposals")
  {
    Rng rng(3);
    const auto run = run_debias(std::vector<double>(500, 1.7), 1.7, WeightFn{}, rng);
    CHECK(run.acceptance_running.back() == 1.0);
    for (double x : run.samples) {
      CHECK(x == 1.7);
    }
  }

  SUBCASE("toy gamma experiment")
  {
    Rng rng(4);
    const auto proposals = gamma_stream(2.0, 1.0, 10000, 40);
    const auto run = run_debias(proposals, 1.0, WeightFn{}, rng);
    const double m1 = oracle::sample_mean(run.samples);
    const double m2 = oracle::sample_mean(squares(run.samples));
    MESSAGE("toy moments ", m1, " ", m2);
    CHECK(std::abs(m1 - 1.0) < 0.05);
    CHECK(std::abs(m2 - 2.0) < 0.15);
  }

  SUBCASE("states are proposals or the start")
  {
    Rng rng(5);
    const auto proposals = gamma_stream(3.0, 1.0, 5000, 41);
    const std::set<double> seen(proposals.begin(), proposals.end());
    const auto run = run_debias(proposals, 0.77, WeightFn{}, rng);
    for (double x : run.samples) {
      REQUIRE((x == 0.77 || seen.count(x) == 1));
    }
    for (std::size_t k = 0; k < run.acceptance_running.size(); ++k) {
      const double count = run.acceptance_running[k] * static_cast<double>(k + 1);
      REQUIRE(std::abs(count - std::round(count)) < 1e-9);
    }
  }

  SUBCASE("streaming and vector forms agree")
  {
    const auto proposals = gamma_stream(2.0, 1.0, 1000, 42);
    Rng a(6), b(6);
    const auto r1 = run_debias(proposals, 1.0, WeightFn{}, a);
    std::size_t k = 0;
    const auto r2 =
      run_debias([&] { return proposals[k++]; }, 1000, 1.0, WeightFn{}, b);
    CHECK(r1.samples == r2.samples);
  }
}

TEST_CASE("analytic gamma pairs")
{
  struct Pair
  {
    double a, b;
  };
  std::uint64_t seed = 50;
  for (const auto [a, b] : { Pair{ 1, 1 }, Pair{ 1, 0.5 }, Pair{ 9, 1 } }) {
    CAPTURE(a);
    CAPTURE(b);
    Rng rng(seed);
    const auto proposals = gamma_stream(a + 1, b, 100000, seed++);
    const auto run = run_debias(proposals, proposals.front(), WeightFn{}, rng);
    const auto sq = squares(run.samples);
    const double m1 = a / b, m2 = a * (a + 1) / (b * b);
    CHECK(std::abs(oracle::sample_mean(run.samples) - m1) < 3 * oracle::batch_means_se(run.samples));
    CHECK(std::abs(oracle::sample_mean(sq) - m2) < 3 * oracle::batch_means_se(sq));
  }
}

TEST_CASE("squared weight debiases Ga(3, 1) to Ga(1, 1)")
{
  Rng rng(7);
  const auto proposals = gamma_stream(3.0, 1.0, 100000, 60);
  const auto run = run_debias(proposals, 1.0, PowerWeight{ 2.0 }, rng);
  CHECK(std::abs(oracle::sample_mean(run.samples) - 1.0) <
        3 * oracle::batch_means_se(run.samples));
}

TEST_CASE("observed acceptance rate matches the quadrature expectation")
{
  // x ~ f = Ga(1, 1), y ~ g = Ga(2, 1): E min{1, x / y}
  auto inner = [](double x) {
    return oracle::integrate_half_line([x](double y) {
      return y > 0 ? std::min(1.0, x / y) * oracle::gamma_density(y, 2, 1) : 0.0;
    });
  };
  const double expected =
    oracle::integrate_half_line([&](double x) { return x > 0 ? inner(x) * std::exp(-x) : 0.0; });

  Rng rng(8);
  const auto proposals = gamma_stream(2.0, 1.0, 200000, 61);
  const auto run = run_debias(proposals, 1.0, WeightFn{}, rng);
  std::vector<double> acc(run.accepted.begin(), run.accepted.end());
  MESSAGE("expected acceptance ", expected, ", observed ", oracle::sample_mean(acc));
  CHECK(std::abs(oracle::sample_mean(acc) - expected) < 3 * oracle::batch_means_se(acc));
}

TEST_CASE("detailed balance on a discretized state space")
{
  // independence proposals from g = Ga(2, 1) restricted to 50 points
  const int m = 50;
  Eigen::VectorXd x(m), q(m);
  for (int k = 0; k < m; ++k) {
    x(k) = 0.1 + 0.2 * k;
    q(k) = oracle::gamma_density(x(k), 2.0, 1.0);
  }
  q /= q.sum();

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i != j) {
        P(i, j) = q(j) * accept_probability(x(i), x(j), WeightFn{});
      }
    }
    P(i, i) = 1.0 - P.row(i).sum();
  }

  // stationary vector: left null space of P - I with sum one
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(m, m);
  A.row(m - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(m - 1) = 1.0;
  const Eigen::VectorXd pi = A.fullPivLu().solve(rhs);

  Eigen::VectorXd f = q.array() / x.array();
  f /= f.sum();
  CHECK(0.5 * (pi - f).cwiseAbs().sum() < 1e-3);

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      REQUIRE(std::abs(f(i) * P(i, j) - f(j) * P(j, i)) < 1e-14);
    }
  }
}

TEST_CASE("closed-form debiased mixture")
{
  Hyperparams hp;
  const auto one = hand_state({ fixture::one_minus_eps() }, { 0.0 }, 1.0, { 0 });
  CHECK(debias_normalizer(one, hp) == doctest::Approx(1.6487213).epsilon(1e-7));
  CHECK(exact_debias_density(one, hp, 1.0) == doctest::Approx(0.2419707).epsilon(1e-6));
  CHECK_THROWS_AS(exact_debias_density(one, hp, 0.0), DomainError);
  CHECK_THROWS_AS(debias_normalizer(one, hp, WeightFn::parse("table:1:1,2:2")), ConfigError);

  // weights (0.5, 0.5) with the remainder pushed below double resolution
  auto half = hand_state({ 0.5, fixture::one_minus_eps() }, { 0.0, 1.0 }, 1.0, { 0 });
  CHECK(debias_normalizer(half, hp) == doctest::Approx(1.1276260).epsilon(1e-7));

  SUBCASE("random states against quadrature")
  {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      Hyperparams h;
      h.s = 0.3 + rng.uniform();
      const auto k = static_cast<std::size_t>(1 + rng.uniform() * 4);
      std::vector<double> v(k), mu(k);
      for (std::size_t j = 0; j < k; ++j) {
        v[j] = 0.1 + 0.8 * rng.uniform();
        mu[j] = rng.normal(0.5, 1.0);
      }
      const auto s = hand_state(v, mu, 0.5 + 4 * rng.uniform(), { 0 });
      for (const WeightFn w : { WeightFn{}, WeightFn(PowerWeight{ 0.5 }) }) {
        CAPTURE(w.describe());
        const double p = *w.power();
        const double c = oracle::integrate_half_line(
          [&](double y) { return y > 0 ? std::pow(y, -p) * mixture_density(s, h, y) : 0.0; });
        CHECK(std::abs(debias_normalizer(s, h, w) - c) < 1e-6 * c);
        const double mass = oracle::integrate_half_line(
          [&](double y) { return y > 0 ? exact_debias_density(s, h, y, w) : 0.0; });
        CHECK(std::abs(mass - 1.0) < 1e-6);
        for (double y : { 0.2, 1.0, 3.0 }) {
          const double cdf = oracle::integrate(
            [&](double t) { return t > 0 ? exact_debias_density(s, h, t, w) : 0.0; }, 0.0, y,
            1e-12);
          CHECK(exact_debias_cdf(s, h, y, w) == doctest::Approx(cdf).epsilon(1e-8));
        }
      }
    }
  }

  SUBCASE("grid overload")
  {
    const Eigen::VectorXd grid = make_grid(0.0, 8.0, 65);
    const auto values = exact_debias_density(half, hp, grid);
    CHECK(values(0) == 0.0);
    for (Eigen::Index k = 1; k < grid.size(); ++k) {
      CHECK(values(k) == doctest::Approx(exact_debias_density(half, hp, grid(k))).epsilon(1e-12));
    }
  }
}

TEST_CASE("debias chain driven by a frozen predictive")
{
  Hyperparams hp;
  const auto s = hand_state({ 0.3, 0.6, 0.9 }, { -0.5, 0.6, 1.5 }, 3.0, { 0 });
  Rng pred(10), acc(11);
  const auto run =
    run_debias([&] { return sample_predictive(s, hp, pred); }, 100000, 1.0, WeightFn{}, acc);
  std::vector<double> thinned;
  for (std::size_t k = 0; k < run.samples.size(); k += 10) {
    thinned.push_back(run.samples[k]);
  }
  auto cdf = [&](double y) { return exact_debias_cdf(s, hp, y); };
  CHECK(oracle::ks(thinned, cdf) < oracle::ks_critical_01(thinned.size()));
}

TEST_CASE("analytic debiased distributions")
{
  const WeightFn length;
  auto f = debiased_distribution(GammaParams{ 2.0, 0.5 }, length);
  REQUIRE(std::holds_alternative<GammaParams>(f));
  CHECK(std::get<GammaParams>(f).shape == doctest::Approx(1.0));
  CHECK(std::get<GammaParams>(f).rate == 0.5);

  const Distribution g2 = parse_distribution("0.25*gamma(2,1)+0.75*gamma(10,1)");
  const auto f2 = debiased_distribution(g2, length);
  for (double y : { 0.0, 0.5, 2.0, 8.0 }) {
    const double want = 0.75 * oracle::gamma_density(y, 1, 1) + 0.25 * oracle::gamma_density(y, 9, 1);
    CHECK(pdf_eval(f2, y) == doctest::Approx(want).epsilon(1e-12));
  }

  // log-normal under power weights, against quadrature of y^-p g
  const double mu = 0.4, sd = std::sqrt(0.5);
  for (double p : { 0.5, 1.0, 2.0 }) {
    const auto fl = debiased_distribution(LogNormalParams{ mu, 2.0 }, PowerWeight{ p });
    auto kernel = [&](double y) {
      if (y <= 0) {
        return 0.0;
      }
      const double z = (std::log(y) - mu) / sd;
      return std::exp(-0.5 * z * z - (1 + p) * std::log(y)) / (sd * std::sqrt(2 * M_PI));
    };
    const double c = oracle::integrate_half_line(kernel);
    for (double y : { 0.3, 1.0, 4.0 }) {
      CHECK(pdf_eval(fl, y) == doctest::Approx(kernel(y) / c).epsilon(1e-9));
    }
  }

  CHECK_THROWS_AS(debiased_distribution(GammaParams{ 1.0, 1.0 }, length), ConfigError);
  CHECK_THROWS_AS(debiased_distribution(NormalParams{ 0, 1 }, length), ConfigError);
  CHECK_THROWS_AS(debiased_distribution(GammaParams{ 2.0, 1.0 }, WeightFn::parse("table:1:1")),
                  ConfigError);
}
