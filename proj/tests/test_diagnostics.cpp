#include "lbd/diagnostics.hpp"
#include "lbd/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace lbd;

namespace {

DensityEstimate
normal_on(const Eigen::VectorXd& grid, double mean)
{
  const Eigen::ArrayXd z = grid.array() - mean;
  return DensityEstimate{ grid, ((-0.5 * z.square()).exp() / std::sqrt(2 * M_PI)).matrix(), false };
}

} // namespace

TEST_CASE("running_average")
{
  CHECK(running_average({ 1, 2, 3 }) == std::vector<double>{ 1, 1.5, 2 });
  CHECK(running_average({ 4, 4, 4, 4 }) == std::vector<double>{ 4, 4, 4, 4 });
  CHECK_THROWS_AS(running_average({}), DataError);

  Rng rng(1);
  std::vector<double> x(10000);
  for (auto& v : x) {
    v = rng.normal(3.0, 2.0);
  }
  double total = 0.0;
  for (auto it = x.rbegin(); it != x.rend(); ++it) {
    total += *it;
  }
  CHECK(std::abs(running_average(x).back() - total / x.size()) < 1e-12);
}

TEST_CASE("acf")
{
  Rng rng(2);
  const int n = 10000;
  std::vector<double> iid(n);
  for (auto& v : iid) {
    v = rng.normal(0.0, 1.0);
  }
  const auto r = acf(iid, 100);
  REQUIRE(r.size() == 101);
  CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(r[1]) < 3.0 / std::sqrt(n));
  for (double v : r) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }

  std::vector<double> ar(100000);
  double prev = 0.0;
  for (auto& v : ar) {
    prev = 0.8 * prev + rng.normal(0.0, 1.0);
    v = prev;
  }
  CHECK(std::abs(acf(ar, 5)[1] - 0.8) < 0.02);

  // brute-force definition on a short series
  const std::vector<double> s = { 3, 1, 4, 1, 5, 9, 2, 6 };
  double m = 0.0;
  for (double v : s) {
    m += v / s.size();
  }
  double den = 0.0;
  for (double v : s) {
    den += (v - m) * (v - m);
  }
  const auto rs = acf(s, 3);
  for (int k = 0; k <= 3; ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + k < s.size(); ++t) {
      num += (s[t] - m) * (s[t + k] - m);
    }
    CHECK(rs[k] == doctest::Approx(num / den).epsilon(1e-12));
  }

  CHECK_THROWS_AS(acf({ 2, 2, 2, 2 }, 2), DataError);
  CHECK_THROWS_AS(acf({ 1, 2 }, 2), DataError);
  CHECK_THROWS_AS(acf({ 1, 2, 3 }, 0), DataError);
}

TEST_CASE("average_clusters")
{
  CHECK(average_clusters({ 4, 4, 5 }) == doctest::Approx(13.0 / 3.0));
  CHECK(average_clusters({ 1, 1, 1 }) == 1.0);
  CHECK_THROWS_AS(average_clusters({}), DataError);
}

TEST_CASE("l1_distance")
{
  const Eigen::VectorXd grid = make_grid(0.0, 25.0, 20001);
  const auto p = normal_on(grid, 10.0);
  const auto q = normal_on(grid, 11.0);
  CHECK(l1_distance(p, p) == 0.0);
  CHECK(l1_distance(p, q) ==
        doctest::Approx(4.0 * oracle::normal_cdf(0.5, 0, 1) - 2.0).epsilon(1e-6));

  const Eigen::VectorXd g = make_grid(0.0, 2.0, 201);
  const Eigen::VectorXd left = (g.array() < 1.0).cast<double>();
  const Eigen::VectorXd right = (g.array() > 1.0).cast<double>();
  const auto a = normalize_on_grid(g, left);
  const auto b = normalize_on_grid(g, right);
  CHECK(l1_distance(a, b) == doctest::Approx(2.0).epsilon(1e-12));

  SUBCASE("metric properties")
  {
    Rng rng(3);
    const Eigen::VectorXd h = make_grid(0.0, 5.0, 64);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd x(h.size()), y(h.size()), z(h.size());
      for (Eigen::Index k = 0; k < h.size(); ++k) {
        x(k) = rng.uniform();
        y(k) = rng.uniform();
        z(k) = rng.uniform();
      }
      const auto ex = normalize_on_grid(h, x);
      const auto ey = normalize_on_grid(h, y);
      const auto ez = normalize_on_grid(h, z);
      REQUIRE(l1_distance(ex, ey) == l1_distance(ey, ex));
      REQUIRE(l1_distance(ex, ez) <= l1_distance(ex, ey) + l1_distance(ey, ez) + 1e-12);
      REQUIRE(l1_distance(ex, ey) > 0.0);
      REQUIRE(l1_distance(ex, ey) <= 2.0 + 1e-12);
    }
  }

  CHECK_THROWS_AS(l1_distance(p, a), ConfigError);
}

TEST_CASE("ks_statistic")
{
  auto exp_cdf = [](double x) { return x > 0 ? 1.0 - std::exp(-0.5 * x) : 0.0; };
  const int n = 1000;
  std::vector<double> quantiles(n);
  for (int k = 1; k <= n; ++k) {
    quantiles[k - 1] = -2.0 * std::log(1.0 - (k - 0.5) / n);
  }
  CHECK(ks_statistic(quantiles, exp_cdf) == doctest::Approx(0.5 / n).epsilon(1e-9));
  CHECK(ks_statistic({ 2.0 * std::log(2.0) }, exp_cdf) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_statistic({}, exp_cdf), DataError);

  Rng rng(4);
  std::vector<double> draws(100000);
  for (auto& v : draws) {
    v = rng.gamma(1.0, 0.5);
  }
  const double d = ks_statistic(draws, exp_cdf);
  CHECK(d < oracle::ks_critical_01(draws.size()));
  CHECK(d == doctest::Approx(oracle::ks(draws, exp_cdf)).epsilon(1e-12));
}

TEST_CASE("trace summary JSON round trip")
{
  TraceSummary t;
  t.running_mean = { 1.0, 1.5 };
  t.predictive_running_mean = { 2.0, 0.1 };
  t.acf = { 1.0, 0.25 };
  t.acceptance_running = { 1.0, 0.5 };
  t.cluster_counts = { 3, 4 };
  const nlohmann::json j = t;
  for (const char* key : { "running_mean", "acf", "acceptance_running", "cluster_counts" }) {
    CHECK(j.contains(key));
  }
  const auto back = j.get<TraceSummary>();
  CHECK(back.running_mean == t.running_mean);
  CHECK(back.predictive_running_mean == t.predictive_running_mean);
  CHECK(back.acf == t.acf);
  CHECK(back.acceptance_running == t.acceptance_running);
  CHECK(back.cluster_counts == t.cluster_counts);
}
