#pragma once

// Hand-built chain states and small datasets shared by the test binaries.

#include "lbd/dpmm.hpp"

#include <cmath>
#include <vector>

namespace fixture {

//! State with the given sticks; slices at half the allocated weight.
inline lbd::ChainState
hand_state(std::vector<double> v, std::vector<double> mu, double lambda, std::vector<int> d)
{
  lbd::ChainState s;
  s.v = std::move(v);
  s.mu = std::move(mu);
  s.lambda = lambda;
  s.d = std::move(d);
  lbd::recompute_weights(s);
  s.u.resize(s.d.size());
  for (std::size_t i = 0; i < s.d.size(); ++i) {
    s.u[i] = 0.5 * s.w[static_cast<std::size_t>(s.d[i])];
  }
  return s;
}

inline lbd::Dataset
lognormal_data(std::size_t n, double mu, double sd, std::uint64_t seed)
{
  lbd::Rng rng(seed);
  std::vector<double> y(n);
  for (auto& yi : y) {
    yi = std::exp(rng.normal(mu, sd));
  }
  return lbd::Dataset::from(y);
}

inline lbd::Dataset
gamma_data(std::size_t n, double shape, double rate, std::uint64_t seed)
{
  lbd::Rng rng(seed);
  std::vector<double> y(n);
  for (auto& yi : y) {
    yi = rng.gamma(shape, rate);
  }
  return lbd::Dataset::from(y);
}

inline double
one_minus_eps()
{
  return std::nextafter(1.0, 0.0);
}

} // namespace fixture
