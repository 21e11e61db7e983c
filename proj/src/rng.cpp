#include "lbd/rng.hpp"

#include <random>

namespace lbd {

double
Rng::normal(double mean, double sd)
{
  std::normal_distribution<double> dist(mean, sd);
  return dist(*this);
}

double
Rng::gamma(double shape, double rate)
{
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(*this);
}

double
Rng::beta(double a, double b)
{
  // ratio of gammas; guard the (astronomically rare) 0/0
  for (;;) {
    double x = gamma(a, 1.0);
    double y = gamma(b, 1.0);
    double s = x + y;
    if (s > 0.0) {
      return x / s;
    }
  }
}

} // namespace lbd
