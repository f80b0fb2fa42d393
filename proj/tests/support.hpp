#pragma once

// Shared fixtures for the test binaries.

#include <cmath>
#include <random>

#include "tsm/market.hpp"

namespace tsm::test {

// Feasible market with an interior equilibrium near share 0.2754.
inline MarketParams feasible_fixture() {
  MarketParams p;
  p.alpha = 0.48;
  p.beta = 1.81;
  p.gamma = 0.25;
  p.psi = 0.1;
  p.phi = 0.39;
  p.k1 = 0.78;
  p.k2 = 1.0;
  p.f_c = 0.43;
  p.f_s = 23.7;
  return p;
}

// Default parameters: alpha*beta = 0.38 keeps a1/a2 < 1, so f2 fails.
inline MarketParams f2_violating_fixture() { return MarketParams{}; }

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0 : std::abs(a - b) / scale;
}

// Valid parameters over the default sampling ranges.
inline MarketParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MarketParams p;
  p.alpha = 0.1 + 0.6 * u(rng);
  p.beta = (0.999 * u(rng)) / p.alpha;
  p.gamma = 0.35 * u(rng);
  p.psi = 0.35 * u(rng);
  p.phi = 5.0 * u(rng);
  p.k1 = 0.1 + 0.8 * u(rng);
  p.k2 = 0.5 + u(rng);
  p.f_c = 0.1 + 2.0 * u(rng);
  p.f_s = 50.0 * u(rng);
  return p;
}

}  // namespace tsm::test
