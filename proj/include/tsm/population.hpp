#pragma once

// Seeded sampling of provider populations. Each provider draws from its own
// generator stream keyed by (seed, provider id), so a population is identical
// regardless of how many workers sample it, and provider i is the same in a
// population of 3 or of 300.

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "tsm/parallel.hpp"
#include "tsm/scenarios.hpp"

namespace tsm {

class SamplingExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Attempt cap per field for truncation by rejection.
inline constexpr std::size_t kMaxRejections = 1'000'000;

struct Distribution {
  enum class Kind { fixed, uniform, normal };
  Kind kind = Kind::fixed;
  double a = 0;  // value | lower bound | mean
  double b = 0;  // unused | upper bound | standard deviation
  double lo = 0, hi = 0;  // truncation window (normal only)

  static Distribution fixed(double value) { return {Kind::fixed, value, 0, value, value}; }
  static Distribution uniform(double lo, double hi) { return {Kind::uniform, lo, hi, lo, hi}; }
  static Distribution truncated_normal(double mean, double sd, double lo, double hi) {
    return {Kind::normal, mean, sd, lo, hi};
  }
};

struct PopulationSpec {
  std::size_t n_providers = 300;
  std::uint64_t seed = 20201;
  Distribution price = Distribution::truncated_normal(1.7, 0.5, 0.2, 3.2);
  Distribution alpha = Distribution::truncated_normal(0.38, 0.1, 0.1, 0.7);
  // beta ~ U(0, 1/alpha), rejected until alpha*beta < beta_product_cap
  double beta_product_cap = kMaxExternalityProduct;
  Distribution gamma = Distribution::uniform(0.1, 0.35);
  Distribution psi = Distribution::fixed(0.1);
  Distribution phi = Distribution::uniform(0.0, 5.0);
  Distribution k1 = Distribution::uniform(0.1, 0.9);
  double k2 = 1.0;
  double f_s = 23.7;
  double p_s = 36.0;
  double fc_ratio = 0.66;  // f_c = fc_ratio * declared price
};

/// Throws std::invalid_argument describing the first inconsistent field.
void validate(const PopulationSpec& spec);

/// Provider `id` of the population described by spec (n_providers ignored).
Provider sample_provider(const PopulationSpec& spec, std::size_t id);

Population sample_population(const PopulationSpec& spec, Execution exec = Execution::serial);

}  // namespace tsm
