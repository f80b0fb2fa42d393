#pragma once

// Randomized verification of the closed-form equilibrium against the
// brute-force oracle and the first/second-order conditions.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tsm/equilibrium.hpp"
#include "tsm/population.hpp"

namespace tsm {

enum class Fault { none, wrong_sign_a3 };

Fault parse_fault(std::string_view name);

struct VerifyOptions {
  std::size_t draws = 500;
  std::size_t grid_n = 2000;
  std::size_t max_attempts = 50'000'000;
  PopulationSpec population = default_verify_population();
  Fault fault = Fault::none;
  Execution exec = Execution::parallel;

  /// Default population ranges with phi ~ U(0, 5).
  static PopulationSpec default_verify_population();
};

/// Coefficients fed to the closed-form path, with the configured fault applied.
Coefficients closed_form_coefficients(const MarketParams& params, Fault fault);

struct VerifiedDraw {
  Provider provider;
  EquilibriumResult equilibrium;
};

struct DrawSearch {
  std::vector<VerifiedDraw> draws;  // in attempt order
  std::size_t attempts = 0;
  std::size_t outside_oracle_grid = 0;  // feasible, but share outside [0.01, 0.99]
};

/// Scans providers 0, 1, 2, ... of options.population until options.draws
/// feasible equilibria with share inside the oracle grid are found or
/// max_attempts is reached.
DrawSearch find_feasible_draws(const VerifyOptions& options);

struct PropertyOutcome {
  std::string name;
  std::size_t checked = 0;
  std::size_t failed = 0;
  double worst = 0;        // largest observed error measure
  double tolerance = 0;
  bool passed() const { return checked > 0 && failed == 0; }
};

struct VerificationReport {
  std::size_t attempts = 0;
  std::size_t feasible_draws = 0;
  std::size_t outside_oracle_grid = 0;
  bool region_empty = false;
  std::vector<PropertyOutcome> properties;
  // Leader-commitment diagnostic: |share_leader - share*|.
  double leader_gap_mean = 0;
  double leader_gap_max = 0;
  // Draws where a corner agreement at the share-grid edge pays the platform
  // more than the interior equilibrium.
  std::size_t corner_dominated = 0;
  double seconds = 0;

  bool passed() const;
  const PropertyOutcome* find(std::string_view name) const;
};

VerificationReport run_verification(const VerifyOptions& options);

}  // namespace tsm
