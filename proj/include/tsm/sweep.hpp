#pragma once

// Sensitivity sweeps: one population is sampled once, then every cell
// (axis value x scenario x phi level) re-runs the scenario kernels with the
// swept parameter overridden and aggregates the feasible records.

#include <cstddef>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsm/population.hpp"
#include "tsm/scenarios.hpp"

namespace tsm {

enum class SweepAxis { alpha_beta_product, phi, gamma, k1 };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_axis(std::string_view name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::alpha_beta_product;
  std::vector<double> grid;
  std::vector<double> phi_levels{0.5, 1.0, 1.5, 2.0, 5.0};  // ignored on the phi axis
  std::vector<ScenarioTag> scenarios{std::begin(kAllScenarios), std::end(kAllScenarios)};
  PopulationSpec population;
  TwoSidedMode mode = TwoSidedMode::equilibrium;
};

/// Throws std::invalid_argument when the grid is empty, not strictly
/// increasing, or leaves the axis range.
void validate(const SweepSpec& spec);

/// Allowed closed range per axis.
std::pair<double, double> axis_range(SweepAxis axis);

struct SweepCell {
  double axis_value = 0;
  ScenarioTag scenario = ScenarioTag::two_sided;
  double phi_level = 0;  // equals axis_value on the phi axis
  std::size_t n = 0;
  std::size_t feasible_count = 0;
  // Means over feasible records; empty when feasible_count == 0.
  std::optional<double> mean_cloud_payoff, mean_provider_payoff, mean_demand, mean_supply, mean_share;
};

struct SweepSeries {
  SweepAxis axis = SweepAxis::alpha_beta_product;
  std::string statistic = "mean_over_feasible";
  std::vector<SweepCell> cells;  // axis value, then scenario, then phi level
};

/// Parameters of `provider` as evaluated in a cell.
MarketParams cell_params(const Provider& provider, SweepAxis axis, double axis_value, double phi_level);

/// Raw records of one cell, ordered by provider id.
std::vector<ScenarioRecord> cell_records(const Population& population, const SweepSpec& spec, double axis_value,
                                         ScenarioTag scenario, double phi_level);

SweepCell aggregate_cell(std::span<const ScenarioRecord> records, double axis_value, ScenarioTag scenario,
                         double phi_level);

SweepSeries run_sweep(const SweepSpec& spec, Execution exec = Execution::serial);

// Axis-specific entry points; each checks the axis before delegating.
SweepSeries sweep_externalities(const SweepSpec& spec, Execution exec = Execution::serial);
SweepSeries sweep_phi(const SweepSpec& spec, Execution exec = Execution::serial);
SweepSeries sweep_gamma(const SweepSpec& spec, Execution exec = Execution::serial);
SweepSeries sweep_k1(const SweepSpec& spec, Execution exec = Execution::serial);

/// count evenly spaced values on [lo, hi], each rounded to 12 decimals.
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

enum class Metric { cloud_payoff, provider_payoff, demand, supply, share };
std::string_view column_name(Metric metric);

/// Presets fig4..fig15: a sweep layout plus the metric columns to emit.
struct SweepPreset {
  std::string name;
  SweepSpec spec;  // population left at defaults
  std::vector<Metric> metrics;
};

/// Throws std::invalid_argument for unknown names.
SweepPreset find_preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace tsm
