#pragma once

// CSV writers. Numbers use the shortest decimal form that round-trips to the
// same double; missing values are empty fields; lines end in '\n'.

#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "tsm/equilibrium.hpp"
#include "tsm/scenarios.hpp"
#include "tsm/sweep.hpp"

namespace tsm::csv {

std::string format_number(double value);
std::string format_optional(const std::optional<double>& value);

inline constexpr const char* kScenarioHeader =
    "provider_id,scenario,alpha,beta,gamma,psi,phi,k1,f_c,price,share,demand,supply,provider_payoff,"
    "cloud_payoff,feasible";
inline constexpr const char* kSweepHeader =
    "axis,axis_value,scenario,phi_level,mean_cloud_payoff,mean_provider_payoff,mean_demand,mean_supply,"
    "mean_share,feasible_count";
inline constexpr const char* kEquilibriumHeader =
    "status,price,share,demand,supply,provider_payoff,cloud_payoff,f1_price_positive,f2_price_max,"
    "f3_share_max,share_roots_found,residual";

void write_scenario(std::ostream& out, std::span<const ScenarioRecord> records);

/// Full schema.
void write_sweep(std::ostream& out, const SweepSeries& series);

/// Preset schema: axis, axis_value, scenario, phi_level, the preset's metric
/// columns, feasible_count.
void write_sweep(std::ostream& out, const SweepSeries& series, std::span<const Metric> metrics);

/// Numeric fields are empty unless the result is feasible.
void write_equilibrium(std::ostream& out, const EquilibriumResult& result);

}  // namespace tsm::csv
