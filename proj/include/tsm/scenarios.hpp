#pragma once

// Business-model runs over a provider population:
//   two_sided      the leader-follower game (closed-form equilibrium, or the
//                  platform optimizing its share against a declared price)
//   fifty_fifty    share pinned to 1/2 with phi = 1, provider prices optimally
//   pay_as_you_go  provider rents infrastructure at a flat rate
//
// Every run returns one record per provider ordered by provider id.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tsm/market.hpp"
#include "tsm/parallel.hpp"

namespace tsm {

enum class ScenarioTag { two_sided, fifty_fifty, pay_as_you_go };
enum class TwoSidedMode { equilibrium, declared_price };

std::string_view to_string(ScenarioTag tag);
std::string_view to_string(TwoSidedMode mode);
/// Throws std::invalid_argument for unknown names.
ScenarioTag parse_scenario(std::string_view name);
TwoSidedMode parse_mode(std::string_view name);

inline constexpr ScenarioTag kAllScenarios[] = {ScenarioTag::two_sided, ScenarioTag::fifty_fifty,
                                                ScenarioTag::pay_as_you_go};

struct Provider {
  std::size_t id = 0;
  MarketParams params;
  double declared_price = 0;  // USD/hour, the sampled service price
};

using Population = std::vector<Provider>;

struct ScenarioRecord {
  std::size_t provider_id = 0;
  ScenarioTag scenario = ScenarioTag::two_sided;
  MarketParams params;  // snapshot actually used (fifty_fifty forces phi = 1)
  std::optional<double> price;
  std::optional<double> share;  // empty for pay_as_you_go and infeasible records
  std::optional<double> demand;
  std::optional<double> supply;
  double provider_payoff = 0;  // zero when infeasible
  double cloud_payoff = 0;
  bool feasible = false;
};

// Per-provider kernels.
ScenarioRecord two_sided_record(const Provider& provider, TwoSidedMode mode);
ScenarioRecord fifty_fifty_record(const Provider& provider);
ScenarioRecord pay_as_you_go_record(const Provider& provider);
ScenarioRecord scenario_record(const Provider& provider, ScenarioTag tag, TwoSidedMode mode);

/// Share in (eps, 1-eps) maximizing the platform payoff at a fixed price;
/// golden-section search to 1e-8, with both endpoints as fall-backs.
double maximize_share_at_price(double price, const MarketParams& params);

/// Rented infrastructure maximizing (P - f_c) * D_c - p_s * D_s under the
/// consumer demand curve. Requires price > f_c and alpha != 1.
double pay_as_you_go_supply(double price, const MarketParams& params);

std::vector<ScenarioRecord> run_two_sided(const Population& population,
                                          TwoSidedMode mode = TwoSidedMode::equilibrium,
                                          Execution exec = Execution::serial);
std::vector<ScenarioRecord> run_fifty_fifty(const Population& population, Execution exec = Execution::serial);
std::vector<ScenarioRecord> run_pay_as_you_go(const Population& population, Execution exec = Execution::serial);
std::vector<ScenarioRecord> run_scenario(const Population& population, ScenarioTag tag, TwoSidedMode mode,
                                         Execution exec = Execution::serial);

class MismatchedPopulation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Statistic {
  double mean = 0;
  double median = 0;
  double total = 0;
};

struct ScenarioSummary {
  ScenarioTag scenario = ScenarioTag::two_sided;
  std::size_t n = 0;
  std::size_t feasible = 0;
  double feasible_fraction = 0;
  // Aggregates over feasible records; empty when feasible == 0.
  std::optional<Statistic> provider_payoff, cloud_payoff, demand, supply, share;
};

struct ScenarioDifference {
  ScenarioTag scenario = ScenarioTag::two_sided;  // compared against the baseline
  std::optional<double> provider_payoff, cloud_payoff, demand, supply;  // mean(scenario) - mean(baseline)
};

struct ScenarioComparison {
  ScenarioTag baseline = ScenarioTag::two_sided;
  std::vector<ScenarioSummary> summaries;  // in order of first appearance
  std::vector<ScenarioDifference> differences;
};

/// Aggregates records grouped by scenario. Every scenario must cover the same
/// set of provider ids, otherwise MismatchedPopulation is thrown. The first
/// scenario seen is the baseline for differences.
ScenarioComparison compare_scenarios(std::span<const ScenarioRecord> records);

}  // namespace tsm
