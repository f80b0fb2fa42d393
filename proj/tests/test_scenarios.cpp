#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "support.hpp"
#include "tsm/equilibrium.hpp"
#include "tsm/population.hpp"
#include "tsm/scenarios.hpp"

using namespace tsm;
using tsm::test::rel_diff;

namespace {

Provider make_provider(std::size_t id, const MarketParams& params, double declared_price) {
  Provider p;
  p.id = id;
  p.params = params;
  p.declared_price = declared_price;
  return p;
}

bool same_bits(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::memcmp(&*a, &*b, sizeof(double)) == 0;
}

bool identical(const ScenarioRecord& a, const ScenarioRecord& b) {
  return a.provider_id == b.provider_id && a.scenario == b.scenario && a.params == b.params &&
         same_bits(a.price, b.price) && same_bits(a.share, b.share) && same_bits(a.demand, b.demand) &&
         same_bits(a.supply, b.supply) && same_bits(a.provider_payoff, b.provider_payoff) &&
         same_bits(a.cloud_payoff, b.cloud_payoff) && a.feasible == b.feasible;
}

// Default population with the feasible fixture mixed in, so every scenario
// has feasible and infeasible records.
Population mixed_population() {
  PopulationSpec spec;
  spec.n_providers = 300;
  Population pop = sample_population(spec);
  for (std::size_t i = 0; i < pop.size(); i += 10) pop[i].params = test::feasible_fixture();
  return pop;
}

// Each record's quantities follow from its own (price, share, params).
void check_consistent(const ScenarioRecord& r) {
  if (!r.feasible) return;
  const MarketParams& p = r.params;
  REQUIRE(r.price);
  REQUIRE(r.demand);
  REQUIRE(r.supply);
  if (r.scenario == ScenarioTag::pay_as_you_go) {
    CHECK_FALSE(r.share);
    CHECK(rel_diff(*r.demand, consumer_demand_primitive(*r.price, *r.supply, p)) <= 1e-9);
    CHECK(rel_diff(r.provider_payoff, (*r.price - p.f_c) * *r.demand - p.p_s * *r.supply) <= 1e-9);
    CHECK(rel_diff(r.cloud_payoff, (p.p_s - p.f_s) * *r.supply) <= 1e-9);
    return;
  }
  REQUIRE(r.share);
  CHECK(rel_diff(*r.demand, demand_reduced(*r.price, *r.share, p)) <= 1e-9);
  CHECK(rel_diff(*r.supply, supply_reduced(*r.price, *r.share, p)) <= 1e-9);
  CHECK(rel_diff(r.provider_payoff, provider_payoff(*r.price, *r.share, p)) <= 1e-9);
  const double scale = std::max(*r.price * *r.share * *r.demand, p.f_s * *r.supply);
  CHECK(std::abs(r.cloud_payoff - cloud_payoff(*r.price, *r.share, p)) <= 1e-9 * scale);
}

}  // namespace

TEST_CASE("two-sided record delegates to the equilibrium solver") {
  const Provider provider = make_provider(4, test::feasible_fixture(), 1.0);
  const std::vector<ScenarioRecord> records = run_two_sided({provider});
  REQUIRE(records.size() == 1);
  const EquilibriumResult eq = stackelberg_solve(provider.params);
  const ScenarioRecord& r = records[0];
  CHECK(r.feasible);
  CHECK(r.provider_id == 4);
  CHECK(*r.price == eq.price_star);
  CHECK(*r.share == eq.share_star);
  CHECK(*r.demand == eq.demand);
  CHECK(*r.supply == eq.supply);
  CHECK(r.provider_payoff == eq.provider_payoff);
  CHECK(r.cloud_payoff == eq.cloud_payoff);

  const ScenarioRecord bad = two_sided_record(make_provider(0, test::f2_violating_fixture(), 1.0),
                                              TwoSidedMode::equilibrium);
  CHECK_FALSE(bad.feasible);
  CHECK_FALSE(bad.share);
  CHECK(bad.provider_payoff == 0);
}

TEST_CASE("declared price with phi = 0 puts the share on its upper bound") {
  MarketParams p = test::feasible_fixture();
  p.phi = 0;
  const ScenarioRecord r = two_sided_record(make_provider(0, p, 1.7), TwoSidedMode::declared_price);
  REQUIRE(r.share);
  CHECK(*r.share == 1.0 - kShareEpsilon);
  CHECK(r.feasible);
}

TEST_CASE("declared-price share beats a fine grid of alternatives") {
  const Population pop = mixed_population();
  for (std::size_t i = 0; i < 30; ++i) {
    const Provider& provider = pop[i];
    const double share = maximize_share_at_price(provider.declared_price, provider.params);
    const double best = cloud_payoff(provider.declared_price, share, provider.params);
    for (int k = 1; k < 1000; ++k) {
      const double value = cloud_payoff(provider.declared_price, k / 1000.0, provider.params);
      CHECK(value <= best + 1e-12 * std::abs(best));
    }
  }
}

TEST_CASE("shuffling the population leaves the records unchanged") {
  const Population pop = mixed_population();
  Population shuffled = pop;
  std::mt19937_64 rng(99);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  for (ScenarioTag tag : kAllScenarios) {
    for (TwoSidedMode mode : {TwoSidedMode::equilibrium, TwoSidedMode::declared_price}) {
      const auto a = run_scenario(pop, tag, mode);
      const auto b = run_scenario(shuffled, tag, mode);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(identical(a[i], b[i]));
    }
  }
}

TEST_CASE("serial and parallel runs are bit-identical") {
  const Population pop = mixed_population();
  for (ScenarioTag tag : kAllScenarios) {
    const auto a = run_scenario(pop, tag, TwoSidedMode::declared_price, Execution::serial);
    const auto b = run_scenario(pop, tag, TwoSidedMode::declared_price, Execution::parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(identical(a[i], b[i]));
  }
}

TEST_CASE("fifty-fifty") {
  const MarketParams p = test::feasible_fixture();
  const ScenarioRecord r = fifty_fifty_record(make_provider(0, p, 1.0));
  REQUIRE(r.feasible);
  MarketParams forced = p;
  forced.phi = 1;
  CHECK(r.params == forced);
  const Coefficients c = derive_coefficients(forced);
  CHECK(rel_diff(*r.price, 2 * c.a1 * p.f_c / (c.a1 - c.a2)) <= 1e-14);
  CHECK(*r.share == 0.5);

  // Grid argmax of the provider payoff at share 0.5.
  const double lo = 2 * p.f_c, hi = 40 * p.f_c;
  const int n = 100000;
  const double step = (hi - lo) / (n - 1);
  int best = 0;
  double best_value = -1e300;
  for (int i = 0; i < n; ++i) {
    const double value = provider_payoff(lo + step * i, 0.5, forced);
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  CHECK(std::abs(*r.price - (lo + step * best)) <= step);

  const ScenarioRecord bad = fifty_fifty_record(make_provider(0, test::f2_violating_fixture(), 1.0));
  CHECK_FALSE(bad.feasible);
}

TEST_CASE("pay-as-you-go supply") {
  MarketParams p;
  p.alpha = 0.5;
  p.k1 = 1;
  p.gamma = 0;
  p.f_c = 1;
  p.p_s = 1;
  CHECK(pay_as_you_go_supply(2.0, p) == 0.25);

  p = test::feasible_fixture();
  p.p_s = p.f_s;
  const ScenarioRecord r = pay_as_you_go_record(make_provider(0, p, 1.5));
  REQUIRE(r.feasible);
  CHECK(r.cloud_payoff == 0.0);
  CHECK_FALSE(r.share);

  const ScenarioRecord below = pay_as_you_go_record(make_provider(0, p, 0.3));
  CHECK_FALSE(below.feasible);
}

TEST_CASE("pay-as-you-go supply satisfies its first-order condition") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    MarketParams p = test::random_params(rng);
    p.p_s = 1 + 50 * u(rng);
    const double price = p.f_c * (1.05 + 2 * u(rng));
    const double s = pay_as_you_go_supply(price, p);
    auto payoff = [&](double supply) {
      return (price - p.f_c) * consumer_demand_primitive(price, supply, p) - p.p_s * supply;
    };
    const double h = 1e-5 * s;
    const double gradient = (payoff(s + h) - payoff(s - h)) / (2 * h);
    worst = std::max(worst, std::abs(gradient) / p.p_s);  // relative to the marginal rental cost
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("pay-as-you-go supply falls as the rental rate rises") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    MarketParams p = test::random_params(rng);
    const double price = p.f_c * (1.1 + u(rng));
    p.p_s = 1 + 30 * u(rng);
    const double a = pay_as_you_go_supply(price, p);
    p.p_s *= 1.0 + 0.5 * u(rng) + 1e-3;
    CHECK(pay_as_you_go_supply(price, p) < a);
  }
}

TEST_CASE("records are consistent with their own prices and shares") {
  const Population pop = mixed_population();
  for (ScenarioTag tag : kAllScenarios) {
    for (TwoSidedMode mode : {TwoSidedMode::equilibrium, TwoSidedMode::declared_price}) {
      for (const ScenarioRecord& r : run_scenario(pop, tag, mode)) check_consistent(r);
    }
  }
}

TEST_CASE("comparing scenarios") {
  const Population pop = mixed_population();
  std::vector<ScenarioRecord> records = run_two_sided(pop);

  // Same records under two tags: zero differences.
  std::vector<ScenarioRecord> twin = records;
  for (ScenarioRecord& r : twin) r.scenario = ScenarioTag::fifty_fifty;
  std::vector<ScenarioRecord> both = records;
  both.insert(both.end(), twin.begin(), twin.end());
  const ScenarioComparison self = compare_scenarios(both);
  REQUIRE(self.differences.size() == 1);
  CHECK(*self.differences[0].cloud_payoff == 0.0);
  CHECK(*self.differences[0].provider_payoff == 0.0);
  CHECK(*self.differences[0].demand == 0.0);

  // Totals are sums of feasible records.
  const ScenarioComparison cmp = compare_scenarios(records);
  REQUIRE(cmp.summaries.size() == 1);
  const ScenarioSummary& s = cmp.summaries[0];
  double total = 0;
  std::size_t feasible = 0;
  for (const ScenarioRecord& r : records) {
    if (!r.feasible) continue;
    total += r.cloud_payoff;
    ++feasible;
  }
  REQUIRE(feasible > 0);
  CHECK(s.feasible == feasible);
  CHECK(s.n == records.size());
  CHECK(rel_diff(s.cloud_payoff->total, total) <= 1e-9);
  CHECK(rel_diff(s.cloud_payoff->mean, total / static_cast<double>(feasible)) <= 1e-9);

  // Nothing feasible: no aggregates.
  std::vector<ScenarioRecord> none = records;
  for (ScenarioRecord& r : none) r.feasible = false;
  const ScenarioSummary empty = compare_scenarios(none).summaries[0];
  CHECK(empty.feasible == 0);
  CHECK(empty.feasible_fraction == 0.0);
  CHECK_FALSE(empty.cloud_payoff);
  CHECK_FALSE(empty.provider_payoff);

  // Different populations are rejected.
  std::vector<ScenarioRecord> mismatched = records;
  ScenarioRecord extra = twin.front();
  extra.provider_id = 100000;
  mismatched.push_back(extra);
  mismatched.insert(mismatched.end(), twin.begin(), twin.end());
  CHECK_THROWS_AS(compare_scenarios(mismatched), MismatchedPopulation);
}
