#include "tsm/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "tsm/equilibrium.hpp"

namespace tsm {

namespace {

constexpr double kGoldenTolerance = 1e-8;

ScenarioRecord base_record(const Provider& provider, ScenarioTag tag) {
  ScenarioRecord r;
  r.provider_id = provider.id;
  r.scenario = tag;
  r.params = provider.params;
  return r;
}

std::vector<ScenarioRecord> sorted_by_id(std::vector<ScenarioRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const ScenarioRecord& a, const ScenarioRecord& b) { return a.provider_id < b.provider_id; });
  return records;
}

template <class Kernel>
std::vector<ScenarioRecord> run_each(const Population& population, Execution exec, Kernel kernel) {
  std::vector<ScenarioRecord> out(population.size());
  for_each_index(population.size(), exec, [&](std::size_t i) { out[i] = kernel(population[i]); });
  return sorted_by_id(std::move(out));
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

Statistic statistic_of(const std::vector<double>& values) {
  Statistic s;
  for (double v : values) s.total += v;
  s.mean = s.total / static_cast<double>(values.size());
  s.median = median_of(values);
  return s;
}

}  // namespace

std::string_view to_string(ScenarioTag tag) {
  switch (tag) {
    case ScenarioTag::two_sided: return "two_sided";
    case ScenarioTag::fifty_fifty: return "fifty_fifty";
    case ScenarioTag::pay_as_you_go: return "pay_as_you_go";
  }
  return "unknown";
}

std::string_view to_string(TwoSidedMode mode) {
  return mode == TwoSidedMode::equilibrium ? "equilibrium" : "declared-price";
}

ScenarioTag parse_scenario(std::string_view name) {
  for (ScenarioTag tag : kAllScenarios) {
    if (to_string(tag) == name) return tag;
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

TwoSidedMode parse_mode(std::string_view name) {
  if (name == "equilibrium") return TwoSidedMode::equilibrium;
  if (name == "declared-price") return TwoSidedMode::declared_price;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

double maximize_share_at_price(double price, const MarketParams& params) {
  auto f = [&](double share) { return cloud_payoff(price, share, params); };
  const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kShareEpsilon, b = 1.0 - kShareEpsilon;
  double c = b - inv_golden * (b - a), d = a + inv_golden * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kGoldenTolerance) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_golden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_golden * (b - a);
      fd = f(d);
    }
  }
  // The objective is unimodal when phi > a4 + a2 and monotone or U-shaped
  // otherwise, in which case the maximum sits on an endpoint.
  double best = 0.5 * (a + b);
  double best_value = f(best);
  for (double edge : {kShareEpsilon, 1.0 - kShareEpsilon}) {
    const double value = f(edge);
    if (value > best_value) {
      best = edge;
      best_value = value;
    }
  }
  return best;
}

double pay_as_you_go_supply(double price, const MarketParams& p) {
  if (!(price > p.f_c)) throw DomainError("pay-as-you-go requires price > f_c");
  if (p.alpha == 1) throw DomainError("pay-as-you-go requires alpha != 1");
  const double marginal = p.alpha * p.k1 * (price - p.f_c) * std::pow(price, -p.gamma);
  return std::pow(p.p_s / marginal, 1.0 / (p.alpha - 1.0));
}

ScenarioRecord two_sided_record(const Provider& provider, TwoSidedMode mode) {
  ScenarioRecord r = base_record(provider, ScenarioTag::two_sided);
  const MarketParams& p = provider.params;
  if (mode == TwoSidedMode::equilibrium) {
    const EquilibriumResult eq = stackelberg_solve(p);
    if (!eq.feasible()) return r;
    r.price = eq.price_star;
    r.share = eq.share_star;
    r.demand = eq.demand;
    r.supply = eq.supply;
    r.provider_payoff = eq.provider_payoff;
    r.cloud_payoff = eq.cloud_payoff;
    r.feasible = true;
    return r;
  }
  validate(p);
  const double price = provider.declared_price;
  const double share = maximize_share_at_price(price, p);
  const double demand = demand_reduced(price, share, p);
  const double supply = supply_reduced(price, share, p);
  r.price = price;
  r.share = share;
  r.demand = demand;
  r.supply = supply;
  r.provider_payoff = (price * (1.0 - share) - p.f_c) * demand;
  r.cloud_payoff = price * share * demand - p.f_s * supply;
  r.feasible = true;
  return r;
}

ScenarioRecord fifty_fifty_record(const Provider& provider) {
  ScenarioRecord r = base_record(provider, ScenarioTag::fifty_fifty);
  r.params.phi = 1.0;
  const MarketParams& p = r.params;
  validate(p);
  const double share = 0.5;
  const FeasibilityReport f = check_feasibility(p);
  if (!f.f1_price_positive || !f.f2_price_max || p.f_c == 0) return r;
  const double price = provider_best_price(share, p);
  const double demand = demand_reduced(price, share, p);
  const double supply = supply_reduced(price, share, p);
  r.price = price;
  r.share = share;
  r.demand = demand;
  r.supply = supply;
  r.provider_payoff = (price * (1.0 - share) - p.f_c) * demand;
  r.cloud_payoff = price * share * demand - p.f_s * supply;
  r.feasible = true;
  return r;
}

ScenarioRecord pay_as_you_go_record(const Provider& provider) {
  ScenarioRecord r = base_record(provider, ScenarioTag::pay_as_you_go);
  const MarketParams& p = provider.params;
  validate(p);
  const double price = provider.declared_price;
  r.price = price;
  if (!(price > p.f_c)) return r;
  const double supply = pay_as_you_go_supply(price, p);
  const double demand = consumer_demand_primitive(price, supply, p);
  r.supply = supply;
  r.demand = demand;
  r.provider_payoff = (price - p.f_c) * demand - p.p_s * supply;
  r.cloud_payoff = (p.p_s - p.f_s) * supply;
  r.feasible = true;
  return r;
}

ScenarioRecord scenario_record(const Provider& provider, ScenarioTag tag, TwoSidedMode mode) {
  switch (tag) {
    case ScenarioTag::two_sided: return two_sided_record(provider, mode);
    case ScenarioTag::fifty_fifty: return fifty_fifty_record(provider);
    case ScenarioTag::pay_as_you_go: return pay_as_you_go_record(provider);
  }
  throw std::invalid_argument("unknown scenario");
}

std::vector<ScenarioRecord> run_two_sided(const Population& population, TwoSidedMode mode, Execution exec) {
  return run_each(population, exec, [mode](const Provider& p) { return two_sided_record(p, mode); });
}

std::vector<ScenarioRecord> run_fifty_fifty(const Population& population, Execution exec) {
  return run_each(population, exec, [](const Provider& p) { return fifty_fifty_record(p); });
}

std::vector<ScenarioRecord> run_pay_as_you_go(const Population& population, Execution exec) {
  return run_each(population, exec, [](const Provider& p) { return pay_as_you_go_record(p); });
}

std::vector<ScenarioRecord> run_scenario(const Population& population, ScenarioTag tag, TwoSidedMode mode,
                                         Execution exec) {
  return run_each(population, exec, [tag, mode](const Provider& p) { return scenario_record(p, tag, mode); });
}

ScenarioComparison compare_scenarios(std::span<const ScenarioRecord> records) {
  std::vector<ScenarioTag> order;
  std::map<ScenarioTag, std::vector<const ScenarioRecord*>> groups;
  for (const ScenarioRecord& r : records) {
    auto [it, inserted] = groups.try_emplace(r.scenario);
    if (inserted) order.push_back(r.scenario);
    it->second.push_back(&r);
  }

  ScenarioComparison out;
  if (order.empty()) return out;
  out.baseline = order.front();

  std::multiset<std::size_t> reference_ids;
  for (const ScenarioRecord* r : groups[out.baseline]) reference_ids.insert(r->provider_id);
  for (ScenarioTag tag : order) {
    std::multiset<std::size_t> ids;
    for (const ScenarioRecord* r : groups[tag]) ids.insert(r->provider_id);
    if (ids != reference_ids)
      throw MismatchedPopulation("scenario " + std::string(to_string(tag)) +
                                 " was run on a different population than " +
                                 std::string(to_string(out.baseline)));
  }

  for (ScenarioTag tag : order) {
    const auto& group = groups[tag];
    ScenarioSummary s;
    s.scenario = tag;
    s.n = group.size();
    std::vector<double> provider, cloud, demand, supply, share;
    for (const ScenarioRecord* r : group) {
      if (!r->feasible) continue;
      ++s.feasible;
      provider.push_back(r->provider_payoff);
      cloud.push_back(r->cloud_payoff);
      if (r->demand) demand.push_back(*r->demand);
      if (r->supply) supply.push_back(*r->supply);
      if (r->share) share.push_back(*r->share);
    }
    s.feasible_fraction = s.n == 0 ? 0.0 : static_cast<double>(s.feasible) / static_cast<double>(s.n);
    if (!provider.empty()) {
      s.provider_payoff = statistic_of(provider);
      s.cloud_payoff = statistic_of(cloud);
    }
    if (!demand.empty()) s.demand = statistic_of(demand);
    if (!supply.empty()) s.supply = statistic_of(supply);
    if (!share.empty()) s.share = statistic_of(share);
    out.summaries.push_back(s);
  }

  const ScenarioSummary& base = out.summaries.front();
  auto diff = [](const std::optional<Statistic>& a, const std::optional<Statistic>& b) -> std::optional<double> {
    if (!a || !b) return std::nullopt;
    return a->mean - b->mean;
  };
  for (std::size_t i = 1; i < out.summaries.size(); ++i) {
    const ScenarioSummary& s = out.summaries[i];
    out.differences.push_back({s.scenario, diff(s.provider_payoff, base.provider_payoff),
                               diff(s.cloud_payoff, base.cloud_payoff), diff(s.demand, base.demand),
                               diff(s.supply, base.supply)});
  }
  return out;
}

}  // namespace tsm
