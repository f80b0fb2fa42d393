#include "tsm/sweep.hpp"

#include <cmath>
#include <stdexcept>

namespace tsm {

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::alpha_beta_product: return "alpha_beta_product";
    case SweepAxis::phi: return "phi";
    case SweepAxis::gamma: return "gamma";
    case SweepAxis::k1: return "k1";
  }
  return "unknown";
}

SweepAxis parse_axis(std::string_view name) {
  for (SweepAxis a : {SweepAxis::alpha_beta_product, SweepAxis::phi, SweepAxis::gamma, SweepAxis::k1}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

std::pair<double, double> axis_range(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::alpha_beta_product: return {0.1, 0.7};
    case SweepAxis::phi: return {0.0, 5.0};
    case SweepAxis::gamma: return {0.0, 0.35};
    case SweepAxis::k1: return {0.1, 0.9};
  }
  return {0, 0};
}

void validate(const SweepSpec& spec) {
  if (spec.grid.empty()) throw std::invalid_argument("sweep grid is empty");
  const auto [lo, hi] = axis_range(spec.axis);
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    const double v = spec.grid[i];
    if (!(v >= lo && v <= hi))
      throw std::invalid_argument("grid value " + std::to_string(v) + " outside the " +
                                  std::string(to_string(spec.axis)) + " range");
    if (i > 0 && !(v > spec.grid[i - 1])) throw std::invalid_argument("sweep grid must be strictly increasing");
  }
  if (spec.axis != SweepAxis::phi) {
    if (spec.phi_levels.empty()) throw std::invalid_argument("phi_levels is empty");
    for (double phi : spec.phi_levels) {
      if (!(phi >= 0 && std::isfinite(phi))) throw std::invalid_argument("phi levels must be finite and >= 0");
    }
  }
  if (spec.scenarios.empty()) throw std::invalid_argument("scenario set is empty");
  validate(spec.population);
}

MarketParams cell_params(const Provider& provider, SweepAxis axis, double axis_value, double phi_level) {
  MarketParams p = provider.params;
  p.phi = phi_level;
  switch (axis) {
    case SweepAxis::alpha_beta_product: p.beta = axis_value / p.alpha; break;
    case SweepAxis::phi: p.phi = axis_value; break;
    case SweepAxis::gamma: p.gamma = axis_value; break;
    case SweepAxis::k1: p.k1 = axis_value; break;
  }
  return p;
}

namespace {

struct CellKey {
  double axis_value;
  ScenarioTag scenario;
  double phi_level;
};

std::vector<CellKey> cell_keys(const SweepSpec& spec) {
  std::vector<CellKey> keys;
  for (double v : spec.grid) {
    for (ScenarioTag tag : spec.scenarios) {
      if (spec.axis == SweepAxis::phi) {
        keys.push_back({v, tag, v});
      } else {
        for (double phi : spec.phi_levels) keys.push_back({v, tag, phi});
      }
    }
  }
  return keys;
}

ScenarioRecord evaluate(const Provider& provider, const SweepSpec& spec, const CellKey& key) {
  Provider adjusted = provider;
  adjusted.params = cell_params(provider, spec.axis, key.axis_value, key.phi_level);
  return scenario_record(adjusted, key.scenario, spec.mode);
}

std::optional<double> mean_of(double sum, std::size_t count) {
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace

std::vector<ScenarioRecord> cell_records(const Population& population, const SweepSpec& spec, double axis_value,
                                         ScenarioTag scenario, double phi_level) {
  std::vector<ScenarioRecord> out;
  out.reserve(population.size());
  const CellKey key{axis_value, scenario, phi_level};
  for (const Provider& provider : population) out.push_back(evaluate(provider, spec, key));
  return out;
}

SweepCell aggregate_cell(std::span<const ScenarioRecord> records, double axis_value, ScenarioTag scenario,
                         double phi_level) {
  SweepCell cell;
  cell.axis_value = axis_value;
  cell.scenario = scenario;
  cell.phi_level = phi_level;
  cell.n = records.size();
  double cloud = 0, provider = 0, demand = 0, supply = 0, share = 0;
  std::size_t n_demand = 0, n_supply = 0, n_share = 0;
  for (const ScenarioRecord& r : records) {
    if (!r.feasible) continue;
    ++cell.feasible_count;
    cloud += r.cloud_payoff;
    provider += r.provider_payoff;
    if (r.demand) {
      demand += *r.demand;
      ++n_demand;
    }
    if (r.supply) {
      supply += *r.supply;
      ++n_supply;
    }
    if (r.share) {
      share += *r.share;
      ++n_share;
    }
  }
  cell.mean_cloud_payoff = mean_of(cloud, cell.feasible_count);
  cell.mean_provider_payoff = mean_of(provider, cell.feasible_count);
  cell.mean_demand = mean_of(demand, n_demand);
  cell.mean_supply = mean_of(supply, n_supply);
  cell.mean_share = mean_of(share, n_share);
  return cell;
}

SweepSeries run_sweep(const SweepSpec& spec, Execution exec) {
  validate(spec);
  const Population population = sample_population(spec.population, exec);
  const std::vector<CellKey> keys = cell_keys(spec);
  const std::size_t n = population.size();

  // One task per (cell, provider); each writes only its own slot.
  std::vector<ScenarioRecord> records(keys.size() * n);
  for_each_index(records.size(), exec,
                 [&](std::size_t t) { records[t] = evaluate(population[t % n], spec, keys[t / n]); });

  SweepSeries series;
  series.axis = spec.axis;
  series.cells.reserve(keys.size());
  for (std::size_t c = 0; c < keys.size(); ++c) {
    const std::span<const ScenarioRecord> cell(records.data() + c * n, n);
    series.cells.push_back(aggregate_cell(cell, keys[c].axis_value, keys[c].scenario, keys[c].phi_level));
  }
  return series;
}

namespace {

SweepSeries run_axis(const SweepSpec& spec, SweepAxis expected, Execution exec) {
  if (spec.axis != expected)
    throw std::invalid_argument("expected a " + std::string(to_string(expected)) + " sweep, got " +
                                std::string(to_string(spec.axis)));
  return run_sweep(spec, exec);
}

}  // namespace

SweepSeries sweep_externalities(const SweepSpec& spec, Execution exec) {
  return run_axis(spec, SweepAxis::alpha_beta_product, exec);
}
SweepSeries sweep_phi(const SweepSpec& spec, Execution exec) { return run_axis(spec, SweepAxis::phi, exec); }
SweepSeries sweep_gamma(const SweepSpec& spec, Execution exec) { return run_axis(spec, SweepAxis::gamma, exec); }
SweepSeries sweep_k1(const SweepSpec& spec, Execution exec) { return run_axis(spec, SweepAxis::k1, exec); }

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {lo};
  for (std::size_t i = 0; i < count; ++i) {
    const double v = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(std::round(v * 1e12) / 1e12);
  }
  return out;
}

std::string_view column_name(Metric metric) {
  switch (metric) {
    case Metric::cloud_payoff: return "mean_cloud_payoff";
    case Metric::provider_payoff: return "mean_provider_payoff";
    case Metric::demand: return "mean_demand";
    case Metric::supply: return "mean_supply";
    case Metric::share: return "mean_share";
  }
  return "unknown";
}

namespace {

SweepPreset make_preset(std::string name, SweepAxis axis, std::vector<Metric> metrics,
                        std::vector<ScenarioTag> scenarios = {std::begin(kAllScenarios), std::end(kAllScenarios)}) {
  SweepPreset p;
  p.name = std::move(name);
  p.spec.axis = axis;
  switch (axis) {
    case SweepAxis::alpha_beta_product: p.spec.grid = linear_grid(0.1, 0.7, 13); break;
    case SweepAxis::phi: p.spec.grid = linear_grid(0.0, 5.0, 21); break;
    case SweepAxis::gamma: p.spec.grid = linear_grid(0.0, 0.35, 15); break;
    case SweepAxis::k1: p.spec.grid = linear_grid(0.1, 0.9, 9); break;
  }
  p.spec.scenarios = std::move(scenarios);
  p.metrics = std::move(metrics);
  return p;
}

std::vector<SweepPreset> all_presets() {
  using M = Metric;
  using A = SweepAxis;
  return {
      make_preset("fig4", A::alpha_beta_product, {M::cloud_payoff}),
      make_preset("fig5", A::alpha_beta_product, {M::provider_payoff}),
      make_preset("fig6", A::alpha_beta_product, {M::demand}),
      make_preset("fig7", A::alpha_beta_product, {M::supply}),
      make_preset("fig8", A::alpha_beta_product, {M::share}, {ScenarioTag::two_sided}),
      make_preset("fig9", A::phi, {M::cloud_payoff}),
      make_preset("fig10", A::phi, {M::provider_payoff}),
      make_preset("fig11", A::phi, {M::demand}),
      make_preset("fig12", A::gamma, {M::cloud_payoff}),
      make_preset("fig13", A::gamma, {M::provider_payoff}),
      make_preset("fig14", A::gamma, {M::demand}),
      make_preset("fig15", A::k1, {M::cloud_payoff, M::provider_payoff, M::demand}),
  };
}

}  // namespace

SweepPreset find_preset(std::string_view name) {
  for (SweepPreset& p : all_presets()) {
    if (p.name == name) return std::move(p);
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const SweepPreset& p : all_presets()) out.push_back(p.name);
  return out;
}

}  // namespace tsm
