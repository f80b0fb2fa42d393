#include "tsm/csv.hpp"

#include <array>
#include <charconv>

namespace tsm::csv {

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string format_optional(const std::optional<double>& value) { return value ? format_number(*value) : std::string(); }

namespace {

const char* flag(bool b) { return b ? "true" : "false"; }

std::optional<double> metric_of(const SweepCell& cell, Metric m) {
  switch (m) {
    case Metric::cloud_payoff: return cell.mean_cloud_payoff;
    case Metric::provider_payoff: return cell.mean_provider_payoff;
    case Metric::demand: return cell.mean_demand;
    case Metric::supply: return cell.mean_supply;
    case Metric::share: return cell.mean_share;
  }
  return std::nullopt;
}

constexpr std::array<Metric, 5> kAllMetrics{Metric::cloud_payoff, Metric::provider_payoff, Metric::demand,
                                            Metric::supply, Metric::share};

}  // namespace

void write_scenario(std::ostream& out, std::span<const ScenarioRecord> records) {
  out << kScenarioHeader << '\n';
  for (const ScenarioRecord& r : records) {
    const MarketParams& p = r.params;
    out << r.provider_id << ',' << to_string(r.scenario) << ',' << format_number(p.alpha) << ','
        << format_number(p.beta) << ',' << format_number(p.gamma) << ',' << format_number(p.psi) << ','
        << format_number(p.phi) << ',' << format_number(p.k1) << ',' << format_number(p.f_c) << ','
        << format_optional(r.price) << ',' << format_optional(r.share) << ',' << format_optional(r.demand) << ','
        << format_optional(r.supply) << ',' << format_number(r.provider_payoff) << ','
        << format_number(r.cloud_payoff) << ',' << flag(r.feasible) << '\n';
  }
}

void write_sweep(std::ostream& out, const SweepSeries& series) { write_sweep(out, series, kAllMetrics); }

void write_sweep(std::ostream& out, const SweepSeries& series, std::span<const Metric> metrics) {
  out << "axis,axis_value,scenario,phi_level";
  for (Metric m : metrics) out << ',' << column_name(m);
  out << ",feasible_count\n";
  for (const SweepCell& c : series.cells) {
    out << to_string(series.axis) << ',' << format_number(c.axis_value) << ',' << to_string(c.scenario) << ','
        << format_number(c.phi_level);
    for (Metric m : metrics) out << ',' << format_optional(metric_of(c, m));
    out << ',' << c.feasible_count << '\n';
  }
}

void write_equilibrium(std::ostream& out, const EquilibriumResult& r) {
  out << kEquilibriumHeader << '\n';
  auto num = [&](double v) { return r.feasible() ? format_number(v) : std::string(); };
  out << to_string(r.status) << ',' << num(r.price_star) << ',' << num(r.share_star) << ',' << num(r.demand) << ','
      << num(r.supply) << ',' << num(r.provider_payoff) << ',' << num(r.cloud_payoff) << ','
      << flag(r.feasibility.f1_price_positive) << ',' << flag(r.feasibility.f2_price_max) << ','
      << flag(r.feasibility.f3_share_max) << ',' << r.share_roots_found << ',' << num(r.residual) << '\n';
}

}  // namespace tsm::csv
