#include "tsm/market.hpp"

#include <cmath>
#include <sstream>

namespace tsm {

namespace {

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os << what << " (got " << value << ")";
  return os.str();
}

void require_positive(double x, const char* name) {
  if (!(x > 0) || !std::isfinite(x)) throw DomainError(describe(name, x));
}

void require_open_unit(double share) {
  if (!(share > 0 && share < 1)) throw DomainError(describe("share must lie in (0,1)", share));
}

}  // namespace

std::optional<std::string> find_violation(const MarketParams& p) {
  const double fields[] = {p.alpha, p.beta, p.gamma, p.psi, p.phi, p.k1, p.k2, p.f_c, p.f_s, p.p_s};
  for (double f : fields) {
    if (!std::isfinite(f)) return "all parameters must be finite";
  }
  if (!(p.alpha > 0 && p.alpha < 1)) return describe("alpha must lie in (0,1)", p.alpha);
  if (p.beta < 0) return describe("beta must be non-negative", p.beta);
  if (!(p.alpha * p.beta < kMaxExternalityProduct))
    return describe("alpha*beta must be below 0.999", p.alpha * p.beta);
  if (p.gamma < 0 || p.gamma > kMaxPriceElasticity) return describe("gamma must lie in [0, 0.35]", p.gamma);
  if (p.psi < 0 || p.psi > kMaxPriceElasticity) return describe("psi must lie in [0, 0.35]", p.psi);
  if (p.phi < 0) return describe("phi must be non-negative", p.phi);
  if (!(p.k1 > 0)) return describe("k1 must be positive", p.k1);
  if (!(p.k2 > 0)) return describe("k2 must be positive", p.k2);
  if (p.f_c < 0) return describe("f_c must be non-negative", p.f_c);
  if (p.f_s < 0) return describe("f_s must be non-negative", p.f_s);
  if (!(p.p_s > 0)) return describe("p_s must be positive", p.p_s);
  return std::nullopt;
}

void validate(const MarketParams& params) {
  if (auto v = find_violation(params)) throw InvalidParams(*v);
}

Coefficients derive_coefficients(const MarketParams& p) {
  Coefficients c;
  // fma keeps each difference to one rounding; a2 is often tiny, and the
  // share-equation constant carries powers of 1/a2.
  c.a1 = std::fma(-p.alpha, p.psi, p.gamma);
  c.a2 = std::fma(-p.alpha, p.beta, 1.0);
  c.a3 = std::fma(-p.gamma, p.beta, p.psi);
  c.a4 = p.alpha * p.phi;
  c.share_exp_A = std::fma(p.alpha, p.phi, -p.phi) / c.a2 + 1.0;
  c.share_exp_B = (c.a1 + c.a3) / c.a2 - 1.0;
  return c;
}

FeasibilityReport check_feasibility(const Coefficients& c, double phi) {
  FeasibilityReport r;
  const double gap = c.a1 - c.a2;
  r.f1_price_positive = gap != 0 && c.a1 / gap > 0;
  r.f2_price_max = c.a1 / c.a2 > 1;
  r.f3_share_max = c.a4 + c.a2 - phi < 0;
  r.all_ok = r.f1_price_positive && r.f2_price_max && r.f3_share_max;
  return r;
}

FeasibilityReport check_feasibility(const MarketParams& params) {
  return check_feasibility(derive_coefficients(params), params.phi);
}

double consumer_demand_primitive(double price, double supply, const MarketParams& p) {
  require_positive(price, "price must be positive");
  require_positive(supply, "supply must be positive");
  return std::exp(std::log(p.k1) - p.gamma * std::log(price) + p.alpha * std::log(supply));
}

double supply_primitive(double share, double price, double demand, const MarketParams& p) {
  require_open_unit(share);
  require_positive(price, "price must be positive");
  require_positive(demand, "demand must be positive");
  return std::exp(std::log(p.k2) + p.phi * std::log(share) + p.psi * std::log(price) +
                  p.beta * std::log(demand));
}

ReducedForms::ReducedForms(const MarketParams& p) : ReducedForms(p, derive_coefficients(p)) {}

ReducedForms::ReducedForms(const MarketParams& p, const Coefficients& c) {
  const double inv = 1.0 / c.a2;
  const double log_k1 = std::log(p.k1);
  const double log_k2 = std::log(p.k2);
  demand_const_ = (log_k1 + p.alpha * log_k2) * inv;
  demand_price_ = -c.a1 * inv;
  demand_share_ = c.a4 * inv;
  supply_const_ = (log_k2 + p.beta * log_k1) * inv;
  supply_price_ = c.a3 * inv;
  supply_share_ = p.phi * inv;
}

double demand_reduced(double price, double share, const MarketParams& params) {
  require_positive(price, "price must be positive");
  require_open_unit(share);
  return std::exp(ReducedForms(params).log_demand(std::log(price), std::log(share)));
}

double supply_reduced(double price, double share, const MarketParams& params) {
  require_positive(price, "price must be positive");
  require_open_unit(share);
  return std::exp(ReducedForms(params).log_supply(std::log(price), std::log(share)));
}

double provider_payoff(double price, double share, const MarketParams& params) {
  const double demand = demand_reduced(price, share, params);
  return (price * (1.0 - share) - params.f_c) * demand;
}

double cloud_payoff(double price, double share, const MarketParams& params) {
  const double demand = demand_reduced(price, share, params);
  const double supply = supply_reduced(price, share, params);
  return price * share * demand - params.f_s * supply;
}

double cloud_payoff_expanded(double price, double share, const MarketParams& p) {
  require_positive(price, "price must be positive");
  require_open_unit(share);
  const Coefficients c = derive_coefficients(p);
  const double revenue = std::pow(p.k1 * std::pow(p.k2, p.alpha), 1.0 / c.a2) *
                         std::pow(price, 1.0 - c.a1 / c.a2) * std::pow(share, c.a4 / c.a2 + 1.0);
  const double cost = p.f_s * std::pow(p.k2 * std::pow(p.k1, p.beta), 1.0 / c.a2) *
                      std::pow(price, c.a3 / c.a2) * std::pow(share, p.phi / c.a2);
  return revenue - cost;
}

}  // namespace tsm
