#pragma once

// Demand, supply and payoff model of a provider-platform pair in a two-sided
// cloud data market. The consumer side responds to price and supplied
// infrastructure, the platform side responds to its revenue share, price and
// consumer demand; both are Cobb-Douglas power laws with cross-group
// externalities alpha (supply -> demand) and beta (demand -> supply).

#include <optional>
#include <stdexcept>
#include <string>

namespace tsm {

/// Thrown when an operation is evaluated outside its domain (non-positive
/// price, share outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when a parameter set violates a MarketParams invariant. The message
/// names the violated invariant.
class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Upper bound (exclusive) accepted for alpha*beta.
inline constexpr double kMaxExternalityProduct = 0.999;
/// Band accepted for the two price elasticities.
inline constexpr double kMaxPriceElasticity = 0.35;

struct MarketParams {
  double alpha = 0.38;  // supply -> demand externality, (0,1)
  double beta = 1.0;    // demand -> supply externality, [0, 1/alpha)
  double gamma = 0.2;   // price elasticity of demand
  double psi = 0.1;     // price elasticity of supply
  double phi = 1.0;     // subsidizing factor (share elasticity of supply)
  double k1 = 0.5;      // demand multiplier
  double k2 = 1.0;      // supply multiplier
  double f_c = 1.0;     // USD/hour per consumer access
  double f_s = 23.7;    // USD/hour per infrastructure unit
  double p_s = 36.0;    // pay-as-you-go rental rate, USD/hour

  friend bool operator==(const MarketParams&, const MarketParams&) = default;
};

/// Returns a description of the first violated invariant, or nullopt.
std::optional<std::string> find_violation(const MarketParams& params);

/// Throws InvalidParams when find_violation() reports something.
void validate(const MarketParams& params);

struct Coefficients {
  double a1 = 0;           // gamma - alpha*psi
  double a2 = 0;           // 1 - alpha*beta
  double a3 = 0;           // psi - gamma*beta
  double a4 = 0;           // alpha*phi
  double share_exp_A = 0;  // (a4 - phi)/a2 + 1
  double share_exp_B = 0;  // (a1 + a3)/a2 - 1

  friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

Coefficients derive_coefficients(const MarketParams& params);

struct MarketState {
  double price = 0;   // USD/hour
  double share = 0;   // platform's revenue portion, (0,1)
  double demand = 0;  // consumer demand intensity
  double supply = 0;  // infrastructure units
};

struct FeasibilityReport {
  bool f1_price_positive = false;  // a1/(a1-a2) > 0
  bool f2_price_max = false;       // a1/a2 > 1
  bool f3_share_max = false;       // a4 + a2 - phi < 0
  bool all_ok = false;

  friend bool operator==(const FeasibilityReport&, const FeasibilityReport&) = default;
};

FeasibilityReport check_feasibility(const MarketParams& params);
FeasibilityReport check_feasibility(const Coefficients& c, double phi);

// Structural equations. Consumer demand given price and supply; supply given
// share, price and demand.
double consumer_demand_primitive(double price, double supply, const MarketParams& params);
double supply_primitive(double share, double price, double demand, const MarketParams& params);

// Reduced forms: the joint solution of the two structural equations as a
// function of (price, share) only.
double demand_reduced(double price, double share, const MarketParams& params);
double supply_reduced(double price, double share, const MarketParams& params);

/// Provider's payoff (price*(1-share) - f_c) * demand. May be negative.
double provider_payoff(double price, double share, const MarketParams& params);

/// Platform's payoff price*share*demand - f_s*supply. May be negative.
double cloud_payoff(double price, double share, const MarketParams& params);

/// The same payoff written out with all reduced forms substituted; kept as a
/// second algebraic route for cross-checking cloud_payoff().
double cloud_payoff_expanded(double price, double share, const MarketParams& params);

/// Log-space decomposition of the reduced forms. Both reduced forms are
/// separable, log D = demand_const + demand_price*log P + demand_share*log chi
/// (same for supply), which lets grid scans evaluate them with one exp per
/// factor instead of one per grid cell.
class ReducedForms {
 public:
  explicit ReducedForms(const MarketParams& params);
  ReducedForms(const MarketParams& params, const Coefficients& coefficients);

  double log_demand(double log_price, double log_share) const {
    return demand_const_ + demand_price_ * log_price + demand_share_ * log_share;
  }
  double log_supply(double log_price, double log_share) const {
    return supply_const_ + supply_price_ * log_price + supply_share_ * log_share;
  }

  double demand_const() const { return demand_const_; }
  double demand_price_exponent() const { return demand_price_; }
  double demand_share_exponent() const { return demand_share_; }
  double supply_const() const { return supply_const_; }
  double supply_price_exponent() const { return supply_price_; }
  double supply_share_exponent() const { return supply_share_; }

 private:
  double demand_const_, demand_price_, demand_share_;
  double supply_const_, supply_price_, supply_share_;
};

}  // namespace tsm
