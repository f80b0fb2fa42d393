#pragma once

// Closed-form best responses of the leader-follower game and the numerical
// machinery around them. The provider's pricing response is explicit; the
// platform's share response is the root of
//
//   g(chi) = chi^A (1 - chi)^B = C
//
// which is solved by a sign-change scan followed by bisection.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tsm/market.hpp"

namespace tsm {

/// A closed-form response was requested while a feasibility flag fails.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kShareEpsilon = 1e-9;
inline constexpr std::size_t kShareScanBrackets = 2048;
inline constexpr double kShareTolerance = 1e-10;
inline constexpr int kMaxBisectionSteps = 200;

/// Provider's best price a1*f_c / ((a1-a2)(1-share)). Requires f1 and f2.
double provider_best_price(double share, const MarketParams& params);
double provider_best_price(double share, const Coefficients& c, double f_c);

struct ShareEquation {
  double exp_A = 0;
  double exp_B = 0;
  double rhs_C = 0;
  double log_rhs_C = 0;  // -inf when rhs_C == 0

  /// log g(chi) - log C; zero at a root.
  double log_residual(double share) const;
  /// |g(chi)/C - 1|.
  double residual(double share) const;
};

ShareEquation build_share_equation(const MarketParams& params);
ShareEquation build_share_equation(const MarketParams& params, const Coefficients& c);

/// All roots of the share equation on (eps, 1-eps), ascending. Throws
/// NonConvergence if a bracket fails to shrink below kShareTolerance.
std::vector<double> find_share_roots(const ShareEquation& eq);

struct ShareSolution {
  std::vector<double> roots;
  bool found = false;
  double share = 0;     // payoff-maximizing root when found
  double residual = 0;  // residual at `share`
};

/// Roots of the share equation; when several exist the one maximizing the
/// platform's payoff along the provider's price response is selected.
ShareSolution solve_share(const ShareEquation& eq, const MarketParams& params);
ShareSolution solve_share(const ShareEquation& eq, const MarketParams& params, const Coefficients& c);

enum class EquilibriumStatus {
  ok,
  infeasible_conditions,  // f1, f2 or f3 fails
  zero_access_cost,       // f_c == 0 drives the best price to zero
  no_share_root,
  no_convergence,
};

const char* to_string(EquilibriumStatus status);

struct EquilibriumResult {
  EquilibriumStatus status = EquilibriumStatus::infeasible_conditions;
  double price_star = 0;
  double share_star = 0;
  double demand = 0;
  double supply = 0;
  double provider_payoff = 0;
  double cloud_payoff = 0;
  FeasibilityReport feasibility;
  std::size_t share_roots_found = 0;
  double residual = 0;

  bool feasible() const { return status == EquilibriumStatus::ok; }
  MarketState state() const { return {price_star, share_star, demand, supply}; }
};

/// Backward induction: the platform's share from the share equation, the
/// provider's price from its response, quantities and payoffs from the
/// reduced forms. Infeasibility is reported through `status`. Throws
/// InvalidParams for parameter sets violating MarketParams invariants.
EquilibriumResult stackelberg_solve(const MarketParams& params);

/// Same, with the closed-form path driven by the supplied coefficients while
/// quantities and payoffs still come from the true model. Used to inject
/// faults into verification runs.
EquilibriumResult stackelberg_solve(const MarketParams& params, const Coefficients& closed_form);

struct FirstOrderReport {
  double provider_gradient = 0;  // d(provider payoff)/dP
  double cloud_gradient = 0;     // d(cloud payoff)/dchi at fixed P
  double provider_relative = 0;  // |gradient| * P / gross provider revenue
  double cloud_relative = 0;     // |gradient| * chi / max(revenue, cost)
};

/// Central differences with step 1e-6 relative.
FirstOrderReport first_order_check(const MarketParams& params, const MarketState& at);

struct SecondOrderReport {
  double provider_curvature = 0;
  double cloud_curvature = 0;
  bool provider_numeric_max = false;
  bool cloud_numeric_max = false;
  bool provider_analytic_max = false;  // 1 - a1/a2 < 0
  bool cloud_analytic_max = false;     // a4 + a2 - phi < 0
  bool agreement = false;              // numeric and analytic signs agree for both players

  bool is_max() const { return provider_numeric_max && cloud_numeric_max; }
};

/// Central second differences with step 1e-4 relative.
SecondOrderReport second_order_check(const MarketParams& params, const MarketState& at);

}  // namespace tsm
