#include "tsm/equilibrium.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace tsm {

namespace {

constexpr double kFirstStep = 1e-6;
constexpr double kSecondStep = 1e-4;

// Bracket edges on (eps, 1-eps): log-spaced from eps up to 1/2, mirrored above
// 1/2 so that both ends of the interval are resolved.
struct ScanGrid {
  static constexpr std::size_t kEdges = kShareScanBrackets + 1;
  std::array<double, kEdges> share{};
  std::array<double, kEdges> log_share{};
  std::array<double, kEdges> log_complement{};

  ScanGrid() {
    constexpr std::size_t half = kShareScanBrackets / 2;
    const double log_lo = std::log(kShareEpsilon);
    const double log_mid = std::log(0.5);
    for (std::size_t k = 0; k <= half; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(half);
      const double x = k == half ? 0.5 : std::exp(log_lo + t * (log_mid - log_lo));
      share[k] = x;
      share[kShareScanBrackets - k] = 1.0 - x;
    }
    for (std::size_t k = 0; k < kEdges; ++k) {
      log_share[k] = std::log(share[k]);
      log_complement[k] = std::log1p(-share[k]);
    }
  }
};

const ScanGrid& scan_grid() {
  static const ScanGrid grid;
  return grid;
}

double bisect_root(const ShareEquation& eq, double lo, double hi, double f_lo) {
  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    const double f_mid = eq.log_residual(mid);
    if (f_mid == 0) return mid;
    if ((f_mid < 0) == (f_lo < 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
    // Keep halving past the tolerance while the residual can still improve;
    // the interval collapses to adjacent doubles well inside the step cap.
    if (hi - lo <= kShareTolerance && std::abs(f_mid) <= 1e-13) return 0.5 * (lo + hi);
  }
  if (hi - lo <= kShareTolerance) return 0.5 * (lo + hi);
  throw NonConvergence("share bisection did not converge within 200 steps");
}

double relative_step(double x, double rel) { return rel * std::abs(x); }

// Step for share derivatives: relative to share, kept inside (0,1).
double share_step(double share, double rel) { return rel * std::min(share, 1.0 - share); }

}  // namespace

double provider_best_price(double share, const Coefficients& c, double f_c) {
  const FeasibilityReport f = check_feasibility(c, 0.0);
  if (!f.f1_price_positive) throw InfeasibleError("provider response requires a1/(a1-a2) > 0");
  if (!f.f2_price_max) throw InfeasibleError("provider response requires a1/a2 > 1");
  if (!(share < 1)) throw DomainError("provider response undefined for share >= 1");
  if (!(share >= 0)) throw DomainError("share must be non-negative");
  return c.a1 * f_c / ((c.a1 - c.a2) * (1.0 - share));
}

double provider_best_price(double share, const MarketParams& params) {
  return provider_best_price(share, derive_coefficients(params), params.f_c);
}

double ShareEquation::log_residual(double share) const {
  return exp_A * std::log(share) + exp_B * std::log1p(-share) - log_rhs_C;
}

double ShareEquation::residual(double share) const {
  return std::abs(std::expm1(log_residual(share)));
}

ShareEquation build_share_equation(const MarketParams& p, const Coefficients& c) {
  if (!check_feasibility(c, p.phi).f1_price_positive)
    throw InfeasibleError("share equation requires a1/(a1-a2) > 0");
  ShareEquation eq;
  eq.exp_A = c.share_exp_A;
  eq.exp_B = c.share_exp_B;
  if (p.f_s == 0 || p.phi == 0) {
    eq.rhs_C = 0;
    eq.log_rhs_C = -std::numeric_limits<double>::infinity();
    return eq;
  }
  const double multiplier_log =
      (std::log(p.k2) + p.beta * std::log(p.k1) - std::log(p.k1) - p.alpha * std::log(p.k2)) / c.a2;
  const double price_floor_log = std::log(c.a1 * p.f_c / (c.a1 - c.a2));
  const double price_term = eq.exp_B == 0 ? 0.0 : eq.exp_B * price_floor_log;
  eq.log_rhs_C = std::log(p.f_s) + std::log(p.phi) - std::log(c.a4 + c.a2) + multiplier_log + price_term;
  eq.rhs_C = std::exp(eq.log_rhs_C);
  return eq;
}

ShareEquation build_share_equation(const MarketParams& params) {
  return build_share_equation(params, derive_coefficients(params));
}

std::vector<double> find_share_roots(const ShareEquation& eq) {
  std::vector<double> roots;
  if (!std::isfinite(eq.log_rhs_C)) return roots;
  const ScanGrid& grid = scan_grid();
  auto f_at = [&](std::size_t k) {
    return eq.exp_A * grid.log_share[k] + eq.exp_B * grid.log_complement[k] - eq.log_rhs_C;
  };
  double f_prev = f_at(0);
  if (f_prev == 0) roots.push_back(grid.share[0]);
  for (std::size_t k = 1; k < ScanGrid::kEdges; ++k) {
    const double f_next = f_at(k);
    if (f_next == 0) {
      roots.push_back(grid.share[k]);
    } else if (f_prev != 0 && (f_prev < 0) != (f_next < 0)) {
      roots.push_back(bisect_root(eq, grid.share[k - 1], grid.share[k], f_prev));
    }
    f_prev = f_next;
  }
  return roots;
}

ShareSolution solve_share(const ShareEquation& eq, const MarketParams& params, const Coefficients& c) {
  ShareSolution sol;
  sol.roots = find_share_roots(eq);
  double best = -std::numeric_limits<double>::infinity();
  for (double root : sol.roots) {
    const double price = provider_best_price(root, c, params.f_c);
    const double payoff = cloud_payoff(price, root, params);
    if (!sol.found || payoff > best) {
      best = payoff;
      sol.share = root;
      sol.found = true;
    }
  }
  if (sol.found) sol.residual = eq.residual(sol.share);
  return sol;
}

ShareSolution solve_share(const ShareEquation& eq, const MarketParams& params) {
  return solve_share(eq, params, derive_coefficients(params));
}

const char* to_string(EquilibriumStatus status) {
  switch (status) {
    case EquilibriumStatus::ok: return "ok";
    case EquilibriumStatus::infeasible_conditions: return "infeasible_conditions";
    case EquilibriumStatus::zero_access_cost: return "zero_access_cost";
    case EquilibriumStatus::no_share_root: return "no_share_root";
    case EquilibriumStatus::no_convergence: return "no_convergence";
  }
  return "unknown";
}

EquilibriumResult stackelberg_solve(const MarketParams& params, const Coefficients& closed_form) {
  validate(params);
  EquilibriumResult r;
  r.feasibility = check_feasibility(closed_form, params.phi);
  if (!r.feasibility.all_ok) {
    r.status = EquilibriumStatus::infeasible_conditions;
    return r;
  }
  if (params.f_c == 0) {
    r.status = EquilibriumStatus::zero_access_cost;
    return r;
  }
  ShareSolution sol;
  try {
    sol = solve_share(build_share_equation(params, closed_form), params, closed_form);
  } catch (const NonConvergence&) {
    r.status = EquilibriumStatus::no_convergence;
    return r;
  }
  r.share_roots_found = sol.roots.size();
  if (!sol.found) {
    r.status = EquilibriumStatus::no_share_root;
    return r;
  }
  r.status = EquilibriumStatus::ok;
  r.share_star = sol.share;
  r.residual = sol.residual;
  r.price_star = provider_best_price(sol.share, closed_form, params.f_c);
  r.demand = demand_reduced(r.price_star, r.share_star, params);
  r.supply = supply_reduced(r.price_star, r.share_star, params);
  r.provider_payoff = (r.price_star * (1.0 - r.share_star) - params.f_c) * r.demand;
  r.cloud_payoff = r.price_star * r.share_star * r.demand - params.f_s * r.supply;
  return r;
}

EquilibriumResult stackelberg_solve(const MarketParams& params) {
  return stackelberg_solve(params, derive_coefficients(params));
}

FirstOrderReport first_order_check(const MarketParams& params, const MarketState& at) {
  FirstOrderReport r;
  const double hp = relative_step(at.price, kFirstStep);
  r.provider_gradient = (provider_payoff(at.price + hp, at.share, params) -
                         provider_payoff(at.price - hp, at.share, params)) /
                        (2 * hp);
  const double hs = share_step(at.share, kFirstStep);
  r.cloud_gradient =
      (cloud_payoff(at.price, at.share + hs, params) - cloud_payoff(at.price, at.share - hs, params)) /
      (2 * hs);

  const double demand = demand_reduced(at.price, at.share, params);
  const double supply = supply_reduced(at.price, at.share, params);
  const double provider_scale = at.price * (1.0 - at.share) * demand;
  const double cloud_scale = std::max(at.price * at.share * demand, params.f_s * supply);
  r.provider_relative = std::abs(r.provider_gradient) * at.price / provider_scale;
  r.cloud_relative = std::abs(r.cloud_gradient) * at.share / cloud_scale;
  return r;
}

SecondOrderReport second_order_check(const MarketParams& params, const MarketState& at) {
  SecondOrderReport r;
  const double hp = relative_step(at.price, kSecondStep);
  const double p0 = provider_payoff(at.price, at.share, params);
  r.provider_curvature = (provider_payoff(at.price + hp, at.share, params) - 2 * p0 +
                          provider_payoff(at.price - hp, at.share, params)) /
                         (hp * hp);
  const double hs = share_step(at.share, kSecondStep);
  const double c0 = cloud_payoff(at.price, at.share, params);
  r.cloud_curvature = (cloud_payoff(at.price, at.share + hs, params) - 2 * c0 +
                       cloud_payoff(at.price, at.share - hs, params)) /
                      (hs * hs);

  const Coefficients c = derive_coefficients(params);
  r.provider_numeric_max = r.provider_curvature < 0;
  r.cloud_numeric_max = r.cloud_curvature < 0;
  r.provider_analytic_max = 1.0 - c.a1 / c.a2 < 0;
  r.cloud_analytic_max = c.a4 + c.a2 - params.phi < 0;
  r.agreement = r.provider_numeric_max == r.provider_analytic_max &&
                r.cloud_numeric_max == r.cloud_analytic_max;
  return r;
}

}  // namespace tsm
