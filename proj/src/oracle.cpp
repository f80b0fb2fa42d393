#include "tsm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tsm {

namespace {

constexpr double kInitialPriceSpan = 1e3;
constexpr int kMaxSpanWidenings = 10;
// Zoom stages: each cluster of agreement points is re-gridded on a window a
// few cells wide, kRefineLevels times, with kRefinePoints per axis.
constexpr int kRefineLevels = 4;
constexpr std::size_t kRefinePoints = 201;
constexpr std::size_t kClusterGap = 4;     // candidates this close form one cluster
constexpr std::size_t kWindowMargin = 4;   // cells added on each side of a cluster
constexpr double kPriceMargin = 2.0;       // parent price cells added on each side

constexpr double kInf = std::numeric_limits<double>::infinity();

// One grid stage. Prices are log-spaced. A refinement stage covers a window
// of the share range; the platform's reply is still taken over the whole
// range, with points outside the window encoded as -1 (below) or size()
// (above).
struct Stage {
  std::vector<double> share, log_price;
  std::vector<double> outer_share;  // coarse points outside the window
  std::vector<std::size_t> best_price;
  std::vector<long> reply;
  std::vector<bool> reply_on_edge;  // reply is 0.01 or 0.99
};

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = i + 1 == n ? hi : lo + step * static_cast<double>(i);
  return v;
}

std::vector<double> log_grid(double log_lo, double log_hi, std::size_t n) { return linspace(log_lo, log_hi, n); }

std::size_t argmax_provider_row(const std::vector<double>& price, const std::vector<double>& demand_factor,
                                double share, double f_c) {
  std::size_t best = 0;
  double best_value = -kInf;
  for (std::size_t i = 0; i < price.size(); ++i) {
    const double value = (price[i] * (1.0 - share) - f_c) * demand_factor[i];
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

struct PriceTables {
  std::vector<double> price, log_demand, demand_factor;
};

PriceTables price_tables(const std::vector<double>& log_price, const ReducedForms& forms) {
  PriceTables t;
  const std::size_t n = log_price.size();
  t.price.resize(n);
  t.log_demand.resize(n);
  t.demand_factor.resize(n);
  double max_log = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    t.price[i] = std::exp(log_price[i]);
    t.log_demand[i] = forms.demand_const() + forms.demand_price_exponent() * log_price[i];
    max_log = std::max(max_log, t.log_demand[i]);
  }
  for (std::size_t i = 0; i < n; ++i) t.demand_factor[i] = std::exp(t.log_demand[i] - max_log);
  return t;
}

bool on_global_edge(double share) { return share <= kOracleShareMin || share >= kOracleShareMax; }

// Provider argmax per share row and the platform's argmax over all shares at
// that price. Share tables are normalized at the top of the share range.
void solve_stage(Stage& s, const ReducedForms& forms, const MarketParams& params, Execution exec) {
  const std::size_t ns = s.share.size();
  const PriceTables t = price_tables(s.log_price, forms);
  const double log_share_max = std::log(kOracleShareMax);
  std::vector<double> all_share = s.share;
  all_share.insert(all_share.end(), s.outer_share.begin(), s.outer_share.end());
  const std::size_t na = all_share.size();
  std::vector<double> revenue_factor(na), supply_factor(na);
  for (std::size_t k = 0; k < na; ++k) {
    const double rel = std::log(all_share[k]) - log_share_max;
    revenue_factor[k] = std::exp((forms.demand_share_exponent() + 1.0) * rel);
    supply_factor[k] = std::exp(forms.supply_share_exponent() * rel);
  }
  s.best_price.assign(ns, 0);
  s.reply.assign(ns, 0);
  s.reply_on_edge.assign(ns, false);
  for_each_index(ns, exec, [&](std::size_t j) {
    const std::size_t i = argmax_provider_row(t.price, t.demand_factor, s.share[j], params.f_c);
    s.best_price[j] = i;
    const double log_revenue =
        s.log_price[i] + t.log_demand[i] + (forms.demand_share_exponent() + 1.0) * log_share_max;
    const double log_cost = params.f_s > 0 ? std::log(params.f_s) + forms.supply_const() +
                                                 forms.supply_price_exponent() * s.log_price[i] +
                                                 forms.supply_share_exponent() * log_share_max
                                           : -kInf;
    const double scale = std::max(log_revenue, log_cost);
    const double w_revenue = std::exp(log_revenue - scale);
    const double w_cost = std::exp(log_cost - scale);
    std::size_t best = 0;
    double best_value = -kInf;
    for (std::size_t k = 0; k < na; ++k) {
      const double value = w_revenue * revenue_factor[k] - w_cost * supply_factor[k];
      if (value > best_value) {
        best_value = value;
        best = k;
      }
    }
    if (best < ns) s.reply[j] = static_cast<long>(best);
    else s.reply[j] = all_share[best] < s.share.front() ? -1 : static_cast<long>(ns);
    s.reply_on_edge[j] = on_global_edge(all_share[best]);
  });
}

// Rows where the two responses agree: reply(j) == j, or reply(j) - j changes
// sign between neighbours (the closer of the two is kept).
std::vector<std::size_t> agreement_rows(const Stage& s) {
  const std::size_t n = s.share.size();
  auto gap = [&](std::size_t j) { return s.reply[j] - static_cast<long>(j); };
  std::vector<bool> hit(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (gap(j) == 0) hit[j] = true;
    if (j + 1 < n) {
      const long a = gap(j), b = gap(j + 1);
      if ((a > 0 && b < 0) || (a < 0 && b > 0)) hit[std::labs(a) <= std::labs(b) ? j : j + 1] = true;
    }
  }
  std::vector<std::size_t> rows;
  for (std::size_t j = 0; j < n; ++j) {
    if (hit[j]) rows.push_back(j);
  }
  return rows;
}

std::vector<std::pair<std::size_t, std::size_t>> clusters(const std::vector<std::size_t>& rows) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t r : rows) {
    if (!out.empty() && r - out.back().second <= kClusterGap) out.back().second = r;
    else out.emplace_back(r, r);
  }
  return out;
}

struct Agreement {
  double share = 0;
  double price = 0;
  bool corner = false;  // the platform's reply sits on the edge of [0.01, 0.99]
};

// Re-grids the cluster [lo, hi] of `parent` and recurses; appends the
// resolved agreements to `out`.
void refine(const Stage& parent, std::size_t lo, std::size_t hi, int level, const ReducedForms& forms,
            const MarketParams& params, std::vector<Agreement>& out) {
  const std::size_t np = parent.share.size();
  const std::size_t mid = (lo + hi) / 2;
  const bool corner_reply = [&] {
    for (std::size_t j = lo; j <= hi; ++j) {
      if (parent.reply_on_edge[j]) return true;
    }
    return false;
  }();
  if (level == kRefineLevels) {
    out.push_back({parent.share[mid], std::exp(parent.log_price[parent.best_price[mid]]), corner_reply});
    return;
  }

  const std::size_t a = lo >= kWindowMargin ? lo - kWindowMargin : 0;
  const std::size_t b = std::min(np - 1, hi + kWindowMargin);
  const double parent_log_step = parent.log_price[1] - parent.log_price[0];
  Stage child;
  child.share = linspace(parent.share[a], parent.share[b], kRefinePoints);
  for (double x : parent.share) {
    if (x < child.share.front() || x > child.share.back()) child.outer_share.push_back(x);
  }
  for (double x : parent.outer_share) child.outer_share.push_back(x);
  double log_lo = parent.log_price[parent.best_price[a]] - kPriceMargin * parent_log_step;
  double log_hi = parent.log_price[parent.best_price[b]] + kPriceMargin * parent_log_step;
  for (int widen = 0;; ++widen) {
    child.log_price = log_grid(log_lo, log_hi, kRefinePoints);
    solve_stage(child, forms, params, Execution::serial);
    const auto [mn, mx] = std::minmax_element(child.best_price.begin(), child.best_price.end());
    const bool low_edge = *mn == 0, high_edge = *mx + 1 == kRefinePoints;
    if ((!low_edge && !high_edge) || widen == 4) break;
    const double width = log_hi - log_lo;
    if (low_edge) log_lo -= width;
    if (high_edge) log_hi += width;
  }

  for (const auto& [clo, chi] : clusters(agreement_rows(child))) refine(child, clo, chi, level + 1, forms, params, out);
}

}  // namespace

OracleResult oracle_equilibrium(const MarketParams& params, std::size_t n, Execution exec) {
  if (n < 100) throw std::invalid_argument("oracle grid needs at least 100 points");
  const ReducedForms forms(params);
  OracleResult out;

  Stage coarse;
  coarse.share = linspace(kOracleShareMin, kOracleShareMax, n);
  out.share_step = (kOracleShareMax - kOracleShareMin) / static_cast<double>(n - 1);

  // Price grid: log-spaced from the break-even price of the lowest share,
  // widened until the provider's argmax at the highest share is interior.
  const double log_lo = std::log(params.f_c > 0 ? params.f_c / (1.0 - kOracleShareMin) : 1e-6);
  double span = kInitialPriceSpan;
  for (int widening = 0;; ++widening) {
    coarse.log_price = log_grid(log_lo, log_lo + std::log(span), n);
    const PriceTables t = price_tables(coarse.log_price, forms);
    out.price_step = std::expm1(coarse.log_price[1] - coarse.log_price[0]);
    if (argmax_provider_row(t.price, t.demand_factor, coarse.share.back(), params.f_c) + 1 < n) break;
    if (widening == kMaxSpanWidenings) {
      out.price_bounded = false;
      break;
    }
    span *= 10;
  }
  solve_stage(coarse, forms, params, exec);

  std::vector<double> payoff(n);
  for_each_index(n, exec, [&](std::size_t j) {
    payoff[j] = cloud_payoff(std::exp(coarse.log_price[coarse.best_price[j]]), coarse.share[j], params);
  });
  std::size_t leader = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (payoff[j] > payoff[leader]) leader = j;
  }
  out.leader_share = coarse.share[leader];
  out.leader_price = std::exp(coarse.log_price[coarse.best_price[leader]]);
  out.leader_cloud_payoff = payoff[leader];

  std::vector<Agreement> agreements;
  for (const auto& [lo, hi] : clusters(agreement_rows(coarse))) refine(coarse, lo, hi, 0, forms, params, agreements);

  out.corner_cloud_payoff = -kInf;
  for (const Agreement& g : agreements) {
    const double value = cloud_payoff(g.price, g.share, params);
    if (g.corner) {
      ++out.corner_points;
      if (value > out.corner_cloud_payoff) {
        out.corner_cloud_payoff = value;
        out.corner_share = g.share;
        out.corner_price = g.price;
      }
      continue;
    }
    ++out.fixed_points;
    if (!out.found || value > out.cloud_payoff) {
      out.found = true;
      out.share = g.share;
      out.price = g.price;
      out.cloud_payoff = value;
    }
  }
  return out;
}

}  // namespace tsm
