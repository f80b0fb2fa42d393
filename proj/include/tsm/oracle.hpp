#pragma once

// Brute-force equilibrium search used to verify the closed forms. Nothing in
// here uses the best-response formulas: the provider's price is a grid argmax
// of its payoff, the platform's share is a grid argmax of its payoff at that
// price, and an equilibrium is a grid point where the two responses agree.
// Each cluster of agreeing grid rows is then re-gridded on a narrow window,
// a few times over, so the reported point is far finer than the base grid.
// Only interior agreements count: a platform reply pinned to the edge of the
// share grid is a corner of the truncated game, reported separately.

#include <cstddef>

#include "tsm/market.hpp"
#include "tsm/parallel.hpp"

namespace tsm {

inline constexpr double kOracleShareMin = 0.01;
inline constexpr double kOracleShareMax = 0.99;

struct OracleResult {
  bool found = false;          // at least one interior mutual-best-response point
  bool price_bounded = true;   // provider argmax stayed inside the price grid
  std::size_t fixed_points = 0;
  // Agreements at the edges of the share grid and the best platform payoff
  // among them (-inf when none).
  std::size_t corner_points = 0;
  double corner_cloud_payoff = 0;
  double corner_share = 0;
  double corner_price = 0;
  double share = 0;
  double price = 0;
  double cloud_payoff = 0;
  double share_step = 0;       // absolute spacing of the share grid
  double price_step = 0;       // relative spacing of the (log) price grid

  // Leader-commitment diagnostic: the share maximizing the platform's payoff
  // when it anticipates the provider's grid response.
  double leader_share = 0;
  double leader_price = 0;
  double leader_cloud_payoff = 0;
};

/// Requires grid_n >= 100. The share grid has grid_n points on [0.01, 0.99];
/// the price grid has grid_n log-spaced points starting at the break-even price
/// of the lowest share and widened until the provider's argmax is interior.
/// share_step and price_step describe this base grid.
OracleResult oracle_equilibrium(const MarketParams& params, std::size_t grid_n,
                                Execution exec = Execution::serial);

}  // namespace tsm
