#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <vector>

#include "aquaclear/dpp.hpp"
#include "aquaclear/model.hpp"

namespace aqua {

// One simulated market trajectory. All per-period series have length horizon.
// alloc at t = 0 records the initial endowment. price is NaN in no-trade mode.
struct PathRecord {
  std::vector<int> regime;
  std::vector<std::array<double, 2>> alloc;     // new rights R_j(t)
  std::vector<std::array<double, 2>> avail;     // W_j(t)
  std::vector<std::array<double, 2>> bank;      // b_j(t)
  std::vector<std::array<double, 2>> cons;      // C_j(t)
  std::vector<std::array<double, 2>> trade;     // psi_j(t), > 0 = sell
  std::vector<double> price;                    // p(t)
  std::vector<std::array<double, 2>> pnl;       // L_j(t)
  std::vector<std::array<double, 2>> util;      // U_j(L_j(t))
  std::vector<std::array<double, 2>> residual;  // W - C - psi - b
};

// Pooled mean / standard deviation over paths x window periods.
struct SummaryTable {
  int n_paths = 0;
  std::vector<int> window;
  bool has_price = true;
  double price_mean = 0.0, price_sd = 0.0;
  std::array<double, 2> bank_mean{}, bank_sd{};
  std::array<double, 2> pnl_mean{}, pnl_sd{};
  std::array<double, 2> util_mean{}, util_sd{};
};

// Per-agent profit distribution when consuming raw allocations with no
// banking: one support point per regime, weighted by the stationary law.
struct NoBankingBaseline {
  std::vector<double> weights;                      // stationary probabilities
  std::vector<std::array<double, 2>> pnl_support;   // per regime
  std::vector<std::array<double, 2>> util_support;  // per regime
};

// Monte Carlo forward pass under the solved stack. Paths get independent RNG
// substreams keyed by (seed, path index), so records are byte-identical for
// any thread count. Throws StackMismatch when the stack was solved for a
// different spec.
std::vector<PathRecord> simulate_paths(const ValidatedSpec& vs,
                                       const PolicyStack& stack, int n_paths,
                                       std::uint64_t seed, int threads = 0);

SummaryTable summarize(const std::vector<PathRecord>& records,
                       const std::vector<int>& window);

NoBankingBaseline profit_no_banking_baseline(const ValidatedSpec& vs);

}  // namespace aqua
