#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "aquaclear/clearing.hpp"
#include "aquaclear/model.hpp"
#include "aquaclear/surface.hpp"

namespace aqua {

// Fitted surrogates for one (period, regime) slice of the two-agent game:
// total values, banking policies and the clearing price over the allocation
// rectangle.
struct LayerSurfaces {
  std::array<ValueSurface, 2> value;
  std::array<ValueSurface, 2> bank;
  ValueSurface price;
};

// Banking Nash equilibrium at one state: the fixed point of the alternating
// best-response maps, the market outcome at w - bank, and the per-agent total
// (current + discounted continuation) values.
struct BankingOutcome {
  std::array<double, 2> bank{0.0, 0.0};
  EquilibriumPoint point;
  std::array<double, 2> continuation{0.0, 0.0};
  std::array<double, 2> total{0.0, 0.0};
  bool converged = true;
  int sweeps = 0;
  bool clamped = false;  // state's supply had to be clamped into feasibility
};

struct LayerStats {
  int cells = 0;
  int clamped = 0;
  int nonconverged = 0;
};

// Single-agent layer (used by the no-trade stack): value and banking policy
// curves over the agent's own allocation.
struct SoloLayer {
  ValueCurve value;
  ValueCurve bank;
};

// Per-agent stack of solo layers, [t][r].
struct SoloStack {
  std::vector<std::vector<SoloLayer>> layers;
};

// Full solved policy: either market layers (trading) or per-agent solo stacks
// (no trading). Indexed [t][r] with t = 0..T-1.
struct PolicyStack {
  bool no_trade = false;
  std::uint64_t spec_hash = 0;
  int horizon = 0;
  std::vector<std::vector<LayerSurfaces>> layers;
  std::vector<SoloStack> solos;
  std::vector<LayerStats> stats;  // per t (trading mode)
};

// Discounted expected next-period value of both agents given banked amounts:
// e^{-delta} sum_m Q[r][m] sum_l e_l V_j(t+1, alloc(m,l) + (1-h) b, m).
std::array<double, 2> continuation_value(std::span<const LayerSurfaces> next_layer,
                                         const ValidatedSpec& vs,
                                         std::array<double, 2> bank, int r_index);

// Agent j's optimal banking reply to b_other at state (w, r), maximizing
// current equilibrium utility plus continuation over the feasible interval.
// Ties (within 1e-12 relative) break toward smaller banking.
double best_response_b(const ValidatedSpec& vs, const Market& market, int j,
                       double b_other, std::span<const double> w, int r_index,
                       std::span<const LayerSurfaces> next_layer);

// Alternating best-response iteration from (0, 0), agent 0 first. A null/empty
// next layer means the terminal period: no banking, pure one-period market.
BankingOutcome banking_equilibrium(const ValidatedSpec& vs, const Market& market,
                                   std::span<const double> w, int r_index,
                                   std::span<const LayerSurfaces> next_layer);

// Surfaces fitted from one-period equilibria with no banking; the terminal
// layer is identical across regimes.
std::vector<LayerSurfaces> terminal_layer(const ValidatedSpec& vs, const Market& market);

// Backward induction over t = T-2..0 on a grid_size^2 training grid per
// regime. threads > 1 runs the OpenMP kernel, threads == 1 the serial
// reference; both produce bit-identical stacks.
PolicyStack solve_backward(const ValidatedSpec& vs, int threads = 0);

// Values/policies for one (layer, regime) at every training point, before
// fitting. Flag arrays let the parallel kernel record per-cell diagnostics
// without contended counters.
struct LayerCells {
  std::vector<double> value[2], bank[2], price;
  std::vector<unsigned char> clamped, nonconverged;
  LayerStats stats() const;
};

// Solve every regime of one layer on the training grid. The serial loop is the
// reference implementation; the OpenMP kernel writes the same disjoint cells
// and must produce bit-identical results at any thread count.
std::vector<LayerCells> solve_layer_serial(const ValidatedSpec& vs,
                                           const Market& market,
                                           std::span<const double> gx,
                                           std::span<const double> gy,
                                           std::span<const LayerSurfaces> next_layer);
std::vector<LayerCells> solve_layer_parallel(const ValidatedSpec& vs,
                                             const Market& market,
                                             std::span<const double> gx,
                                             std::span<const double> gy,
                                             std::span<const LayerSurfaces> next_layer,
                                             int threads);

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace aqua
