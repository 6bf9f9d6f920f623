#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aquaclear/errors.hpp"

namespace aqua {

// One productive activity (crop). Revenue is revenue_coeff * units^elasticity,
// pumping costs pumping_cost per unit, and each unit consumes water_per_unit
// ac-ft. Production is restricted to [min_units, max_units].
struct CropSpec {
  double revenue_coeff = 0.0;   // f, dollars per unit^elasticity
  double elasticity = 1.0;      // alpha in (0, 1]
  double pumping_cost = 0.0;    // q, dollars per unit produced
  double water_per_unit = 1.0;  // a, ac-ft per unit
  double min_units = 0.0;       // n
  double max_units = 0.0;       // N
};

enum class UtilityKind { LogShifted, Power, Linear };

// Risk preference. Utilities outside their native domain are extended by a
// straight line with slope penalty_slope attached C1-smoothly at the knot, so
// the map is total, nondecreasing and concave everywhere.
struct UtilitySpec {
  UtilityKind kind = UtilityKind::Linear;
  double shift = 0.0;             // log_shifted: U = log(pnl - shift)
  double exponent = 1.0;          // power: U = pnl^exponent, exponent in (0,1]
  double penalty_slope = 1000.0;  // slope of the linear continuation
};

double utility_eval(const UtilitySpec& u, double pnl);
// Knot below which the linear continuation applies (-inf for linear kind).
double utility_knot(const UtilitySpec& u);

struct AgentSpec {
  std::vector<CropSpec> crops;
  UtilitySpec utility;
  double bank_cap = 0.0;  // most water the agent may carry into next period
  bool can_bank = true;
};

// Finite-state recharge regime chain. `states` are annual recharge amounts in
// ac-ft, strictly increasing; `transition` is row-stochastic.
struct RegimeChain {
  std::vector<double> states;
  std::vector<std::vector<double>> transition;
};

enum class AllocationKind { Proportional, SeniorJunior, Lognormal };

struct AllocationScheme {
  AllocationKind kind = AllocationKind::Proportional;
  // proportional / lognormal: per-agent fractions of the regime total.
  std::vector<double> theta;
  // senior_junior: per-regime allocation vectors, rows sum to the regime total.
  std::vector<std::vector<double>> table;
  // lognormal: coefficient of variation of the regime pool and node count of
  // its Gauss-Hermite quantization.
  double cv = 0.0;
  int nodes = 1;
};

struct MarketSpec {
  std::vector<AgentSpec> agents;
  RegimeChain chain;
  AllocationScheme allocation;
  int horizon = 1;       // T decision periods, t = 0..T-1
  double discount = 0.0; // delta, per-period continuous rate
  double haircut = 0.0;  // h, fraction of banked water lost in transfer
  std::vector<double> initial_allocation;  // W(0)
  bool trading_enabled = true;
  int grid_size = 64;      // per-axis surrogate resolution
  int br_iterations = 12;  // max best-response sweeps per state
  double price_tolerance = 1e-9;
  double br_tolerance = 1e-5;
  int initial_regime = -1;  // simulation start regime; -1 = middle state
};

// --- derived, solver-facing quantities -------------------------------------

struct CropDerived {
  double f, alpha, q, a, n, N;
  double alpha_f;    // alpha * f
  double inv_exp;    // 1 / (alpha - 1); only meaningful when alpha < 1, f > 0
  double marg_lo;    // marginal profit per ac-ft at max_units
  double marg_hi;    // marginal profit per ac-ft at max(min_units, phi_floor)
  bool is_linear;    // alpha == 1 or f == 0: constant marginal
};

struct AgentDerived {
  std::vector<CropDerived> crops;
  UtilitySpec utility;
  double bank_cap = 0.0;
  bool can_bank = true;
  double c_lo = 0.0;   // minimum feasible consumption, sum n*a
  double c_hi = 0.0;   // maximum feasible consumption, sum N*a
  double c_sat = 0.0;  // consumption at zero marginal value (demand at p->0+)
};

// One quantized realization of next-period allocations for a given regime.
struct ShockNode {
  double weight = 1.0;
  double pool = 0.0;               // (quantized) regime recharge total
  std::vector<double> alloc;       // per-agent allocation at this node
};

// A MarketSpec with every invariant checked and all derived quantities
// precomputed. Immutable after construction; safe to share across threads.
struct ValidatedSpec {
  MarketSpec spec;
  std::vector<AgentDerived> agents;
  std::vector<double> stationary;               // pi of the regime chain
  std::vector<std::vector<ShockNode>> shocks;   // [regime][node]
  std::vector<double> grid_lo, grid_hi;         // surrogate bounds per agent
  std::uint64_t hash = 0;

  int num_agents() const { return static_cast<int>(agents.size()); }
  int num_regimes() const { return static_cast<int>(spec.chain.states.size()); }
  int initial_regime() const {
    return spec.initial_regime >= 0 ? spec.initial_regime : num_regimes() / 2;
  }
  double total_c_lo() const;
  double total_c_hi() const;
};

CropDerived derive_crop(const CropSpec& c);
AgentDerived derive_agent(const AgentSpec& a);

// Checks every invariant and returns the spec with derived quantities
// attached. Throws a SpecError subclass naming the offending field.
ValidatedSpec validate_spec(const MarketSpec& spec);

}  // namespace aqua
