#pragma once

#include <span>
#include <vector>

#include "aquaclear/model.hpp"

namespace aqua {

// Result of the per-period crop allocation subproblem: maximize total profit
// subject to production bounds and the water budget sum(a_k * units_k) = water.
struct AllocationResult {
  std::vector<double> units;
  double profit = 0.0;
  double multiplier = 0.0;  // shadow value of water, dollars per ac-ft
};

// Marginal profit per ac-ft of crop c at production level phi.
double crop_marginal(const CropDerived& c, double phi);

// Production level at which crop c's marginal profit per ac-ft equals lambda,
// clipped to [min_units, max_units]. This is the crop's water-filling rule.
double crop_units_at_marginal(const CropDerived& c, double lambda);

// Exact profit sum(f_k phi_k^alpha_k - q_k phi_k); throws OutOfBounds if any
// phi_k violates its production bounds.
double profit_F(const AgentDerived& agent, std::span<const double> units);
double profit_F(const std::vector<CropSpec>& crops, std::span<const double> units);

// Concave allocation solver: finds the multiplier equalizing clipped marginal
// profit per ac-ft across crops so the budget holds to 1e-9 * max(1, water).
// Throws InfeasibleBudget when water lies outside [c_lo, c_hi].
AllocationResult optimal_allocation(const AgentDerived& agent, double water);
AllocationResult optimal_allocation(const std::vector<CropSpec>& crops, double water);

double profit_G(const AgentDerived& agent, double water);
double profit_G(const std::vector<CropSpec>& crops, double water);

}  // namespace aqua
