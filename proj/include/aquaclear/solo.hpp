#pragma once

#include <vector>

#include "aquaclear/dpp.hpp"
#include "aquaclear/model.hpp"

namespace aqua {

// Backward recursion for a lone agent who banks but cannot trade: each period
// consume w - beta (clamped to the feasible consumption range) and carry
// (1 - haircut) * beta forward. allocation[m] holds the agent's own quantized
// allocation nodes per regime.
SoloStack solve_single_agent(const AgentDerived& agent, const RegimeChain& chain,
                             const std::vector<std::vector<ShockNode>>& shocks,
                             int agent_index, int horizon, double discount,
                             double haircut, double grid_hi, int grid_size);

// No-trade variant of the market: every agent solves their own banking problem
// on their own allocation stream. Prices are absent from the resulting stack.
PolicyStack solve_no_trade(const ValidatedSpec& vs);

}  // namespace aqua
