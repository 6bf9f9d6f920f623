#include "aquaclear/solo.hpp"

#include <algorithm>
#include <cmath>

#include "aquaclear/crop_opt.hpp"
#include "aquaclear/scalar_opt.hpp"

namespace aqua {

namespace {

double solo_period_utility(const AgentDerived& ag, double consumption) {
  const double c = std::clamp(consumption, ag.c_lo, ag.c_hi);
  return utility_eval(ag.utility, profit_G(ag, c));
}

}  // namespace

SoloStack solve_single_agent(const AgentDerived& agent, const RegimeChain& chain,
                             const std::vector<std::vector<ShockNode>>& shocks,
                             int agent_index, int horizon, double discount,
                             double haircut, double grid_hi, int grid_size) {
  const int T = horizon;
  const int M = static_cast<int>(chain.states.size());
  const auto grid = linspace(0.0, grid_hi, grid_size);
  const double keep = 1.0 - haircut;
  const double disc = std::exp(-discount);

  SoloStack stack;
  stack.layers.resize(T);

  // Terminal period: consume everything feasible, no banking.
  {
    std::vector<double> vals(grid_size), zeros(grid_size, 0.0);
    for (int i = 0; i < grid_size; ++i) vals[i] = solo_period_utility(agent, grid[i]);
    SoloLayer layer;
    layer.value = ValueCurve::fit(grid, vals);
    layer.bank = ValueCurve::fit(grid, zeros);
    stack.layers[T - 1].assign(M, layer);
  }

  for (int t = T - 2; t >= 0; --t) {
    stack.layers[t].resize(M);
    for (int r = 0; r < M; ++r) {
      const auto& row = chain.transition[r];
      auto continuation = [&](double beta) {
        double sum = 0.0;
        for (int m = 0; m < M; ++m) {
          if (row[m] == 0.0) continue;
          double inner = 0.0;
          for (const ShockNode& node : shocks[m])
            inner += node.weight * stack.layers[t + 1][m].value.eval(
                                       node.alloc[agent_index] + keep * beta);
          sum += row[m] * inner;
        }
        return disc * sum;
      };

      std::vector<double> vals(grid_size), banks(grid_size);
      for (int i = 0; i < grid_size; ++i) {
        const double w = grid[i];
        const double cap =
            agent.can_bank ? std::min(agent.bank_cap, w - agent.c_lo) : 0.0;
        if (cap <= 0.0) {
          banks[i] = 0.0;
          vals[i] = solo_period_utility(agent, w) + continuation(0.0);
          continue;
        }
        auto objective = [&](double beta) {
          return solo_period_utility(agent, w - beta) + continuation(beta);
        };
        BrentResult res = brent_maximize(objective, 0.0, cap, 1e-7);
        const double f0 = objective(0.0);
        if (f0 >= res.f - 1e-12 * (1.0 + std::abs(res.f))) {
          banks[i] = 0.0;
          vals[i] = f0;
        } else {
          banks[i] = res.x;
          vals[i] = res.f;
        }
      }
      stack.layers[t][r].value = ValueCurve::fit(grid, vals);
      stack.layers[t][r].bank = ValueCurve::fit(grid, banks);
    }
  }
  return stack;
}

PolicyStack solve_no_trade(const ValidatedSpec& vs) {
  PolicyStack stack;
  stack.no_trade = true;
  stack.spec_hash = vs.hash;
  stack.horizon = vs.spec.horizon;
  stack.solos.resize(vs.num_agents());
  for (int j = 0; j < vs.num_agents(); ++j)
    stack.solos[j] = solve_single_agent(
        vs.agents[j], vs.spec.chain, vs.shocks, j, vs.spec.horizon,
        vs.spec.discount, vs.spec.haircut, vs.grid_hi[j], vs.spec.grid_size);
  return stack;
}

}  // namespace aqua
