#pragma once

#include <span>
#include <vector>

#include "aquaclear/model.hpp"

namespace aqua {

// One-period market outcome at a non-banked rights vector w_tilde.
// trades[j] > 0 means agent j sells. sum(trades) == 0 bit-exactly.
struct EquilibriumPoint {
  double price = 0.0;
  std::vector<double> consumption;
  std::vector<double> trades;
  std::vector<double> pnl;        // G_j(C_j) + trades_j * price
  std::vector<double> utilities;  // U_j(pnl_j)
};

struct PriceBracket {
  double lo = 0.0;
  double hi = 0.0;
};

// Immutable one-period market for a fixed agent roster. Demands have a closed
// form (the crop water-filling rule evaluated at the price), so the clearing
// price comes from bisection on the monotone excess-demand function. A
// price-by-supply table built once at construction provides warm brackets.
// All methods are const and safe to call concurrently.
class Market {
 public:
  explicit Market(const ValidatedSpec& vs);
  explicit Market(std::vector<AgentDerived> agents, double price_tolerance = 1e-9);

  int num_agents() const { return static_cast<int>(agents_.size()); }
  const AgentDerived& agent(int j) const { return agents_[j]; }

  // Water demand of agent j at price p: the consumption maximizing
  // U(G(C) + (w - C) p) over [c_lo, c_hi]. Monotone U makes the maximizer
  // independent of wealth and risk preference, so w is not needed.
  double agent_demand(int j, double price) const;
  double aggregate_demand(double price) const;

  // Geometric expansion from [0.01, 10] until excess demand changes sign.
  // Degenerate brackets (lo == hi) signal saturation / scarcity corners.
  // Throws NoBracket when total supply is outside [sum c_lo, sum c_hi].
  PriceBracket find_bracket(double total_supply) const;

  EquilibriumPoint clear(std::span<const double> w_tilde) const;
  // Allocation-free variant for hot loops; price_hint (> 0) seeds the bracket.
  void clear_into(std::span<const double> w_tilde, EquilibriumPoint& out,
                  double price_hint = 0.0) const;

  double total_c_lo() const { return sum_c_lo_; }
  double total_c_hi() const { return sum_c_hi_; }
  double total_c_sat() const { return sum_c_sat_; }

 private:
  double solve_price(double supply, double hint) const;

  std::vector<AgentDerived> agents_;
  double price_tol_;
  double sum_c_lo_, sum_c_hi_, sum_c_sat_;
  // Monotone price-by-supply table for warm bracketing.
  std::vector<double> table_supply_, table_price_;
};

// Free-function forms of the operations above, for one-off use.
double agent_demand(const AgentSpec& agent, double w_tilde, double price);
double aggregate_demand(const std::vector<AgentSpec>& agents,
                        std::span<const double> w_tilde, double price);
PriceBracket find_bracket(const std::vector<AgentSpec>& agents,
                          std::span<const double> w_tilde);
EquilibriumPoint clear_one_period(const std::vector<AgentSpec>& agents,
                                  std::span<const double> w_tilde);

}  // namespace aqua
