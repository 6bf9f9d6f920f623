#include "aquaclear/clearing.hpp"

#include <algorithm>
#include <cmath>

#include "aquaclear/crop_opt.hpp"

namespace aqua {

namespace {

constexpr int kTableSize = 4096;
constexpr int kMaxExpand = 60;
constexpr int kMaxBisect = 200;

double supply_slack(double s) { return 1e-7 * std::max(1.0, std::abs(s)); }

}  // namespace

Market::Market(const ValidatedSpec& vs)
    : Market(vs.agents, vs.spec.price_tolerance) {}

Market::Market(std::vector<AgentDerived> agents, double price_tolerance)
    : agents_(std::move(agents)), price_tol_(price_tolerance) {
  sum_c_lo_ = sum_c_hi_ = sum_c_sat_ = 0.0;
  double marg_min = 0.0, marg_max = 0.0;
  bool any = false;
  for (const auto& a : agents_) {
    sum_c_lo_ += a.c_lo;
    sum_c_hi_ += a.c_hi;
    sum_c_sat_ += a.c_sat;
    for (const auto& c : a.crops) {
      if (c.marg_hi <= 0.0) continue;
      const double lo = std::max(c.marg_lo, 1e-9);
      if (!any) {
        marg_min = lo;
        marg_max = c.marg_hi;
        any = true;
      } else {
        marg_min = std::min(marg_min, lo);
        marg_max = std::max(marg_max, c.marg_hi);
      }
    }
  }
  if (!any || sum_c_sat_ <= sum_c_lo_) return;  // degenerate market, no table

  // Demand is closed-form in the price, so the inverse map is tabulated by
  // sampling prices geometrically across the span of crop marginals.
  const double p_lo = 0.25 * marg_min, p_hi = 4.0 * marg_max;
  const double ratio = std::log(p_hi / p_lo);
  table_supply_.resize(kTableSize);
  table_price_.resize(kTableSize);
  for (int i = 0; i < kTableSize; ++i) {
    // Descending price makes the supply column ascending.
    const double p = p_hi * std::exp(-ratio * i / (kTableSize - 1));
    table_price_[i] = p;
    table_supply_[i] = aggregate_demand(p);
  }
}

double Market::agent_demand(int j, double price) const {
  const AgentDerived& a = agents_[j];
  double c = 0.0;
  for (const auto& crop : a.crops)
    c += crop.a * crop_units_at_marginal(crop, price);
  return c;
}

double Market::aggregate_demand(double price) const {
  double c = 0.0;
  for (int j = 0; j < num_agents(); ++j) c += agent_demand(j, price);
  return c;
}

PriceBracket Market::find_bracket(double total_supply) const {
  if (total_supply < sum_c_lo_ - supply_slack(sum_c_lo_) ||
      total_supply > sum_c_hi_ + supply_slack(sum_c_hi_))
    throw NoBracket("supply", "total supply outside the feasible range");

  double lo = 0.01, hi = 10.0;
  double e_lo = aggregate_demand(lo) - total_supply;
  int it = 0;
  while (e_lo < 0.0 && it++ < kMaxExpand) {
    lo *= 0.5;
    e_lo = aggregate_demand(lo) - total_supply;
  }
  if (e_lo < 0.0) return {lo, lo};  // saturated: demand below supply everywhere

  double e_hi = aggregate_demand(hi) - total_supply;
  it = 0;
  while (e_hi > 0.0 && it++ < kMaxExpand) {
    hi *= 2.0;
    e_hi = aggregate_demand(hi) - total_supply;
  }
  if (e_hi > 0.0) return {hi, hi};  // scarce: demand above supply up to the cap
  return {lo, hi};
}

double Market::solve_price(double supply, double hint) const {
  const double tol = price_tol_ * std::max(1.0, std::abs(supply));
  double lo = 0.0, hi = 0.0;
  bool have = false;

  auto try_bracket = [&](double a, double b) {
    if (!(a > 0.0) || !(b > a)) return false;
    if (aggregate_demand(a) - supply < 0.0) return false;
    if (aggregate_demand(b) - supply > 0.0) return false;
    lo = a;
    hi = b;
    return true;
  };

  if (hint > 0.0) have = try_bracket(hint * 0.9, hint * 1.12);
  if (!have && !table_supply_.empty() && supply >= table_supply_.front() &&
      supply <= table_supply_.back()) {
    auto it = std::upper_bound(table_supply_.begin(), table_supply_.end(), supply);
    int i = std::max<int>(1, static_cast<int>(it - table_supply_.begin()));
    i = std::min<int>(i, kTableSize - 1);
    // supply in [table_supply_[i-1], table_supply_[i]] => price in
    // [table_price_[i], table_price_[i-1]].
    have = try_bracket(table_price_[i] * 0.999999, table_price_[i - 1] * 1.000001);
  }
  if (!have) {
    PriceBracket br = find_bracket(supply);
    if (br.lo == br.hi) return br.lo;  // degenerate corner
    lo = br.lo;
    hi = br.hi;
  }

  for (int i = 0; i < kMaxBisect && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double excess = aggregate_demand(mid) - supply;
    if (std::abs(excess) <= tol) return mid;
    if (excess > 0.0) lo = mid; else hi = mid;
  }
  // Flat excess demand at the root: deterministic midpoint.
  return 0.5 * (lo + hi);
}

void Market::clear_into(std::span<const double> w_tilde, EquilibriumPoint& out,
                        double price_hint) const {
  const int J = num_agents();
  double supply = 0.0;
  for (double w : w_tilde) supply += w;
  if (supply < sum_c_lo_ - supply_slack(sum_c_lo_) ||
      supply > sum_c_hi_ + supply_slack(sum_c_hi_))
    throw NoBracket("supply", "total supply outside the feasible range");

  const double p = solve_price(supply, price_hint);
  out.price = p;
  out.consumption.resize(J);
  out.trades.resize(J);
  out.pnl.resize(J);
  out.utilities.resize(J);

  for (int j = 0; j < J; ++j) out.consumption[j] = agent_demand(j, p);
  double total = 0.0;
  for (int j = 0; j < J; ++j) total += out.consumption[j];
  double residual = supply - total;

  const double tol = price_tol_ * std::max(1.0, std::abs(supply));
  int absorber = 0;
  for (int j = 1; j < J; ++j)
    if (out.consumption[j] > out.consumption[absorber]) absorber = j;

  if (std::abs(residual) <= 10.0 * tol) {
    out.consumption[absorber] += residual;
  } else {
    // Degenerate corner (saturation or scarcity): spread by remaining
    // capacity in the direction of the imbalance, deterministically.
    for (int pass = 0; pass < J && std::abs(residual) > 1e-15 * std::max(1.0, supply);
         ++pass) {
      for (int j = 0; j < J; ++j) {
        const AgentDerived& a = agents_[j];
        double take;
        if (residual > 0.0)
          take = std::min(residual, a.c_hi - out.consumption[j]);
        else
          take = std::max(residual, a.c_lo - out.consumption[j]);
        out.consumption[j] += take;
        residual -= take;
      }
    }
    out.consumption[absorber] += residual;  // closing dust
    absorber = 0;
    for (int j = 1; j < J; ++j)
      if (out.consumption[j] > out.consumption[absorber]) absorber = j;
  }

  // Zero-sum trades, bit-exactly: the absorber takes the negated sum.
  double others = 0.0;
  for (int j = 0; j < J; ++j) {
    if (j == absorber) continue;
    out.trades[j] = w_tilde[j] - out.consumption[j];
    others += out.trades[j];
  }
  out.trades[absorber] = -others;
  out.consumption[absorber] = w_tilde[absorber] - out.trades[absorber];

  for (int j = 0; j < J; ++j) {
    const AgentDerived& a = agents_[j];
    const double c = std::clamp(out.consumption[j], a.c_lo, a.c_hi);
    out.pnl[j] = profit_G(a, c) + out.trades[j] * p;
    out.utilities[j] = utility_eval(a.utility, out.pnl[j]);
  }
}

EquilibriumPoint Market::clear(std::span<const double> w_tilde) const {
  EquilibriumPoint out;
  clear_into(w_tilde, out);
  return out;
}

double agent_demand(const AgentSpec& agent, double /*w_tilde*/, double price) {
  const AgentDerived d = derive_agent(agent);
  double c = 0.0;
  for (const auto& crop : d.crops) c += crop.a * crop_units_at_marginal(crop, price);
  return c;
}

namespace {
Market make_market(const std::vector<AgentSpec>& agents) {
  std::vector<AgentDerived> ds;
  ds.reserve(agents.size());
  for (const auto& a : agents) ds.push_back(derive_agent(a));
  return Market(std::move(ds));
}
}  // namespace

double aggregate_demand(const std::vector<AgentSpec>& agents,
                        std::span<const double> /*w_tilde*/, double price) {
  double c = 0.0;
  for (const auto& a : agents) c += agent_demand(a, 0.0, price);
  return c;
}

PriceBracket find_bracket(const std::vector<AgentSpec>& agents,
                          std::span<const double> w_tilde) {
  double s = 0.0;
  for (double w : w_tilde) s += w;
  return make_market(agents).find_bracket(s);
}

EquilibriumPoint clear_one_period(const std::vector<AgentSpec>& agents,
                                  std::span<const double> w_tilde) {
  return make_market(agents).clear(w_tilde);
}

}  // namespace aqua
