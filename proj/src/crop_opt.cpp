#include "aquaclear/crop_opt.hpp"

#include <algorithm>
#include <cmath>

namespace aqua {

namespace {

constexpr double kPhiFloor = 1e-6;

double budget_tol(double water) { return 1e-9 * std::max(1.0, water); }

struct Totals {
  double water;
  double dwater_dlambda;  // derivative over interior crops, <= 0
};

Totals totals_at(const AgentDerived& ag, double lambda) {
  Totals t{0.0, 0.0};
  for (const auto& c : ag.crops) {
    if (c.is_linear) {
      t.water += c.a * ((lambda < c.marg_lo) ? c.N : c.n);
      continue;
    }
    if (lambda >= c.marg_hi) {
      t.water += c.a * c.n;
    } else if (lambda <= c.marg_lo) {
      t.water += c.a * c.N;
    } else {
      const double base = (lambda * c.a + c.q) / c.alpha_f;
      double phi = std::pow(base, c.inv_exp);
      if (phi <= c.n) {
        t.water += c.a * c.n;
      } else if (phi >= c.N) {
        t.water += c.a * c.N;
      } else {
        t.water += c.a * phi;
        t.dwater_dlambda += c.a * c.inv_exp * (phi / base) * (c.a / c.alpha_f);
      }
    }
  }
  return t;
}

}  // namespace

double crop_marginal(const CropDerived& c, double phi) {
  if (c.f == 0.0) return -c.q / c.a;
  if (c.alpha == 1.0) return (c.f - c.q) / c.a;
  return (c.alpha_f * std::pow(phi, c.alpha - 1.0) - c.q) / c.a;
}

double crop_units_at_marginal(const CropDerived& c, double lambda) {
  if (c.is_linear) return (lambda < c.marg_lo) ? c.N : c.n;
  if (lambda >= c.marg_hi) return c.n;
  if (lambda <= c.marg_lo) return c.N;
  const double base = (lambda * c.a + c.q) / c.alpha_f;
  return std::clamp(std::pow(base, c.inv_exp), c.n, c.N);
}

double profit_F(const AgentDerived& agent, std::span<const double> units) {
  if (units.size() != agent.crops.size())
    throw DimensionMismatch("units", "one production level per crop");
  double profit = 0.0;
  for (size_t k = 0; k < units.size(); ++k) {
    const auto& c = agent.crops[k];
    const double slack = 1e-9 * std::max(1.0, c.N);
    if (units[k] < c.n - slack || units[k] > c.N + slack)
      throw OutOfBounds("units." + std::to_string(k),
                        "production outside [min_units, max_units]");
    profit += c.f * std::pow(units[k], c.alpha) - c.q * units[k];
  }
  return profit;
}

double profit_F(const std::vector<CropSpec>& crops, std::span<const double> units) {
  AgentSpec a;
  a.crops = crops;
  return profit_F(derive_agent(a), units);
}

AllocationResult optimal_allocation(const AgentDerived& ag, double water) {
  const int K = static_cast<int>(ag.crops.size());
  const double tol = budget_tol(water);
  if (water < ag.c_lo - tol || water > ag.c_hi + tol)
    throw InfeasibleBudget("water", "outside the feasible consumption range");
  water = std::clamp(water, ag.c_lo, ag.c_hi);

  AllocationResult res;
  res.units.resize(K);

  auto finish = [&](double lambda) {
    res.multiplier = lambda;
    res.profit = 0.0;
    for (int k = 0; k < K; ++k) {
      const auto& c = ag.crops[k];
      res.profit += c.f * std::pow(res.units[k], c.alpha) - c.q * res.units[k];
    }
    return res;
  };

  // Corner short-circuits: bounds force the production vector.
  if (water <= ag.c_lo + 1e-13 * std::max(1.0, ag.c_lo)) {
    double lam = ag.crops[0].marg_hi;
    for (int k = 0; k < K; ++k) {
      res.units[k] = ag.crops[k].n;
      lam = std::max(lam, ag.crops[k].marg_hi);
    }
    return finish(lam);
  }
  if (water >= ag.c_hi - 1e-13 * std::max(1.0, ag.c_hi)) {
    double lam = ag.crops[0].marg_lo;
    for (int k = 0; k < K; ++k) {
      res.units[k] = ag.crops[k].N;
      lam = std::min(lam, ag.crops[k].marg_lo);
    }
    return finish(lam);
  }

  // Bracket the multiplier: water(lam_lo) = c_hi, water(lam_hi) -> c_lo.
  double lam_lo = ag.crops[0].marg_lo, lam_hi = ag.crops[0].marg_hi;
  for (const auto& c : ag.crops) {
    lam_lo = std::min(lam_lo, c.marg_lo);
    lam_hi = std::max(lam_hi, c.marg_hi);
  }
  lam_lo -= 1.0;
  lam_hi += 1.0;
  for (int it = 0; it < 300 && totals_at(ag, lam_hi).water > water; ++it)
    lam_hi = (lam_hi > 0.0) ? lam_hi * 4.0 : 1.0;

  // Safeguarded Newton on the monotone water(lambda) curve.
  double lam = 0.5 * (lam_lo + lam_hi);
  Totals t{};
  bool met = false;
  for (int it = 0; it < 200; ++it) {
    t = totals_at(ag, lam);
    const double gap = t.water - water;
    if (std::abs(gap) <= tol) {
      met = true;
      break;
    }
    if (gap > 0.0) lam_lo = lam; else lam_hi = lam;
    double next = (t.dwater_dlambda < 0.0) ? lam - gap / t.dwater_dlambda : lam;
    if (!(next > lam_lo && next < lam_hi)) next = 0.5 * (lam_lo + lam_hi);
    if (next == lam) break;
    lam = next;
  }

  for (int k = 0; k < K; ++k)
    res.units[k] = crop_units_at_marginal(ag.crops[k], lam);

  if (!met) {
    // Flat spot: crops whose production jumps at this multiplier (constant
    // marginal, or the floor-capped marginal of min_units == 0 crops) share
    // the remaining budget in index order, starting from their lower bounds.
    const double span = std::abs(lam_hi - lam_lo) + 1e-12 * std::abs(lam);
    std::vector<char> at_jump(K, 0);
    for (int k = 0; k < K; ++k) {
      const auto& c = ag.crops[k];
      at_jump[k] = (c.is_linear && std::abs(c.marg_lo - lam) <= span) ||
                   (!c.is_linear && std::abs(c.marg_hi - lam) <= span);
      if (at_jump[k]) res.units[k] = c.n;
    }
    double fixed = 0.0;
    for (int k = 0; k < K; ++k) fixed += ag.crops[k].a * res.units[k];
    double remaining = water - fixed;
    for (int k = 0; k < K && remaining > 0.0; ++k) {
      if (!at_jump[k]) continue;
      const auto& c = ag.crops[k];
      const double add = std::min(c.N - res.units[k], remaining / c.a);
      res.units[k] += add;
      remaining -= add * c.a;
    }
    if (std::abs(remaining) > tol)
      throw SpecError("crop_opt", "budget equation failed to converge");
  }
  return finish(lam);
}

AllocationResult optimal_allocation(const std::vector<CropSpec>& crops, double water) {
  AgentSpec a;
  a.crops = crops;
  return optimal_allocation(derive_agent(a), water);
}

double profit_G(const AgentDerived& agent, double water) {
  return optimal_allocation(agent, water).profit;
}

double profit_G(const std::vector<CropSpec>& crops, double water) {
  AgentSpec a;
  a.crops = crops;
  return profit_G(derive_agent(a), water);
}

}  // namespace aqua
