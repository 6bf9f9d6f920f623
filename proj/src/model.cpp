#include "aquaclear/model.hpp"

#include <cmath>
#include <limits>

#include "aquaclear/json_io.hpp"
#include "aquaclear/recharge.hpp"

namespace aqua {

namespace {

constexpr double kPhiFloor = 1e-6;  // marginal-profit cap for crops with n = 0

std::string agent_field(int j, const std::string& rest) {
  return "agents." + std::to_string(j) + "." + rest;
}

void check_finite(double v, const std::string& field) {
  if (!std::isfinite(v)) throw NonFiniteValue(field, "must be finite");
}

}  // namespace

double utility_knot(const UtilitySpec& u) {
  switch (u.kind) {
    case UtilityKind::LogShifted:
      return u.shift + 1.0 / u.penalty_slope;
    case UtilityKind::Power: {
      if (u.exponent >= 1.0) return -std::numeric_limits<double>::infinity();
      // Attach the continuation where the native slope reaches penalty_slope.
      return std::pow(u.exponent / u.penalty_slope, 1.0 / (1.0 - u.exponent));
    }
    case UtilityKind::Linear:
      return -std::numeric_limits<double>::infinity();
  }
  return -std::numeric_limits<double>::infinity();
}

double utility_eval(const UtilitySpec& u, double pnl) {
  switch (u.kind) {
    case UtilityKind::LogShifted: {
      const double knot = u.shift + 1.0 / u.penalty_slope;
      if (pnl > knot) return std::log(pnl - u.shift);
      return std::log(1.0 / u.penalty_slope) + (pnl - knot) * u.penalty_slope;
    }
    case UtilityKind::Power: {
      if (u.exponent >= 1.0) return pnl;
      const double knot = utility_knot(u);
      if (pnl >= knot) return std::pow(pnl, u.exponent);
      return std::pow(knot, u.exponent) + (pnl - knot) * u.penalty_slope;
    }
    case UtilityKind::Linear:
      return pnl;
  }
  return pnl;
}

CropDerived derive_crop(const CropSpec& c) {
  CropDerived d;
  d.f = c.revenue_coeff;
  d.alpha = c.elasticity;
  d.q = c.pumping_cost;
  d.a = c.water_per_unit;
  d.n = c.min_units;
  d.N = c.max_units;
  d.alpha_f = d.alpha * d.f;
  d.is_linear = (d.alpha == 1.0) || (d.f == 0.0);
  d.inv_exp = d.is_linear ? 0.0 : 1.0 / (d.alpha - 1.0);
  auto marginal = [&](double phi) {
    if (d.f == 0.0) return -d.q / d.a;
    if (d.alpha == 1.0) return (d.f - d.q) / d.a;
    return (d.alpha_f * std::pow(phi, d.alpha - 1.0) - d.q) / d.a;
  };
  d.marg_lo = marginal(d.N);
  d.marg_hi = marginal(std::max(d.n, kPhiFloor));
  return d;
}

AgentDerived derive_agent(const AgentSpec& a) {
  AgentDerived d;
  d.utility = a.utility;
  d.bank_cap = a.bank_cap;
  d.can_bank = a.can_bank;
  d.crops.reserve(a.crops.size());
  for (const auto& c : a.crops) d.crops.push_back(derive_crop(c));
  d.c_lo = d.c_hi = d.c_sat = 0.0;
  for (const auto& c : d.crops) {
    d.c_lo += c.n * c.a;
    d.c_hi += c.N * c.a;
    // Demand as price -> 0+: production where marginal profit hits zero.
    double phi_sat;
    if (c.f == 0.0) {
      phi_sat = c.n;
    } else if (c.alpha == 1.0) {
      phi_sat = (c.f >= c.q) ? c.N : c.n;
    } else if (c.q <= 0.0) {
      phi_sat = c.N;
    } else {
      phi_sat = std::min(c.N, std::max(c.n, std::pow(c.q / c.alpha_f, c.inv_exp)));
    }
    d.c_sat += phi_sat * c.a;
  }
  return d;
}

double ValidatedSpec::total_c_lo() const {
  double s = 0.0;
  for (const auto& a : agents) s += a.c_lo;
  return s;
}

double ValidatedSpec::total_c_hi() const {
  double s = 0.0;
  for (const auto& a : agents) s += a.c_hi;
  return s;
}

ValidatedSpec validate_spec(const MarketSpec& spec) {
  const int J = static_cast<int>(spec.agents.size());
  if (J < 1) throw SpecError("agents", "at least one agent required");

  for (int j = 0; j < J; ++j) {
    const AgentSpec& a = spec.agents[j];
    if (a.crops.empty())
      throw EmptyCrops(agent_field(j, "crops"), "agent has no crops");
    for (size_t k = 0; k < a.crops.size(); ++k) {
      const CropSpec& c = a.crops[k];
      const std::string base = agent_field(j, "crops." + std::to_string(k));
      check_finite(c.revenue_coeff, base + ".revenue_coeff");
      check_finite(c.max_units, base + ".max_units");
      if (!(c.elasticity > 0.0 && c.elasticity <= 1.0))
        throw InvalidElasticity(base + ".elasticity", "must lie in (0, 1]");
      if (!(c.water_per_unit > 0.0))
        throw SpecError(base + ".water_per_unit", "must be > 0");
      if (c.revenue_coeff < 0.0)
        throw SpecError(base + ".revenue_coeff", "must be >= 0");
      if (c.pumping_cost < 0.0)
        throw SpecError(base + ".pumping_cost", "must be >= 0");
      if (!(c.min_units >= 0.0 && c.min_units < c.max_units))
        throw BoundsInverted(base + ".min_units",
                             "need 0 <= min_units < max_units < inf");
    }
    const UtilitySpec& u = a.utility;
    if (u.kind == UtilityKind::Power && !(u.exponent > 0.0 && u.exponent <= 1.0))
      throw SpecError(agent_field(j, "utility.exponent"), "must lie in (0, 1]");
    if (!(u.penalty_slope > 0.0))
      throw SpecError(agent_field(j, "utility.penalty_slope"), "must be > 0");
    if (a.bank_cap < 0.0)
      throw SpecError(agent_field(j, "bank_cap"), "must be >= 0");
  }

  const int M = static_cast<int>(spec.chain.states.size());
  if (M < 1) throw SpecError("chain.states", "at least one regime required");
  for (int m = 0; m + 1 < M; ++m)
    if (!(spec.chain.states[m] < spec.chain.states[m + 1]))
      throw SpecError("chain.states", "must be strictly increasing");
  for (int m = 0; m < M; ++m)
    if (spec.chain.states[m] <= 0.0)
      throw SpecError("chain.states", "recharge states must be > 0");
  if (static_cast<int>(spec.chain.transition.size()) != M)
    throw DimensionMismatch("chain.transition", "must have one row per state");
  for (int m = 0; m < M; ++m) {
    const auto& row = spec.chain.transition[m];
    if (static_cast<int>(row.size()) != M)
      throw DimensionMismatch("chain.transition." + std::to_string(m),
                              "row length must equal state count");
    double sum = 0.0;
    for (double p : row) {
      if (p < 0.0)
        throw NonStochasticMatrix("chain.transition." + std::to_string(m),
                                  "entries must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw NonStochasticMatrix("chain.transition." + std::to_string(m),
                                "row must sum to 1");
  }

  const AllocationScheme& al = spec.allocation;
  switch (al.kind) {
    case AllocationKind::Proportional:
    case AllocationKind::Lognormal: {
      if (static_cast<int>(al.theta.size()) != J)
        throw DimensionMismatch("allocation.theta", "one fraction per agent");
      double sum = 0.0;
      for (double th : al.theta) {
        if (!(th > 0.0 && th < 1.0) && !(J == 1 && th == 1.0))
          throw SpecError("allocation.theta", "fractions must lie in (0, 1)");
        sum += th;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw SpecError("allocation.theta", "fractions must sum to 1");
      if (al.kind == AllocationKind::Lognormal) {
        if (!(al.cv > 0.0)) throw SpecError("allocation.cv", "must be > 0");
        if (al.nodes < 1) throw SpecError("allocation.nodes", "must be >= 1");
      }
      break;
    }
    case AllocationKind::SeniorJunior: {
      if (static_cast<int>(al.table.size()) != M)
        throw DimensionMismatch("allocation.table", "one row per regime");
      for (int m = 0; m < M; ++m) {
        const auto& row = al.table[m];
        if (static_cast<int>(row.size()) != J)
          throw DimensionMismatch("allocation.table." + std::to_string(m),
                                  "one entry per agent");
        double sum = 0.0;
        for (double v : row) {
          if (v < 0.0)
            throw SpecError("allocation.table." + std::to_string(m),
                            "allocations must be >= 0");
          sum += v;
        }
        if (std::abs(sum - spec.chain.states[m]) >
            1e-9 * std::max(1.0, spec.chain.states[m]))
          throw SpecError("allocation.table." + std::to_string(m),
                          "row must sum to the regime total");
      }
      break;
    }
  }

  if (spec.horizon < 1) throw SpecError("horizon", "must be >= 1");
  if (spec.discount < 0.0) throw SpecError("discount", "must be >= 0");
  if (!(spec.haircut >= 0.0 && spec.haircut <= 1.0))
    throw SpecError("haircut", "must lie in [0, 1]");
  if (static_cast<int>(spec.initial_allocation.size()) != J)
    throw DimensionMismatch("initial_allocation", "one entry per agent");
  for (double w : spec.initial_allocation)
    if (w < 0.0) throw SpecError("initial_allocation", "must be >= 0 componentwise");
  if (spec.grid_size < 4) throw SpecError("grid_size", "must be >= 4");
  if (spec.br_iterations < 1) throw SpecError("br_iterations", "must be >= 1");
  if (!(spec.price_tolerance > 0.0))
    throw SpecError("price_tolerance", "must be > 0");
  if (!(spec.br_tolerance > 0.0)) throw SpecError("br_tolerance", "must be > 0");
  if (spec.initial_regime >= M)
    throw SpecError("initial_regime", "regime index out of range");

  ValidatedSpec vs;
  vs.spec = spec;
  vs.agents.reserve(J);
  for (const auto& a : spec.agents) vs.agents.push_back(derive_agent(a));
  for (int j = 0; j < J; ++j)
    if (!(vs.agents[j].c_lo < vs.agents[j].c_hi))
      throw BoundsInverted(agent_field(j, "crops"),
                           "derived consumption bounds are empty");

  vs.stationary = stationary_distribution(spec.chain);
  vs.shocks = build_shock_tables(spec.allocation, spec.chain, J);

  vs.grid_lo.assign(J, 0.0);
  vs.grid_hi.assign(J, 0.0);
  for (int j = 0; j < J; ++j) {
    double max_alloc = 0.0;
    for (const auto& regime : vs.shocks)
      for (const auto& node : regime)
        max_alloc = std::max(max_alloc, node.alloc[j]);
    vs.grid_hi[j] = vs.agents[j].bank_cap + max_alloc;
    if (!(vs.grid_hi[j] > 0.0))
      throw SpecError(agent_field(j, "bank_cap"),
                      "agent has zero reachable allocation range");
  }

  vs.hash = spec_hash(spec);
  return vs;
}

}  // namespace aqua
