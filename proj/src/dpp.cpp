#include "aquaclear/dpp.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>

#include "aquaclear/scalar_opt.hpp"

namespace aqua {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  g.back() = hi;
  return g;
}

namespace {

// Clamp an infeasible grid state into the market's feasible supply range.
// Deficits are filled proportionally to the minimum consumptions (so corner
// cells carry no forced trades); excesses are scaled off proportionally.
bool clamp_supply(const ValidatedSpec& vs, std::array<double, 2>& w) {
  const double lo = vs.total_c_lo(), hi = vs.total_c_hi();
  const double s = w[0] + w[1];
  if (s < lo) {
    const double deficit = lo - s;
    const double base = std::max(lo, 1e-300);
    w[0] += deficit * vs.agents[0].c_lo / base;
    w[1] += deficit * vs.agents[1].c_lo / base;
    if (lo > 0.0 && vs.agents[0].c_lo + vs.agents[1].c_lo == 0.0)
      w[0] += deficit;  // all minimums zero: park the deficit on agent 0
    return true;
  }
  if (s > hi) {
    const double scale = hi / s;
    w[0] *= scale;
    w[1] *= scale;
    return true;
  }
  return false;
}

double continuation_one(std::span<const LayerSurfaces> next_layer,
                        const ValidatedSpec& vs, int j,
                        const std::array<double, 2>& bank, int r_index) {
  const auto& row = vs.spec.chain.transition[r_index];
  const double keep = 1.0 - vs.spec.haircut;
  double sum = 0.0;
  for (int m = 0; m < vs.num_regimes(); ++m) {
    const double qm = row[m];
    if (qm == 0.0) continue;
    double inner = 0.0;
    for (const ShockNode& node : vs.shocks[m])
      inner += node.weight * next_layer[m].value[j].eval(
                                 node.alloc[0] + keep * bank[0],
                                 node.alloc[1] + keep * bank[1]);
    sum += qm * inner;
  }
  return std::exp(-vs.spec.discount) * sum;
}

}  // namespace

std::array<double, 2> continuation_value(std::span<const LayerSurfaces> next_layer,
                                         const ValidatedSpec& vs,
                                         std::array<double, 2> bank, int r_index) {
  return {continuation_one(next_layer, vs, 0, bank, r_index),
          continuation_one(next_layer, vs, 1, bank, r_index)};
}

namespace {

struct BrState {
  EquilibriumPoint scratch;
  double price_hint = 0.0;
};

double best_response_impl(const ValidatedSpec& vs, const Market& market, int j,
                          double b_other, const std::array<double, 2>& w,
                          int r_index, std::span<const LayerSurfaces> next_layer,
                          BrState& st) {
  const AgentDerived& ag = vs.agents[j];
  const double bankable = (w[0] + w[1]) - vs.total_c_lo() - b_other;
  const double cap = std::min(ag.bank_cap, bankable);
  if (!ag.can_bank || cap <= 0.0 || next_layer.empty()) return 0.0;

  auto objective = [&](double bj) {
    std::array<double, 2> bank{};
    bank[j] = bj;
    bank[1 - j] = b_other;
    const std::array<double, 2> wt{w[0] - bank[0], w[1] - bank[1]};
    market.clear_into(wt, st.scratch, st.price_hint);
    st.price_hint = st.scratch.price;
    return st.scratch.utilities[j] +
           continuation_one(next_layer, vs, j, bank, r_index);
  };

  BrentResult r = brent_maximize(objective, 0.0, cap, 1e-6);
  const double tie = 1e-12 * (1.0 + std::abs(r.f));
  const double f0 = objective(0.0);
  if (f0 >= r.f - tie) return 0.0;  // ties break toward less banking
  const double fcap = objective(cap);
  if (fcap > r.f + tie) return cap;
  return r.x;
}

}  // namespace

double best_response_b(const ValidatedSpec& vs, const Market& market, int j,
                       double b_other, std::span<const double> w, int r_index,
                       std::span<const LayerSurfaces> next_layer) {
  BrState st;
  std::array<double, 2> wa{w[0], w[1]};
  return best_response_impl(vs, market, j, b_other, wa, r_index, next_layer, st);
}

BankingOutcome banking_equilibrium(const ValidatedSpec& vs, const Market& market,
                                   std::span<const double> w, int r_index,
                                   std::span<const LayerSurfaces> next_layer) {
  BankingOutcome out;
  std::array<double, 2> wc{w[0], w[1]};
  out.clamped = clamp_supply(vs, wc);

  BrState st;
  if (!next_layer.empty()) {
    int bankers = 0;
    for (int j = 0; j < 2; ++j)
      if (vs.agents[j].can_bank && vs.agents[j].bank_cap > 0.0) ++bankers;

    out.converged = false;
    for (int sweep = 0; sweep < vs.spec.br_iterations; ++sweep) {
      double delta = 0.0;
      for (int j = 0; j < 2; ++j) {
        const double bj = best_response_impl(vs, market, j, out.bank[1 - j], wc,
                                             r_index, next_layer, st);
        delta = std::max(delta, std::abs(bj - out.bank[j]));
        out.bank[j] = bj;
      }
      out.sweeps = sweep + 1;
      if (delta <= vs.spec.br_tolerance || bankers <= 1) {
        out.converged = true;
        break;
      }
    }
    out.continuation = continuation_value(next_layer, vs, out.bank, r_index);
  }

  const std::array<double, 2> wt{wc[0] - out.bank[0], wc[1] - out.bank[1]};
  market.clear_into(wt, out.point, st.price_hint);
  out.total = {out.point.utilities[0] + out.continuation[0],
               out.point.utilities[1] + out.continuation[1]};
  return out;
}

namespace {

void solve_cell(const ValidatedSpec& vs, const Market& market,
                std::span<const double> gx, std::span<const double> gy, int r,
                int i, int j, std::span<const LayerSurfaces> next_layer,
                LayerCells& cells) {
  const std::array<double, 2> w{gx[i], gy[j]};
  const BankingOutcome bo = banking_equilibrium(vs, market, w, r, next_layer);
  const size_t c = static_cast<size_t>(i) * gy.size() + j;
  cells.value[0][c] = bo.total[0];
  cells.value[1][c] = bo.total[1];
  cells.bank[0][c] = bo.bank[0];
  cells.bank[1][c] = bo.bank[1];
  cells.price[c] = bo.point.price;
  cells.clamped[c] = bo.clamped ? 1 : 0;
  cells.nonconverged[c] = bo.converged ? 0 : 1;
}

std::vector<LayerCells> make_cells(const ValidatedSpec& vs, size_t n_cells) {
  std::vector<LayerCells> cells(vs.num_regimes());
  for (auto& c : cells) {
    for (int j = 0; j < 2; ++j) {
      c.value[j].assign(n_cells, 0.0);
      c.bank[j].assign(n_cells, 0.0);
    }
    c.price.assign(n_cells, 0.0);
    c.clamped.assign(n_cells, 0);
    c.nonconverged.assign(n_cells, 0);
  }
  return cells;
}

}  // namespace

LayerStats LayerCells::stats() const {
  LayerStats s;
  s.cells = static_cast<int>(price.size());
  for (unsigned char f : clamped) s.clamped += f;
  for (unsigned char f : nonconverged) s.nonconverged += f;
  return s;
}

std::vector<LayerCells> solve_layer_serial(const ValidatedSpec& vs,
                                           const Market& market,
                                           std::span<const double> gx,
                                           std::span<const double> gy,
                                           std::span<const LayerSurfaces> next_layer) {
  const int nx = static_cast<int>(gx.size()), ny = static_cast<int>(gy.size());
  auto cells = make_cells(vs, static_cast<size_t>(nx) * ny);
  for (int r = 0; r < vs.num_regimes(); ++r)
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        solve_cell(vs, market, gx, gy, r, i, j, next_layer, cells[r]);
  return cells;
}

std::vector<LayerCells> solve_layer_parallel(const ValidatedSpec& vs,
                                             const Market& market,
                                             std::span<const double> gx,
                                             std::span<const double> gy,
                                             std::span<const LayerSurfaces> next_layer,
                                             int threads) {
  const int nx = static_cast<int>(gx.size()), ny = static_cast<int>(gy.size());
  const int M = vs.num_regimes();
  auto cells = make_cells(vs, static_cast<size_t>(nx) * ny);
  const long total = static_cast<long>(M) * nx * ny;
  std::atomic<bool> failed{false};

  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
  for (long idx = 0; idx < total; ++idx) {
    if (failed.load(std::memory_order_relaxed)) continue;
    const int r = static_cast<int>(idx / (static_cast<long>(nx) * ny));
    const int rem = static_cast<int>(idx % (static_cast<long>(nx) * ny));
    try {
      solve_cell(vs, market, gx, gy, r, rem / ny, rem % ny, next_layer, cells[r]);
    } catch (...) {
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (failed.load())
    throw SpecError("solver", "cell evaluation failed inside a parallel layer");
  return cells;
}

namespace {

LayerSurfaces fit_layer(const std::vector<double>& gx, const std::vector<double>& gy,
                        const LayerCells& cells) {
  LayerSurfaces ls;
  for (int j = 0; j < 2; ++j) {
    ls.value[j] = ValueSurface::fit(gx, gy, cells.value[j]);
    ls.bank[j] = ValueSurface::fit(gx, gy, cells.bank[j]);
  }
  ls.price = ValueSurface::fit(gx, gy, cells.price);
  return ls;
}

}  // namespace

std::vector<LayerSurfaces> terminal_layer(const ValidatedSpec& vs,
                                          const Market& market) {
  const int n = vs.spec.grid_size;
  const auto gx = linspace(vs.grid_lo[0], vs.grid_hi[0], n);
  const auto gy = linspace(vs.grid_lo[1], vs.grid_hi[1], n);

  // One regime's worth of one-period equilibria; the terminal layer carries no
  // continuation and is identical across regimes.
  LayerCells cells;
  const size_t n_cells = static_cast<size_t>(n) * n;
  for (int j = 0; j < 2; ++j) {
    cells.value[j].assign(n_cells, 0.0);
    cells.bank[j].assign(n_cells, 0.0);
  }
  cells.price.assign(n_cells, 0.0);
  cells.clamped.assign(n_cells, 0);
  cells.nonconverged.assign(n_cells, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      solve_cell(vs, market, gx, gy, 0, i, j, {}, cells);

  const LayerSurfaces one = fit_layer(gx, gy, cells);
  return std::vector<LayerSurfaces>(vs.num_regimes(), one);
}

PolicyStack solve_backward(const ValidatedSpec& vs, int threads) {
  if (vs.num_agents() != 2)
    throw SpecError("agents", "the market solver supports exactly two agents");

  const int T = vs.spec.horizon;
  const int n = vs.spec.grid_size;
  const auto gx = linspace(vs.grid_lo[0], vs.grid_hi[0], n);
  const auto gy = linspace(vs.grid_lo[1], vs.grid_hi[1], n);
  const Market market(vs);

  PolicyStack stack;
  stack.no_trade = false;
  stack.spec_hash = vs.hash;
  stack.horizon = T;
  stack.layers.resize(T);
  stack.stats.resize(T);

  stack.layers[T - 1] = terminal_layer(vs, market);
  stack.stats[T - 1].cells = n * n;

  for (int t = T - 2; t >= 0; --t) {
    const auto cells =
        (threads == 1)
            ? solve_layer_serial(vs, market, gx, gy, stack.layers[t + 1])
            : solve_layer_parallel(vs, market, gx, gy, stack.layers[t + 1], threads);
    stack.layers[t].reserve(cells.size());
    LayerStats agg;
    for (const auto& c : cells) {
      stack.layers[t].push_back(fit_layer(gx, gy, c));
      const LayerStats s = c.stats();
      agg.cells += s.cells;
      agg.clamped += s.clamped;
      agg.nonconverged += s.nonconverged;
    }
    stack.stats[t] = agg;
  }
  return stack;
}

}  // namespace aqua
