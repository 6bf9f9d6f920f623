#include "aquaclear/recharge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aqua {

namespace {

// Strong connectivity of the positive-transition graph.
bool strongly_connected(const std::vector<std::vector<double>>& q) {
  const int m = static_cast<int>(q.size());
  auto reach = [&](bool forward) {
    std::vector<char> seen(m, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < m; ++v) {
        const double w = forward ? q[u][v] : q[v][u];
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return std::count(seen.begin(), seen.end(), 1) == m;
  };
  return reach(true) && reach(false);
}

}  // namespace

std::vector<double> stationary_distribution(const RegimeChain& chain) {
  const int m = static_cast<int>(chain.states.size());
  const auto& q = chain.transition;
  if (m == 1) return {1.0};
  if (!strongly_connected(q))
    throw Reducible("chain.transition", "chain has no unique stationary distribution");

  // Damped power iteration: pi <- pi (I + Q)/2 has the same fixed point and
  // converges for periodic chains as well.
  std::vector<double> pi(m, 1.0 / m), next(m, 0.0);
  double resid = 1.0;
  for (int it = 0; it < 200000 && resid > 1e-14; ++it) {
    for (int j = 0; j < m; ++j) next[j] = 0.5 * pi[j];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) next[j] += 0.5 * pi[i] * q[i][j];
    double sum = std::accumulate(next.begin(), next.end(), 0.0);
    for (double& x : next) x /= sum;
    pi.swap(next);
    resid = 0.0;
    for (int j = 0; j < m; ++j) {
      double pij = 0.0;
      for (int i = 0; i < m; ++i) pij += pi[i] * q[i][j];
      resid = std::max(resid, std::abs(pij - pi[j]));
    }
  }
  if (resid > 1e-10)
    throw Reducible("chain.transition", "stationary distribution did not converge");
  return pi;
}

int sample_next(const RegimeChain& chain, int r_index, Rng& rng) {
  return rng.categorical(chain.transition[r_index]);
}

std::vector<double> allocate(const AllocationScheme& scheme,
                             const RegimeChain& chain, int r_index) {
  const double total = chain.states.at(r_index);
  switch (scheme.kind) {
    case AllocationKind::Proportional:
    case AllocationKind::Lognormal: {
      std::vector<double> out(scheme.theta.size());
      for (size_t j = 0; j < out.size(); ++j) out[j] = scheme.theta[j] * total;
      return out;
    }
    case AllocationKind::SeniorJunior:
      return scheme.table.at(r_index);
  }
  return {};
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double pim4 = 0.7511255444649425;  // pi^(-1/4)
  const int m = (n + 1) / 2;
  double z = 0.0, pp = 0.0;
  for (int i = 0; i < m; ++i) {
    // Root guesses, largest first (Stroud & Secrest asymptotics).
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * nodes[1];
    else
      z = 2.0 * z - nodes[i - 2];
    for (int it = 0; it < 100; ++it) {
      // Orthonormal Hermite recurrence up to degree n.
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-14) break;
    }
    nodes[i] = z;
    nodes[n - 1 - i] = -z;
    weights[i] = 2.0 / (pp * pp);
    weights[n - 1 - i] = weights[i];
  }
  std::reverse(nodes.begin(), nodes.end());  // ascending
  std::reverse(weights.begin(), weights.end());
}

QuantizedShock quantize_lognormal(double mean, double cv, int n) {
  QuantizedShock qs;
  if (n <= 1 || cv <= 0.0) {
    qs.values = {mean};
    qs.weights = {1.0};
    return qs;
  }
  const double sigma2 = std::log(1.0 + cv * cv);
  const double mu = std::log(mean) - 0.5 * sigma2;
  const double sigma = std::sqrt(sigma2);

  std::vector<double> x, w;
  gauss_hermite(n, x, w);
  qs.values.resize(n);
  qs.weights.resize(n);
  const double sqrt_pi = std::sqrt(std::acos(-1.0));
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) {
    qs.values[i] = std::exp(mu + std::sqrt(2.0) * sigma * x[i]);
    qs.weights[i] = w[i] / sqrt_pi;
    wsum += qs.weights[i];
  }
  double mean_q = 0.0;
  for (int i = 0; i < n; ++i) {
    qs.weights[i] /= wsum;
    mean_q += qs.weights[i] * qs.values[i];
  }
  const double scale = mean / mean_q;
  for (double& v : qs.values) v *= scale;
  return qs;
}

std::vector<std::vector<ShockNode>> build_shock_tables(
    const AllocationScheme& scheme, const RegimeChain& chain, int num_agents) {
  const int m = static_cast<int>(chain.states.size());
  std::vector<std::vector<ShockNode>> tables(m);
  for (int r = 0; r < m; ++r) {
    if (scheme.kind == AllocationKind::Lognormal) {
      const QuantizedShock qs =
          quantize_lognormal(chain.states[r], scheme.cv, scheme.nodes);
      tables[r].resize(qs.values.size());
      for (size_t l = 0; l < qs.values.size(); ++l) {
        ShockNode& node = tables[r][l];
        node.weight = qs.weights[l];
        node.pool = qs.values[l];
        node.alloc.resize(num_agents);
        for (int j = 0; j < num_agents; ++j)
          node.alloc[j] = scheme.theta[j] * qs.values[l];
      }
    } else {
      ShockNode node;
      node.weight = 1.0;
      node.pool = chain.states[r];
      node.alloc = allocate(scheme, chain, r);
      tables[r] = {std::move(node)};
    }
  }
  return tables;
}

}  // namespace aqua
