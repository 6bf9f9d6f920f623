#pragma once

#include <vector>

#include "aquaclear/model.hpp"
#include "aquaclear/rng.hpp"

namespace aqua {

// Mean-matched quantization of a positive distribution: values with
// probability weights summing to one, sum(w_i v_i) equal to the target mean.
struct QuantizedShock {
  std::vector<double> values;
  std::vector<double> weights;
};

// Left eigenvector of the transition matrix for eigenvalue 1, via damped
// power iteration to 1e-12. Throws Reducible when the chain has no unique
// stationary distribution.
std::vector<double> stationary_distribution(const RegimeChain& chain);

// Draws the next regime index from row transition[r_index].
int sample_next(const RegimeChain& chain, int r_index, Rng& rng);

// Per-agent allocation vector at regime r_index (at the regime mean for the
// lognormal scheme). Components sum to the regime total for the discrete
// schemes.
std::vector<double> allocate(const AllocationScheme& scheme,
                             const RegimeChain& chain, int r_index);

// Gauss-Hermite quantization of a lognormal with the given mean and
// coefficient of variation; weights renormalized and values rescaled so the
// mean matches exactly.
QuantizedShock quantize_lognormal(double mean, double cv, int n);

// Physicists' Gauss-Hermite rule: sum w_i f(x_i) ~ integral e^{-x^2} f(x).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Quantized allocation nodes per regime, used by both the backward solver's
// expectations and the path simulator. Discrete schemes yield one node of
// weight one per regime.
std::vector<std::vector<ShockNode>> build_shock_tables(
    const AllocationScheme& scheme, const RegimeChain& chain, int num_agents);

}  // namespace aqua
