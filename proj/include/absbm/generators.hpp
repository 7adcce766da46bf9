#pragma once

#include <random>

#include "absbm/common.hpp"
#include "absbm/graph.hpp"

namespace absbm {

// Draws a network from the block model: pair ij becomes an edge with
// probability gamma_prime[x_i][x_j] / n. All n(n-1)/2 pairs are visited,
// which is exact and fast enough at desk scale.
inline AttributedNetwork sample_sbm(int n, const GroundTruth& labels, const Matrix& gamma_prime,
                                    std::uint64_t seed) {
    if (static_cast<int>(labels.labels.size()) != n)
        throw validation_error("label count does not match vertex count");
    if (!gamma_prime.is_symmetric(1e-12))
        throw validation_error("affinity matrix not symmetric");
    const auto L = gamma_prime.rows();
    for (double v : gamma_prime.data())
        if (v < 0.0 || v > static_cast<double>(n))
            throw validation_error("scaled affinity outside [0, n]");
    for (int l : labels.labels)
        if (l < 0 || static_cast<std::size_t>(l) >= L)
            throw validation_error("label out of range for affinity matrix");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double p = gamma_prime(static_cast<std::size_t>(labels.labels[i]),
                                   static_cast<std::size_t>(labels.labels[j])) /
                       static_cast<double>(n);
            if (unif(rng) < p) edges.emplace_back(i, j);
        }
    }
    return AttributedNetwork(n, std::move(edges));
}

struct FourGroupSample {
    AttributedNetwork network;
    GroundTruth truth;
    double p_in = 0.0;
    double p_out = 0.0;
};

// 128-vertex benchmark: four planted groups of 32, expected degree 16.
// z_out is the expected number of edges a vertex has outside its group;
// p_in and p_out satisfy 31 p_in + 96 p_out = 16.
inline FourGroupSample sample_four_group(double z_out, std::uint64_t seed) {
    if (!(z_out >= 0.0 && z_out <= 16.0))
        throw validation_error("z_out must lie in [0, 16]");
    constexpr int kN = 128;
    constexpr int kGroups = 4;
    constexpr int kGroupSize = kN / kGroups;

    const double p_out = z_out / 96.0;
    const double p_in = (16.0 - 96.0 * p_out) / 31.0;

    GroundTruth truth;
    truth.labels.resize(kN);
    for (int i = 0; i < kN; ++i) truth.labels[static_cast<std::size_t>(i)] = i / kGroupSize;

    Matrix gp(kGroups, kGroups, p_out * kN);
    for (std::size_t l = 0; l < kGroups; ++l) gp(l, l) = p_in * kN;

    auto net = sample_sbm(kN, truth, gp, seed);
    return FourGroupSample{std::move(net), std::move(truth), p_in, p_out};
}

}  // namespace absbm
