#pragma once

#include <numeric>
#include <random>

#include "absbm/common.hpp"
#include "absbm/graph.hpp"

namespace absbm {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

// Label prior, scaled affinities and Gaussian attribute parameters.
// gamma_prime holds |V| * Gamma, so entries live in [0, |V|].
struct ModelParams {
    std::vector<double> gamma;  // length L, simplex
    Matrix gamma_prime;         // L x L, symmetric, nonnegative
    std::vector<double> mu;     // length L
    std::vector<double> sigma;  // length L, >= sigma_floor

    std::size_t n_labels() const { return gamma.size(); }

    void validate(int n_vertices, double sigma_floor) const {
        const std::size_t L = gamma.size();
        if (L == 0) throw validation_error("empty parameter set");
        double sum = 0.0;
        for (double g : gamma) {
            if (g < 0.0) throw validation_error("negative prior weight");
            sum += g;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw validation_error("prior does not sum to 1");
        if (gamma_prime.rows() != L || gamma_prime.cols() != L)
            throw validation_error("affinity matrix shape mismatch");
        if (!gamma_prime.is_symmetric(1e-12)) throw validation_error("affinity matrix not symmetric");
        for (double v : gamma_prime.data())
            if (v < 0.0 || v > static_cast<double>(n_vertices))
                throw validation_error("scaled affinity outside [0, |V|]");
        if (mu.size() != L || sigma.size() != L) throw validation_error("attribute parameter length mismatch");
        for (double s : sigma)
            if (s < sigma_floor) throw validation_error("sigma below floor");
    }
};

// Lower bound for sigma, relative to the spread of the attribute data.
inline double sigma_floor_for(const std::vector<double>& attributes) {
    if (attributes.empty()) return 1e-8;
    double mean = std::accumulate(attributes.begin(), attributes.end(), 0.0) /
                  static_cast<double>(attributes.size());
    double var = 0.0;
    for (double d : attributes) var += (d - mean) * (d - mean);
    var /= static_cast<double>(attributes.size());
    return std::max(1e-8, 1e-3 * std::sqrt(var));
}

inline double log_gaussian(double d, double mu, double sigma) {
    double z = (d - mu) / sigma;
    return -0.5 * (kLogTwoPi + z * z) - std::log(sigma);
}

// Entry l is log gamma_l + log N(d; mu_l, sigma_l).
inline std::vector<double> log_vertex_potential(double d, const ModelParams& params) {
    const std::size_t L = params.n_labels();
    std::vector<double> out(L);
    for (std::size_t l = 0; l < L; ++l) {
        double lg = params.gamma[l] > 0.0 ? std::log(params.gamma[l])
                                          : -std::numeric_limits<double>::infinity();
        out[l] = lg + log_gaussian(d, params.mu[l], params.sigma[l]);
    }
    return out;
}

inline std::vector<double> sample_attributes(const GroundTruth& labels, const ModelParams& params,
                                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(labels.labels.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        int l = labels.labels[i];
        if (l < 0 || static_cast<std::size_t>(l) >= params.n_labels())
            throw validation_error("label out of range for attribute sampling");
        std::normal_distribution<double> dist(params.mu[static_cast<std::size_t>(l)],
                                              params.sigma[static_cast<std::size_t>(l)]);
        out[i] = dist(rng);
    }
    return out;
}

}  // namespace absbm
