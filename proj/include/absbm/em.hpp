#pragma once

#include "absbm/bp.hpp"
#include "absbm/graph.hpp"
#include "absbm/kmeans.hpp"
#include "absbm/model.hpp"

namespace absbm {

struct DetectConfig {
    double tol = 1e-6;
    int max_iterations = 500;
    double damping = 0.0;
    Schedule schedule = Schedule::Fixed;
    int n_restarts = 1;
    double sigma0 = 1.0;           // initial sigma for every label
    double gamma_floor = 1e-8;
    double responsibility_floor = 1e-6;
};

struct DetectionResult {
    GroundTruth labels;
    std::vector<double> beliefs;  // n * L
    ModelParams params;
    int iterations = 0;
    bool converged = false;
    double log_likelihood = 0.0;  // surrogate objective at the fixed point
    std::vector<std::pair<double, double>> trajectory;  // (message delta, parameter delta)
};

// gamma_l = mean_i b_i(l), floored and renormalized.
inline std::vector<double> em_update_gamma(const std::vector<double>& beliefs, std::size_t L,
                                           double gamma_floor = 1e-8) {
    const std::size_t n = beliefs.size() / L;
    std::vector<double> g(L, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < L; ++l) g[l] += beliefs[i * L + l];
    for (double& v : g) v = std::max(v / static_cast<double>(n), gamma_floor);
    normalize(g);
    return g;
}

// Closed-form affinity update from the edge beliefs; entries clipped to
// [0, |V|] so Gamma = Gamma'/|V| stays a probability.
inline Matrix em_update_gamma_prime(const std::vector<Matrix>& edge_beliefs,
                                    const std::vector<double>& gamma_new, int n_vertices) {
    const std::size_t L = gamma_new.size();
    Matrix sum(L, L, 0.0);
    for (const Matrix& b : edge_beliefs)
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t s = 0; s < L; ++s) sum(l, s) += b(l, s);
    Matrix gp(L, L, 0.0);
    const double n = static_cast<double>(n_vertices);
    for (std::size_t l = 0; l < L; ++l) {
        gp(l, l) = 2.0 * sum(l, l) / (n * gamma_new[l] * gamma_new[l]);
        for (std::size_t s = l + 1; s < L; ++s) {
            gp(l, s) = (sum(l, s) + sum(s, l)) / (n * gamma_new[l] * gamma_new[s]);
            gp(s, l) = gp(l, s);
        }
    }
    for (double& v : gp.data()) v = std::min(std::max(v, 0.0), n);
    return gp;
}

// Responsibility-weighted mean and std per label. Labels whose total
// responsibility falls below the floor keep their previous parameters.
inline void em_update_theta(const std::vector<double>& beliefs, const std::vector<double>& attributes,
                            std::vector<double>& mu, std::vector<double>& sigma, double sigma_floor,
                            double responsibility_floor = 1e-6) {
    const std::size_t L = mu.size();
    const std::size_t n = attributes.size();
    for (std::size_t l = 0; l < L; ++l) {
        double w = 0.0, wd = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w += beliefs[i * L + l];
            wd += beliefs[i * L + l] * attributes[i];
        }
        if (w < responsibility_floor) continue;
        double m = wd / w;
        double wv = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            wv += beliefs[i * L + l] * (attributes[i] - m) * (attributes[i] - m);
        mu[l] = m;
        sigma[l] = std::max(std::sqrt(wv / w), sigma_floor);
    }
}

// Surrogate objective used for restart selection: vertex terms plus the
// edge log-affinity terms minus the non-edge penalty in its product form.
inline double q_surrogate(const AttributedNetwork& net, const std::vector<double>& beliefs,
                          const std::vector<Matrix>& edge_beliefs, const ModelParams& params) {
    const std::size_t L = params.n_labels();
    const std::size_t n = static_cast<std::size_t>(net.n_vertices());
    double q = 0.0;
    std::vector<double> totals(L, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto pot = log_vertex_potential(net.attribute(static_cast<int>(i)), params);
        for (std::size_t l = 0; l < L; ++l) {
            q += beliefs[i * L + l] * pot[l];
            totals[l] += beliefs[i * L + l];
        }
    }
    for (const Matrix& b : edge_beliefs)
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t s = 0; s < L; ++s)
                q += b(l, s) * std::log(std::max(params.gamma_prime(l, s), 1e-300));
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t s = 0; s < L; ++s)
            q -= totals[l] * totals[s] * params.gamma_prime(l, s) / (2.0 * static_cast<double>(n));
    return q;
}

namespace detail {

inline double max_param_delta(const ModelParams& a, const ModelParams& b) {
    double d = 0.0;
    for (std::size_t l = 0; l < a.gamma.size(); ++l) d = std::max(d, std::abs(a.gamma[l] - b.gamma[l]));
    for (std::size_t i = 0; i < a.gamma_prime.data().size(); ++i)
        d = std::max(d, std::abs(a.gamma_prime.data()[i] - b.gamma_prime.data()[i]));
    for (std::size_t l = 0; l < a.mu.size(); ++l) {
        d = std::max(d, std::abs(a.mu[l] - b.mu[l]));
        d = std::max(d, std::abs(a.sigma[l] - b.sigma[l]));
    }
    return d;
}

inline DetectionResult detect_single(const AttributedNetwork& net, int L_max,
                                     const DetectConfig& cfg, std::uint64_t seed) {
    const std::size_t L = static_cast<std::size_t>(L_max);
    const double sigma_floor = sigma_floor_for(net.attributes());

    ModelParams params;
    params.gamma.assign(L, 1.0 / static_cast<double>(L_max));
    params.gamma_prime = Matrix::constant(
        L, std::min(2.0 * static_cast<double>(net.n_edges()) / std::max(net.n_vertices() - 1, 1),
                    static_cast<double>(net.n_vertices())));
    auto km = kmeanspp_1d(net.attributes(), L_max, mix64(seed));
    params.mu = km.centers;
    params.sigma.assign(L, std::max(cfg.sigma0, sigma_floor));

    std::mt19937_64 sched_rng(hash_combine(seed, 0x5c4edu));
    BpState state = init_state(net, params, hash_combine(seed, 0x1217u));

    DetectionResult res;
    res.converged = false;
    std::vector<Matrix> edge_beliefs;
    int it = 0;
    for (; it < cfg.max_iterations; ++it) {
        auto order = make_schedule(net.n_vertices(), cfg.schedule, sched_rng);
        double msg_delta = sweep(state, net, params, order, cfg.damping);

        edge_beliefs.clear();
        edge_beliefs.reserve(net.n_edges());
        for (auto [i, j] : net.edges())
            edge_beliefs.push_back(compute_edge_belief(state, i, j, net, params));

        ModelParams next = params;
        next.gamma = em_update_gamma(state.beliefs, L, cfg.gamma_floor);
        next.gamma_prime = em_update_gamma_prime(edge_beliefs, next.gamma, net.n_vertices());
        em_update_theta(state.beliefs, net.attributes(), next.mu, next.sigma, sigma_floor,
                        cfg.responsibility_floor);
        double param_delta = max_param_delta(params, next);
        params = std::move(next);

        res.trajectory.emplace_back(msg_delta, param_delta);
        if (msg_delta < cfg.tol && param_delta < cfg.tol) {
            res.converged = true;
            ++it;
            break;
        }
    }

    res.iterations = it;
    res.beliefs = state.beliefs;
    res.labels = mpm_labels(state.beliefs, L);
    res.params = params;
    res.log_likelihood = q_surrogate(net, state.beliefs, edge_beliefs, params);
    return res;
}

}  // namespace detail

// Algorithm: one BP sweep per EM iteration, beliefs from the sweep feed
// the closed-form parameter updates, until both message and parameter
// changes fall under tol. The beliefs of the last sweep give the labels.
inline DetectionResult detect(const AttributedNetwork& net, int L_max, const DetectConfig& cfg,
                              std::uint64_t seed) {
    if (net.n_vertices() == 0) throw validation_error("empty network");
    if (L_max < 1 || L_max > net.n_vertices())
        throw validation_error("L_max must lie in [1, |V|]");

    DetectionResult best;
    bool have = false;
    for (int r = 0; r < std::max(cfg.n_restarts, 1); ++r) {
        auto res = detail::detect_single(net, L_max, cfg, hash_combine(seed, static_cast<std::uint64_t>(r)));
        if (!have || res.log_likelihood > best.log_likelihood) {
            best = std::move(res);
            have = true;
        }
    }
    return best;
}

}  // namespace absbm
