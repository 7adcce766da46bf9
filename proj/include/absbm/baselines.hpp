#pragma once

#include "absbm/em.hpp"

namespace absbm {

// Naive mean-field stand-in for the prior attribute-aware method: the
// posterior is factorized over vertices, so the fixed point reads
//   b_i(l) propto phi_i(l) * exp[ sum_{j in di} sum_s b_j(s) log Gamma'_{ls}
//                                 - (1/|V|) sum_{j != i} sum_s b_j(s) Gamma'_{ls} ].
// It runs under the same EM loop, with pairwise beliefs replaced by
// b_i b_j on edges and one shared sigma across labels (as in the method
// it reconstructs). See docs/naive_mean_field.md for the derivation.
inline DetectionResult detect_naive_mf(const AttributedNetwork& net, int L_max,
                                       const DetectConfig& cfg, std::uint64_t seed) {
    if (net.n_vertices() == 0) throw validation_error("empty network");
    if (L_max < 1 || L_max > net.n_vertices())
        throw validation_error("L_max must lie in [1, |V|]");

    const std::size_t L = static_cast<std::size_t>(L_max);
    const std::size_t n = static_cast<std::size_t>(net.n_vertices());
    const double sigma_floor = sigma_floor_for(net.attributes());

    auto run_single = [&](std::uint64_t run_seed) {
        ModelParams params;
        params.gamma.assign(L, 1.0 / static_cast<double>(L_max));
        params.gamma_prime = Matrix::constant(
            L, std::min(2.0 * static_cast<double>(net.n_edges()) / std::max(net.n_vertices() - 1, 1),
                        static_cast<double>(net.n_vertices())));
        auto km = kmeanspp_1d(net.attributes(), L_max, mix64(run_seed));
        params.mu = km.centers;
        params.sigma.assign(L, std::max(cfg.sigma0, sigma_floor));

        std::mt19937_64 rng(hash_combine(run_seed, 0x3a1fu));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> beliefs(n * L);
        for (std::size_t off = 0; off < beliefs.size(); off += L) {
            double sum = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                beliefs[off + l] = unif(rng);
                sum += beliefs[off + l];
            }
            for (std::size_t l = 0; l < L; ++l) beliefs[off + l] /= sum;
        }

        std::mt19937_64 sched_rng(hash_combine(run_seed, 0x5c4edu));
        DetectionResult res;
        std::vector<double> h = compute_external_field(beliefs, params.gamma_prime);
        int it = 0;
        for (; it < cfg.max_iterations; ++it) {
            auto order = make_schedule(net.n_vertices(), cfg.schedule, sched_rng);
            double belief_delta = 0.0;
            std::vector<double> logb(L), c(L);
            for (VertexId i : order) {
                double* bi = beliefs.data() + static_cast<std::size_t>(i) * L;
                auto pot = log_vertex_potential(net.attribute(i), params);
                detail::coupling(params.gamma_prime, bi, c.data());
                for (std::size_t l = 0; l < L; ++l)
                    logb[l] = pot[l] - (h[l] - c[l]) / static_cast<double>(n);
                for (int s = net.slot_begin(i); s < net.slot_end(i); ++s) {
                    const double* bj = beliefs.data() + static_cast<std::size_t>(net.neighbor(s)) * L;
                    for (std::size_t l = 0; l < L; ++l) {
                        double acc = 0.0;
                        for (std::size_t t = 0; t < L; ++t)
                            acc += bj[t] * std::log(std::max(params.gamma_prime(l, t), 1e-300));
                        logb[l] += acc;
                    }
                }
                log_normalize(logb);
                for (std::size_t l = 0; l < L; ++l) {
                    double mixed = (1.0 - cfg.damping) * logb[l] + cfg.damping * bi[l];
                    belief_delta = std::max(belief_delta, std::abs(mixed - bi[l]));
                    bi[l] = mixed;
                }
            }
            h = compute_external_field(beliefs, params.gamma_prime);

            // factorized pairwise beliefs on edges
            std::vector<Matrix> edge_beliefs;
            edge_beliefs.reserve(net.n_edges());
            for (auto [a, b] : net.edges()) {
                const double* ba = beliefs.data() + static_cast<std::size_t>(a) * L;
                const double* bb = beliefs.data() + static_cast<std::size_t>(b) * L;
                Matrix m(L, L);
                for (std::size_t l = 0; l < L; ++l)
                    for (std::size_t s = 0; s < L; ++s) m(l, s) = ba[l] * bb[s];
                edge_beliefs.push_back(std::move(m));
            }

            ModelParams next = params;
            next.gamma = em_update_gamma(beliefs, L, cfg.gamma_floor);
            next.gamma_prime = em_update_gamma_prime(edge_beliefs, next.gamma, net.n_vertices());
            em_update_theta(beliefs, net.attributes(), next.mu, next.sigma, sigma_floor,
                            cfg.responsibility_floor);
            // shared sigma across labels, weighted by total responsibility
            double pooled = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                double w = 0.0;
                for (std::size_t i = 0; i < n; ++i) w += beliefs[i * L + l];
                pooled += next.sigma[l] * next.sigma[l] * w;
            }
            pooled = std::max(std::sqrt(pooled / static_cast<double>(n)), sigma_floor);
            for (std::size_t l = 0; l < L; ++l) next.sigma[l] = pooled;

            double param_delta = detail::max_param_delta(params, next);
            params = std::move(next);
            res.trajectory.emplace_back(belief_delta, param_delta);
            if (belief_delta < cfg.tol && param_delta < cfg.tol) {
                res.converged = true;
                ++it;
                break;
            }
            if (it + 1 == cfg.max_iterations) break;
        }

        res.iterations = it;
        res.beliefs = beliefs;
        res.labels = mpm_labels(beliefs, L);
        res.params = params;
        std::vector<Matrix> eb;
        eb.reserve(net.n_edges());
        for (auto [a, b] : net.edges()) {
            const double* ba = beliefs.data() + static_cast<std::size_t>(a) * L;
            const double* bb = beliefs.data() + static_cast<std::size_t>(b) * L;
            Matrix m(L, L);
            for (std::size_t l = 0; l < L; ++l)
                for (std::size_t s = 0; s < L; ++s) m(l, s) = ba[l] * bb[s];
            eb.push_back(std::move(m));
        }
        res.log_likelihood = q_surrogate(net, beliefs, eb, params);
        return res;
    };

    DetectionResult best;
    bool have = false;
    for (int r = 0; r < std::max(cfg.n_restarts, 1); ++r) {
        auto res = run_single(hash_combine(seed, static_cast<std::uint64_t>(r)));
        if (!have || res.log_likelihood > best.log_likelihood) {
            best = std::move(res);
            have = true;
        }
    }
    return best;
}

// Attribute-only baseline: cluster the attribute values, ignore the graph.
inline GroundTruth detect_kmeans_only(const std::vector<double>& attributes, int L_max,
                                      std::uint64_t seed) {
    auto km = kmeanspp_1d(attributes, L_max, seed);
    return GroundTruth{std::move(km.assignment)};
}

}  // namespace absbm
