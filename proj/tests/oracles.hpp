// Independent reference implementations used only by the tests. These
// deliberately avoid the optimizations of the library code (accumulator
// trick, closed forms, assignment solver) so they can cross-check it.
#pragma once

#include <functional>
#include <random>

#include "absbm/absbm.hpp"

namespace oracle {

using absbm::AttributedNetwork;
using absbm::BpState;
using absbm::Matrix;
using absbm::ModelParams;

// ---------------------------------------------------------------------------
// Literal message update: the non-neighbor exponent is summed explicitly
// over every non-neighbor vertex, no accumulator.

inline std::vector<double> literal_nonneighbor_term(const BpState& state, int v,
                                                    const AttributedNetwork& net,
                                                    const ModelParams& params) {
    const std::size_t L = state.L;
    std::vector<double> t(L, 0.0);
    for (int k = 0; k < net.n_vertices(); ++k) {
        if (k == v || net.has_edge(v, k)) continue;
        for (std::size_t l = 0; l < L; ++l) {
            double acc = 0.0;
            for (std::size_t s = 0; s < L; ++s) acc += params.gamma_prime(l, s) * state.belief(k)[s];
            t[l] -= acc / static_cast<double>(net.n_vertices());
        }
    }
    return t;
}

inline std::vector<double> literal_update_message(const BpState& state, int j, int i,
                                                  const AttributedNetwork& net,
                                                  const ModelParams& params) {
    const std::size_t L = state.L;
    std::vector<double> logm = absbm::log_vertex_potential(net.attribute(j), params);
    auto nn = literal_nonneighbor_term(state, j, net, params);
    for (std::size_t l = 0; l < L; ++l) logm[l] += nn[l];
    for (int s = net.slot_begin(j); s < net.slot_end(j); ++s) {
        if (net.neighbor(s) == i) continue;
        for (std::size_t l = 0; l < L; ++l) {
            double acc = 0.0;
            for (std::size_t t = 0; t < L; ++t) acc += params.gamma_prime(l, t) * state.message(s)[t];
            logm[l] += std::log(std::max(acc, 1e-300));
        }
    }
    absbm::log_normalize(logm);
    return logm;
}

inline std::vector<double> literal_vertex_belief(const BpState& state, int i,
                                                 const AttributedNetwork& net,
                                                 const ModelParams& params) {
    const std::size_t L = state.L;
    std::vector<double> logb = absbm::log_vertex_potential(net.attribute(i), params);
    auto nn = literal_nonneighbor_term(state, i, net, params);
    for (std::size_t l = 0; l < L; ++l) logb[l] += nn[l];
    for (int s = net.slot_begin(i); s < net.slot_end(i); ++s) {
        for (std::size_t l = 0; l < L; ++l) {
            double acc = 0.0;
            for (std::size_t t = 0; t < L; ++t) acc += params.gamma_prime(l, t) * state.message(s)[t];
            logb[l] += std::log(std::max(acc, 1e-300));
        }
    }
    absbm::log_normalize(logb);
    return logb;
}

// ---------------------------------------------------------------------------
// Exact posterior marginals by enumeration over all L^n label vectors.
// The edge probability is gamma_prime / n, the full finite-size model.

inline std::vector<std::vector<double>> enumerate_marginals(const AttributedNetwork& net,
                                                            const ModelParams& params) {
    const int n = net.n_vertices();
    const std::size_t L = params.n_labels();
    std::vector<std::vector<double>> marg(static_cast<std::size_t>(n), std::vector<double>(L, 0.0));
    std::vector<int> x(static_cast<std::size_t>(n), 0);
    std::vector<double> logpot(static_cast<std::size_t>(n) * L);
    for (int i = 0; i < n; ++i) {
        auto p = absbm::log_vertex_potential(net.attribute(i), params);
        std::copy(p.begin(), p.end(), logpot.begin() + static_cast<std::size_t>(i) * L);
    }
    std::vector<double> logw;
    std::vector<std::vector<int>> configs;
    for (;;) {
        double lw = 0.0;
        for (int i = 0; i < n; ++i) lw += logpot[static_cast<std::size_t>(i) * L + static_cast<std::size_t>(x[static_cast<std::size_t>(i)])];
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double g = params.gamma_prime(static_cast<std::size_t>(x[static_cast<std::size_t>(i)]),
                                              static_cast<std::size_t>(x[static_cast<std::size_t>(j)])) /
                           static_cast<double>(n);
                lw += net.has_edge(i, j) ? std::log(std::max(g, 1e-300)) : std::log(std::max(1.0 - g, 1e-300));
            }
        logw.push_back(lw);
        configs.push_back(x);
        int pos = 0;
        while (pos < n && ++x[static_cast<std::size_t>(pos)] == static_cast<int>(L)) x[static_cast<std::size_t>(pos++)] = 0;
        if (pos == n) break;
    }
    double mx = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (std::size_t c = 0; c < logw.size(); ++c) {
        double w = std::exp(logw[c] - mx);
        z += w;
        for (int i = 0; i < n; ++i)
            marg[static_cast<std::size_t>(i)][static_cast<std::size_t>(configs[c][static_cast<std::size_t>(i)])] += w;
    }
    for (auto& m : marg)
        for (double& v : m) v /= z;
    return marg;
}

// ---------------------------------------------------------------------------
// Numerical maximizers of the EM surrogate (the approximate objective in
// which the non-edge sum takes its belief-product form).

// Maximizes sum_l B_l log gamma_l over the simplex by repeated pairwise
// mass transfers, each solved with a ternary search on the 1-D slice.
inline std::vector<double> maximize_gamma(const std::vector<double>& belief_totals) {
    const std::size_t L = belief_totals.size();
    std::vector<double> g(L, 1.0 / static_cast<double>(L));
    for (int round = 0; round < 400; ++round) {
        double moved = 0.0;
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t s = l + 1; s < L; ++s) {
                const double mass = g[l] + g[s];
                auto f = [&](double t) {
                    return belief_totals[l] * std::log(std::max(t, 1e-300)) +
                           belief_totals[s] * std::log(std::max(mass - t, 1e-300));
                };
                double lo = 0.0, hi = mass;
                for (int it = 0; it < 200; ++it) {
                    double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
                    if (f(a) < f(b))
                        lo = a;
                    else
                        hi = b;
                }
                double t = (lo + hi) / 2.0;
                moved = std::max(moved, std::abs(t - g[l]));
                g[l] = t;
                g[s] = mass - t;
            }
        if (moved < 1e-13) break;
    }
    return g;
}

// Maximizes a*log(g) - c*g over [0, upper] with 1-D Newton iterations.
inline double maximize_affinity_entry(double a, double c, double upper) {
    if (a <= 0.0) return 0.0;
    double g = 1.0;
    for (int it = 0; it < 200; ++it) {
        double grad = a / g - c;
        double hess = -a / (g * g);
        double next = g - grad / hess;
        next = std::min(std::max(next, 1e-12), upper);
        if (std::abs(next - g) < 1e-14 * std::max(1.0, g)) {
            g = next;
            break;
        }
        g = next;
    }
    return g;
}

// Nelder-Mead on (mu, log sigma) for one label's weighted Gaussian term.
inline std::pair<double, double> maximize_theta(const std::vector<double>& attrs,
                                                const std::vector<double>& weights) {
    auto negobj = [&](double mu, double logsig) {
        double sig = std::exp(logsig);
        double q = 0.0;
        for (std::size_t i = 0; i < attrs.size(); ++i) {
            double z = (attrs[i] - mu) / sig;
            q += weights[i] * (-std::log(sig) - 0.5 * z * z);
        }
        return -q;
    };
    struct Pt {
        double mu, ls, f;
    };
    double mu0 = 0.0, w0 = 0.0;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        mu0 += weights[i] * attrs[i];
        w0 += weights[i];
    }
    mu0 = w0 > 0 ? mu0 / w0 : 0.0;
    std::vector<Pt> sx = {{mu0 + 0.5, 0.3, 0.0}, {mu0 - 0.5, -0.3, 0.0}, {mu0, 0.8, 0.0}};
    for (auto& p : sx) p.f = negobj(p.mu, p.ls);
    for (int it = 0; it < 2000; ++it) {
        std::sort(sx.begin(), sx.end(), [](const Pt& a, const Pt& b) { return a.f < b.f; });
        if (std::abs(sx[2].f - sx[0].f) < 1e-14 &&
            std::abs(sx[2].mu - sx[0].mu) + std::abs(sx[2].ls - sx[0].ls) < 1e-10)
            break;
        double cmu = (sx[0].mu + sx[1].mu) / 2.0, cls = (sx[0].ls + sx[1].ls) / 2.0;
        Pt refl{cmu + (cmu - sx[2].mu), cls + (cls - sx[2].ls), 0.0};
        refl.f = negobj(refl.mu, refl.ls);
        if (refl.f < sx[0].f) {
            Pt exp2{cmu + 2.0 * (cmu - sx[2].mu), cls + 2.0 * (cls - sx[2].ls), 0.0};
            exp2.f = negobj(exp2.mu, exp2.ls);
            sx[2] = exp2.f < refl.f ? exp2 : refl;
        } else if (refl.f < sx[1].f) {
            sx[2] = refl;
        } else {
            Pt con{cmu + 0.5 * (sx[2].mu - cmu), cls + 0.5 * (sx[2].ls - cls), 0.0};
            con.f = negobj(con.mu, con.ls);
            if (con.f < sx[2].f) {
                sx[2] = con;
            } else {
                for (int k = 1; k < 3; ++k) {
                    sx[static_cast<std::size_t>(k)].mu = (sx[static_cast<std::size_t>(k)].mu + sx[0].mu) / 2.0;
                    sx[static_cast<std::size_t>(k)].ls = (sx[static_cast<std::size_t>(k)].ls + sx[0].ls) / 2.0;
                    sx[static_cast<std::size_t>(k)].f = negobj(sx[static_cast<std::size_t>(k)].mu, sx[static_cast<std::size_t>(k)].ls);
                }
            }
        }
    }
    std::sort(sx.begin(), sx.end(), [](const Pt& a, const Pt& b) { return a.f < b.f; });
    return {sx[0].mu, std::exp(sx[0].ls)};
}

// ---------------------------------------------------------------------------
// Brute-force permutation-matched accuracy, feasible for L <= 8.

inline double brute_force_accuracy(const absbm::GroundTruth& pred, const absbm::GroundTruth& truth,
                                   int L) {
    std::vector<int> perm(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) perm[static_cast<std::size_t>(l)] = l;
    double best = 0.0;
    do {
        int hits = 0;
        for (std::size_t i = 0; i < pred.labels.size(); ++i)
            if (perm[static_cast<std::size_t>(pred.labels[i])] == truth.labels[i]) ++hits;
        best = std::max(best, static_cast<double>(hits) / static_cast<double>(pred.labels.size()));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// ---------------------------------------------------------------------------
// Random instances.

struct RandomInstance {
    AttributedNetwork net;
    ModelParams params;
    BpState state;
};

inline ModelParams random_params(std::mt19937_64& rng, std::size_t L, int n) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ModelParams p;
    p.gamma.resize(L);
    for (auto& g : p.gamma) g = 0.2 + unif(rng);
    absbm::normalize(p.gamma);
    p.gamma_prime = Matrix(L, L);
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t s = l; s < L; ++s) {
            double v = unif(rng) * std::min(8.0, static_cast<double>(n));
            p.gamma_prime(l, s) = v;
            p.gamma_prime(s, l) = v;
        }
    p.mu.resize(L);
    p.sigma.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        p.mu[l] = 10.0 * static_cast<double>(l) + unif(rng);
        p.sigma[l] = 0.5 + 2.0 * unif(rng);
    }
    return p;
}

inline RandomInstance random_instance(std::mt19937_64& rng, int n, std::size_t L,
                                      double edge_prob = 0.25) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<absbm::VertexId, absbm::VertexId>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (unif(rng) < edge_prob) edges.emplace_back(i, j);
    std::vector<double> attrs(static_cast<std::size_t>(n));
    for (auto& a : attrs) a = 20.0 * unif(rng);
    AttributedNetwork net(n, std::move(edges), std::move(attrs));
    ModelParams params = random_params(rng, L, n);
    BpState state = absbm::init_state(net, params, rng());
    return RandomInstance{std::move(net), std::move(params), std::move(state)};
}

}  // namespace oracle
