#pragma once

#include <random>

#include "absbm/common.hpp"
#include "absbm/graph.hpp"
#include "absbm/model.hpp"

namespace absbm {

enum class Schedule { Fixed, RandomPermutation };

// Messages live on directed slots: the value at slot s (in vertex i's
// adjacency range, pointing to neighbor j) is m_{j->i}. Beliefs are
// per-vertex marginals. external_field(l) accumulates
// sum_k sum_s Gamma'_{ls} b_k(s) over all vertices, so the non-neighbor
// exponent of any vertex is recovered by subtracting its own and its
// neighbors' contributions.
struct BpState {
    std::vector<double> messages;        // n_slots * L
    std::vector<double> beliefs;         // n_vertices * L
    std::vector<double> external_field;  // L
    std::size_t L = 0;

    double* message(int slot) { return messages.data() + static_cast<std::size_t>(slot) * L; }
    const double* message(int slot) const { return messages.data() + static_cast<std::size_t>(slot) * L; }
    double* belief(int v) { return beliefs.data() + static_cast<std::size_t>(v) * L; }
    const double* belief(int v) const { return beliefs.data() + static_cast<std::size_t>(v) * L; }
};

inline std::vector<double> compute_external_field(const std::vector<double>& beliefs,
                                                  const Matrix& gamma_prime) {
    const std::size_t L = gamma_prime.rows();
    std::vector<double> totals(L, 0.0);
    for (std::size_t i = 0; i + L <= beliefs.size(); i += L)
        for (std::size_t s = 0; s < L; ++s) totals[s] += beliefs[i + s];
    std::vector<double> h(L, 0.0);
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t s = 0; s < L; ++s) h[l] += gamma_prime(l, s) * totals[s];
    return h;
}

namespace detail {

// c(l) = sum_s Gamma'_{ls} p(s) for a probability vector p.
inline void coupling(const Matrix& gp, const double* p, double* out) {
    const std::size_t L = gp.rows();
    for (std::size_t l = 0; l < L; ++l) {
        double acc = 0.0;
        for (std::size_t s = 0; s < L; ++s) acc += gp(l, s) * p[s];
        out[l] = acc;
    }
}

inline double safe_log(double x) { return std::log(std::max(x, 1e-300)); }

}  // namespace detail

// Non-neighbor exponent of vertex v, recovered from the accumulator:
// -(h(l) - sum_{k in dv} c_k(l) - c_v(l)) / |V|. The subtraction is exact,
// so this equals the explicit sum over non-neighbors up to roundoff.
inline std::vector<double> nonneighbor_log_term(const BpState& state, VertexId v,
                                                const AttributedNetwork& net,
                                                const ModelParams& params) {
    const std::size_t L = state.L;
    std::vector<double> rest(state.external_field);
    std::vector<double> c(L);
    detail::coupling(params.gamma_prime, state.belief(v), c.data());
    for (std::size_t l = 0; l < L; ++l) rest[l] -= c[l];
    for (int s = net.slot_begin(v); s < net.slot_end(v); ++s) {
        detail::coupling(params.gamma_prime, state.belief(net.neighbor(s)), c.data());
        for (std::size_t l = 0; l < L; ++l) rest[l] -= c[l];
    }
    for (std::size_t l = 0; l < L; ++l) rest[l] = -rest[l] / static_cast<double>(net.n_vertices());
    return rest;
}

// One message m_{j->i}: vertex potential of j, the non-neighbor exponent,
// and the product of couplings from j's other neighbors, in log domain.
inline std::vector<double> update_message(const BpState& state, VertexId j, VertexId i,
                                          const AttributedNetwork& net, const ModelParams& params) {
    const std::size_t L = state.L;
    std::vector<double> logm = log_vertex_potential(net.attribute(j), params);
    std::vector<double> nn = nonneighbor_log_term(state, j, net, params);
    for (std::size_t l = 0; l < L; ++l) logm[l] += nn[l];
    std::vector<double> c(L);
    bool found = false;
    for (int s = net.slot_begin(j); s < net.slot_end(j); ++s) {
        if (net.neighbor(s) == i) {
            found = true;
            continue;
        }
        detail::coupling(params.gamma_prime, state.message(s), c.data());
        for (std::size_t l = 0; l < L; ++l) logm[l] += detail::safe_log(c[l]);
    }
    if (!found) throw validation_error("update_message requires an edge between j and i");
    log_normalize(logm);
    return logm;
}

inline std::vector<double> compute_vertex_belief(const BpState& state, VertexId i,
                                                 const AttributedNetwork& net,
                                                 const ModelParams& params) {
    const std::size_t L = state.L;
    std::vector<double> logb = log_vertex_potential(net.attribute(i), params);
    std::vector<double> nn = nonneighbor_log_term(state, i, net, params);
    for (std::size_t l = 0; l < L; ++l) logb[l] += nn[l];
    std::vector<double> c(L);
    for (int s = net.slot_begin(i); s < net.slot_end(i); ++s) {
        detail::coupling(params.gamma_prime, state.message(s), c.data());
        for (std::size_t l = 0; l < L; ++l) logb[l] += detail::safe_log(c[l]);
    }
    log_normalize(logb);
    return logb;
}

// Pairwise belief on edge {i,j}: b(l,s) propto Gamma'_{ls} m_{i->j}(l) m_{j->i}(s).
inline Matrix compute_edge_belief(const BpState& state, VertexId i, VertexId j,
                                  const AttributedNetwork& net, const ModelParams& params) {
    int slot_ij = net.find_slot(j, i);  // m_{i->j} sits in j's range
    int slot_ji = net.find_slot(i, j);  // m_{j->i} sits in i's range
    if (slot_ij < 0 || slot_ji < 0)
        throw validation_error("edge belief requested for a non-edge");
    const std::size_t L = state.L;
    const double* mi = state.message(slot_ij);
    const double* mj = state.message(slot_ji);
    Matrix b(L, L);
    double sum = 0.0;
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t s = 0; s < L; ++s) {
            b(l, s) = params.gamma_prime(l, s) * mi[l] * mj[s];
            sum += b(l, s);
        }
    if (sum <= 0.0) {
        double u = 1.0 / static_cast<double>(L * L);
        for (double& v : b.data()) v = u;
    } else {
        for (double& v : b.data()) v /= sum;
    }
    return b;
}

inline BpState init_state(const AttributedNetwork& net, const ModelParams& params,
                          std::uint64_t seed) {
    const std::size_t L = params.n_labels();
    BpState st;
    st.L = L;
    st.messages.resize(static_cast<std::size_t>(net.n_slots()) * L);
    st.beliefs.resize(static_cast<std::size_t>(net.n_vertices()) * L);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t off = 0; off < st.messages.size(); off += L) {
        double sum = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            st.messages[off + l] = unif(rng);
            sum += st.messages[off + l];
        }
        for (std::size_t l = 0; l < L; ++l) st.messages[off + l] /= sum;
    }
    for (std::size_t off = 0; off < st.beliefs.size(); off += L) {
        double sum = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            st.beliefs[off + l] = unif(rng);
            sum += st.beliefs[off + l];
        }
        for (std::size_t l = 0; l < L; ++l) st.beliefs[off + l] /= sum;
    }
    st.external_field = compute_external_field(st.beliefs, params.gamma_prime);
    return st;
}

// One asynchronous pass: all outgoing messages of each vertex in order,
// then every belief, then the accumulator. Messages of a vertex share the
// per-vertex coupling sums, so one vertex costs O(deg * L^2). Returns the
// max L-inf message change.
inline double sweep(BpState& state, const AttributedNetwork& net, const ModelParams& params,
                    const std::vector<VertexId>& vertex_order, double damping = 0.0) {
    const std::size_t L = state.L;
    double max_delta = 0.0;
    std::vector<double> base(L), c(L), logc(L), logm(L);
    for (VertexId j : vertex_order) {
        if (net.degree(j) == 0) continue;
        std::vector<double> pot = log_vertex_potential(net.attribute(j), params);
        std::vector<double> nn = nonneighbor_log_term(state, j, net, params);
        for (std::size_t l = 0; l < L; ++l) base[l] = pot[l] + nn[l];
        // total log-coupling over all incoming messages of j
        std::vector<double> total(L, 0.0);
        const int sb = net.slot_begin(j), se = net.slot_end(j);
        std::vector<double> logc_all(static_cast<std::size_t>(se - sb) * L);
        for (int s = sb; s < se; ++s) {
            detail::coupling(params.gamma_prime, state.message(s), c.data());
            for (std::size_t l = 0; l < L; ++l) {
                double lc = detail::safe_log(c[l]);
                logc_all[static_cast<std::size_t>(s - sb) * L + l] = lc;
                total[l] += lc;
            }
        }
        for (int s = sb; s < se; ++s) {
            // m_{j->i} excludes the coupling coming from i itself
            for (std::size_t l = 0; l < L; ++l)
                logm[l] = base[l] + total[l] - logc_all[static_cast<std::size_t>(s - sb) * L + l];
            log_normalize(logm);
            double* slot = state.message(net.reverse_slot(s));
            double norm = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                double mixed = (1.0 - damping) * logm[l] + damping * slot[l];
                max_delta = std::max(max_delta, std::abs(mixed - slot[l]));
                slot[l] = mixed;
                norm += mixed;
            }
            for (std::size_t l = 0; l < L; ++l) slot[l] /= norm;
        }
    }
    for (VertexId i = 0; i < net.n_vertices(); ++i) {
        auto b = compute_vertex_belief(state, i, net, params);
        std::copy(b.begin(), b.end(), state.belief(i));
    }
    state.external_field = compute_external_field(state.beliefs, params.gamma_prime);
    return max_delta;
}

inline std::vector<VertexId> make_schedule(int n_vertices, Schedule kind, std::mt19937_64& rng) {
    std::vector<VertexId> order(static_cast<std::size_t>(n_vertices));
    for (int v = 0; v < n_vertices; ++v) order[static_cast<std::size_t>(v)] = v;
    if (kind == Schedule::RandomPermutation) std::shuffle(order.begin(), order.end(), rng);
    return order;
}

// Argmax per vertex; ties go to the smallest label.
inline GroundTruth mpm_labels(const std::vector<double>& beliefs, std::size_t L) {
    GroundTruth gt;
    gt.labels.resize(beliefs.size() / L);
    for (std::size_t i = 0; i < gt.labels.size(); ++i) {
        const double* b = beliefs.data() + i * L;
        int best = 0;
        for (std::size_t l = 1; l < L; ++l)
            if (b[l] > b[static_cast<std::size_t>(best)]) best = static_cast<int>(l);
        gt.labels[i] = best;
    }
    return gt;
}

}  // namespace absbm
