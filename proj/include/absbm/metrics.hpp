#pragma once

#include "absbm/common.hpp"
#include "absbm/graph.hpp"

namespace absbm {

// Minimum-cost assignment on a square cost matrix (potentials method,
// O(n^3)). Returns row -> column.
inline std::vector<int> solve_assignment(const Matrix& cost) {
    const int n = static_cast<int>(cost.rows());
    const double INF = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, INF);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            int i0 = p[static_cast<std::size_t>(j0)], j1 = 0;
            double delta = INF;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                double cur = cost(static_cast<std::size_t>(i0 - 1), static_cast<std::size_t>(j - 1)) -
                             u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (p[static_cast<std::size_t>(j)] > 0)
            row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return row_to_col;
}

struct EvalReport {
    double accuracy = 0.0;
    std::vector<int> best_permutation;  // predicted label -> matched true label
};

// Fraction of vertices whose predicted label matches the truth, maximized
// over relabelings of the predictions. The label alphabet is padded to
// max(L_max, observed labels + 1) and the matching solved as a linear
// assignment on the confusion matrix.
inline EvalReport accuracy(const GroundTruth& predicted, const GroundTruth& truth, int L_max) {
    if (predicted.labels.size() != truth.labels.size())
        throw validation_error("label vectors differ in length");
    const std::size_t n = predicted.labels.size();
    int L = std::max({L_max, predicted.n_labels(), truth.n_labels()});
    if (L < 1) L = 1;
    Matrix confusion(static_cast<std::size_t>(L), static_cast<std::size_t>(L), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (predicted.labels[i] < 0 || predicted.labels[i] >= L || truth.labels[i] < 0 ||
            truth.labels[i] >= L)
            throw validation_error("label outside alphabet");
        confusion(static_cast<std::size_t>(predicted.labels[i]),
                  static_cast<std::size_t>(truth.labels[i])) += 1.0;
    }
    // maximize matches == minimize (n - matches)
    Matrix cost(static_cast<std::size_t>(L), static_cast<std::size_t>(L));
    for (std::size_t r = 0; r < cost.rows(); ++r)
        for (std::size_t c = 0; c < cost.cols(); ++c) cost(r, c) = -confusion(r, c);
    auto perm = solve_assignment(cost);
    double correct = 0.0;
    for (std::size_t r = 0; r < cost.rows(); ++r)
        correct += confusion(r, static_cast<std::size_t>(perm[r]));
    EvalReport rep;
    rep.accuracy = n == 0 ? 0.0 : correct / static_cast<double>(n);
    rep.best_permutation = std::move(perm);
    return rep;
}

// Newman modularity via the per-community form: sum over communities of
// (intra-edge fraction) - (degree fraction)^2. Zero-edge networks score 0.
inline double modularity(const GroundTruth& labels, const AttributedNetwork& net) {
    if (static_cast<int>(labels.labels.size()) != net.n_vertices())
        throw validation_error("label count does not match network");
    const double m = static_cast<double>(net.n_edges());
    if (m == 0.0) return 0.0;
    int L = labels.n_labels();
    std::vector<double> intra(static_cast<std::size_t>(L), 0.0);
    std::vector<double> deg(static_cast<std::size_t>(L), 0.0);
    for (auto [i, j] : net.edges())
        if (labels.labels[static_cast<std::size_t>(i)] == labels.labels[static_cast<std::size_t>(j)])
            intra[static_cast<std::size_t>(labels.labels[static_cast<std::size_t>(i)])] += 1.0;
    for (int v = 0; v < net.n_vertices(); ++v)
        deg[static_cast<std::size_t>(labels.labels[static_cast<std::size_t>(v)])] +=
            static_cast<double>(net.degree(v));
    double q = 0.0;
    for (int c = 0; c < L; ++c) {
        double e = intra[static_cast<std::size_t>(c)] / m;
        double d = deg[static_cast<std::size_t>(c)] / (2.0 * m);
        q += e - d * d;
    }
    return q;
}

}  // namespace absbm
