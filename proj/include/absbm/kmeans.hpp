#pragma once

#include <random>
#include <set>

#include "absbm/common.hpp"

namespace absbm {

struct KMeansResult {
    std::vector<double> centers;  // sorted ascending
    std::vector<int> assignment;  // per input value
    int iterations = 0;
    double sse = 0.0;  // within-cluster sum of squared distances
};

namespace detail {

// Picks the first index whose cumulative weight exceeds r; ties in the
// D^2 weights therefore resolve toward the smaller index.
inline std::size_t weighted_pick(const std::vector<double>& weights, double r) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) {
        for (std::size_t i = 0; i < weights.size(); ++i)
            if (weights[i] >= 0.0) return i;
        return 0;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r * total < acc) return i;
    }
    return weights.size() - 1;
}

// One k-means++ seeding followed by Lloyd iterations on 1-D data.
inline KMeansResult kmeanspp_1d_single(const std::vector<double>& values, int k,
                                       std::uint64_t seed, int rounds) {
    const std::size_t n = values.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<double> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(values[static_cast<std::size_t>(unif(rng) * static_cast<double>(n)) % n]);
    std::vector<double> d2(n);
    while (static_cast<int>(centers.size()) < k) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : centers) best = std::min(best, (values[i] - c) * (values[i] - c));
            d2[i] = best;
        }
        centers.push_back(values[detail::weighted_pick(d2, unif(rng))]);
    }

    std::vector<int> assignment(n, 0);
    auto assign_all = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double bd = std::abs(values[i] - centers[0]);
            for (int c = 1; c < k; ++c) {
                double d = std::abs(values[i] - centers[static_cast<std::size_t>(c)]);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            assignment[i] = best;
        }
    };

    int it = 0;
    for (; it < rounds; ++it) {
        assign_all();
        std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
        std::vector<std::size_t> cnt(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            sum[static_cast<std::size_t>(assignment[i])] += values[i];
            ++cnt[static_cast<std::size_t>(assignment[i])];
        }
        bool moved = false;
        for (int c = 0; c < k; ++c) {
            double nc;
            if (cnt[static_cast<std::size_t>(c)] == 0) {
                // empty cluster: reseed from the point farthest from its center
                std::size_t far = 0;
                double fd = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double d = std::abs(values[i] - centers[static_cast<std::size_t>(assignment[i])]);
                    if (d > fd) {
                        fd = d;
                        far = i;
                    }
                }
                nc = values[far];
            } else {
                nc = sum[static_cast<std::size_t>(c)] / static_cast<double>(cnt[static_cast<std::size_t>(c)]);
            }
            if (nc != centers[static_cast<std::size_t>(c)]) moved = true;
            centers[static_cast<std::size_t>(c)] = nc;
        }
        if (!moved) break;
    }

    // sort centers ascending and remap the assignment
    std::vector<int> order(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) order[static_cast<std::size_t>(c)] = c;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return centers[static_cast<std::size_t>(a)] < centers[static_cast<std::size_t>(b)]; });
    std::vector<int> rank(static_cast<std::size_t>(k));
    std::vector<double> sorted(static_cast<std::size_t>(k));
    for (int pos = 0; pos < k; ++pos) {
        rank[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;
        sorted[static_cast<std::size_t>(pos)] = centers[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])];
    }
    assign_all();
    for (auto& a : assignment) a = rank[static_cast<std::size_t>(a)];

    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = values[i] - sorted[static_cast<std::size_t>(assignment[i])];
        sse += d * d;
    }
    return KMeansResult{std::move(sorted), std::move(assignment), it, sse};
}

}  // namespace detail

// Multi-start k-means++ on 1-D data: n_init independent seedings, the run
// with the lowest within-cluster SSE wins (earlier run wins ties).
inline KMeansResult kmeanspp_1d(const std::vector<double>& values, int k, std::uint64_t seed,
                                int rounds = 100, int n_init = 10) {
    if (k < 1) throw validation_error("k must be >= 1");
    if (n_init < 1) throw validation_error("n_init must be >= 1");
    if (values.empty()) throw validation_error("empty input");
    std::set<double> distinct(values.begin(), values.end());
    if (static_cast<std::size_t>(k) > distinct.size())
        throw validation_error("k exceeds number of distinct values");

    KMeansResult best;
    for (int r = 0; r < n_init; ++r) {
        auto run = detail::kmeanspp_1d_single(values, k, hash_combine(seed, static_cast<std::uint64_t>(r)),
                                              rounds);
        if (r == 0 || run.sse < best.sse) best = std::move(run);
    }
    return best;
}

}  // namespace absbm
