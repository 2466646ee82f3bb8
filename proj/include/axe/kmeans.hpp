#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "axe/numerics.hpp"

namespace axe {

namespace detail {

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct KmeansRun {
    Matrix centroids;
    double inertia = std::numeric_limits<double>::infinity();
};

inline KmeansRun kmeans_once(const Matrix &points, int k, int max_iters, SeededRng &rng) {
    const int n = points.rows;
    const int d = points.cols;
    Matrix centroids{k, d, std::vector<double>(static_cast<size_t>(k) * d)};

    // k-means++ seeding: next center drawn proportional to squared distance.
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
    {
        const int first = static_cast<int>(rng.uniform_u64(static_cast<std::uint64_t>(n)));
        std::copy_n(points.row(first).begin(), d, centroids.row(0).begin());
        for (int c = 1; c < k; ++c) {
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                dist2[i] = std::min(dist2[i], sq_dist(points.row(i), centroids.row(c - 1)));
                total += dist2[i];
            }
            int chosen = 0;
            if (total > 0.0) {
                const double u = rng.uniform_real() * total;
                double acc = 0.0;
                chosen = n - 1;
                for (int i = 0; i < n; ++i) {
                    acc += dist2[i];
                    if (acc >= u) {
                        chosen = i;
                        break;
                    }
                }
            } else {
                chosen = static_cast<int>(rng.uniform_u64(static_cast<std::uint64_t>(n)));
            }
            std::copy_n(points.row(chosen).begin(), d, centroids.row(c).begin());
        }
    }

    std::vector<int> assign(n, -1);
    std::vector<int> sizes(k);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(points.row(i), centroids.row(0));
            for (int c = 1; c < k; ++c) {
                const double dd = sq_dist(points.row(i), centroids.row(c));
                if (dd < best_d) {
                    best_d = dd;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }

        // An empty cluster steals the point farthest from its current centroid.
        std::fill(sizes.begin(), sizes.end(), 0);
        for (int a : assign) ++sizes[a];
        for (int c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            int far = -1;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                if (sizes[assign[i]] <= 1) continue;
                const double dd = sq_dist(points.row(i), centroids.row(assign[i]));
                if (dd > far_d) {
                    far_d = dd;
                    far = i;
                }
            }
            if (far < 0) break;
            --sizes[assign[far]];
            assign[far] = c;
            sizes[c] = 1;
            changed = true;
        }

        std::fill(centroids.data.begin(), centroids.data.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            auto crow = centroids.row(assign[i]);
            auto prow = points.row(i);
            for (int j = 0; j < d; ++j) crow[j] += prow[j];
        }
        for (int c = 0; c < k; ++c) {
            auto crow = centroids.row(c);
            for (int j = 0; j < d; ++j) crow[j] /= sizes[c];
        }
        if (!changed) break;
    }

    KmeansRun run;
    run.inertia = 0.0;
    for (int i = 0; i < n; ++i) run.inertia += sq_dist(points.row(i), centroids.row(assign[i]));
    run.centroids = std::move(centroids);
    return run;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding; the best of `restarts` runs by
// inertia wins. Deterministic for a fixed rng state.
inline Matrix kmeans(const Matrix &points, int k, SeededRng &rng, int restarts = 10,
                     int max_iters = 100) {
    if (k < 1) throw std::invalid_argument("kmeans: k must be positive");
    if (points.rows < k)
        throw std::invalid_argument("kmeans: need at least k points, have " +
                                    std::to_string(points.rows));
    if (restarts < 1 || max_iters < 1)
        throw std::invalid_argument("kmeans: restarts and max_iters must be positive");
    if (!all_finite(points)) throw std::invalid_argument("kmeans: points must be finite");

    detail::KmeansRun best;
    for (int r = 0; r < restarts; ++r) {
        auto run = detail::kmeans_once(points, k, max_iters, rng);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return best.centroids;
}

}  // namespace axe
