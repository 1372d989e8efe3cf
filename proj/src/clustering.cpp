#include "anmmm/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "anmmm/errors.hpp"
#include "anmmm/inference.hpp"

namespace anmmm {

namespace {

double assign_labels(const Matrix& points, const Matrix& centroids, std::vector<int>& labels) {
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
            const double d = (points.row(i) - centroids.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        labels[static_cast<std::size_t>(i)] = best + 1;
        wcss += best_d;
    }
    return wcss;
}

ClusterResult lloyd_once(const Matrix& points, int clusters, std::mt19937_64& rng, int max_iters) {
    const Eigen::Index n = points.rows();
    const Eigen::Index q = points.cols();

    // Init from C distinct rows.
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    Matrix centroids(clusters, q);
    for (int c = 0; c < clusters; ++c) {
        centroids.row(c) = points.row(idx[static_cast<std::size_t>(c)]);
    }

    ClusterResult result;
    result.labels.assign(static_cast<std::size_t>(n), 0);
    std::vector<int> prev;

    for (int it = 1; it <= max_iters; ++it) {
        result.iterations = it;
        const double wcss = assign_labels(points, centroids, result.labels);
        result.objective_trace.push_back(wcss);
        if (result.labels == prev) {
            break;
        }
        prev = result.labels;

        // Centroid update.
        Matrix sums = Matrix::Zero(clusters, q);
        std::vector<int> counts(static_cast<std::size_t>(clusters), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = result.labels[static_cast<std::size_t>(i)] - 1;
            sums.row(c) += points.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < clusters; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
            }
        }

        // Empty-cluster repair: move the point farthest from its centroid.
        for (int c = 0; c < clusters; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                continue;
            }
            Eigen::Index farthest = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const int own = result.labels[static_cast<std::size_t>(i)] - 1;
                if (counts[static_cast<std::size_t>(own)] <= 1) {
                    continue;
                }
                const double d = (points.row(i) - centroids.row(own)).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    farthest = i;
                }
            }
            const int old = result.labels[static_cast<std::size_t>(farthest)] - 1;
            --counts[static_cast<std::size_t>(old)];
            ++counts[static_cast<std::size_t>(c)];
            result.labels[static_cast<std::size_t>(farthest)] = c + 1;
            centroids.row(c) = points.row(farthest);
            prev.clear();  // force another assignment pass
        }
    }

    result.centroids = centroids;
    // Final trace entry reflects the fixed-point assignment.
    const double final_wcss = assign_labels(points, centroids, result.labels);
    if (result.objective_trace.empty() || final_wcss < result.objective_trace.back()) {
        result.objective_trace.push_back(final_wcss);
    }
    return result;
}

}  // namespace

ClusterResult kmeans(const Matrix& points, int clusters, const KmeansOptions& options) {
    const Eigen::Index n = points.rows();
    if (clusters < 1 || clusters > n) {
        throw std::invalid_argument("kmeans: cluster count must be in [1, N]");
    }
    std::mt19937_64 rng(options.seed);
    ClusterResult best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
        ClusterResult run = lloyd_once(points, clusters, rng, options.max_iters);
        if (run.objective_trace.back() < best_obj) {
            best_obj = run.objective_trace.back();
            best = std::move(run);
        }
    }
    return best;
}

ClusterResult cluster_mechanisms(const Matrix& pairs, double lambda, int clusters,
                                 const ClusterMechanismOptions& options) {
    if (pairs.cols() != 2) {
        throw std::invalid_argument("cluster_mechanisms: expected an N x 2 matrix");
    }
    const Vector xs = standardize(pairs.col(0)).values;
    const Vector ys = standardize(pairs.col(1)).values;
    const FitResult fitted = fit(xs, ys, lambda, options.fit);
    return kmeans(fitted.state.theta, clusters, options.kmeans);
}

double adjusted_rand_index(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
    const std::size_t n = labels_a.size();
    if (n != labels_b.size() || n < 2) {
        throw std::invalid_argument("adjusted_rand_index: need equal-length labelings, N >= 2");
    }

    std::map<std::pair<int, int>, long long> contingency;
    std::map<int, long long> row_sums;
    std::map<int, long long> col_sums;
    for (std::size_t i = 0; i < n; ++i) {
        ++contingency[{labels_a[i], labels_b[i]}];
        ++row_sums[labels_a[i]];
        ++col_sums[labels_b[i]];
    }

    auto comb2 = [](long long v) { return 0.5 * static_cast<double>(v) * static_cast<double>(v - 1); };

    double sum_ij = 0.0;
    for (const auto& [key, count] : contingency) {
        sum_ij += comb2(count);
    }
    double sum_a = 0.0;
    for (const auto& [label, count] : row_sums) {
        sum_a += comb2(count);
    }
    double sum_b = 0.0;
    for (const auto& [label, count] : col_sums) {
        sum_b += comb2(count);
    }

    const double expected = sum_a * sum_b / comb2(static_cast<long long>(n));
    const double denom = 0.5 * (sum_a + sum_b) - expected;
    if (denom == 0.0) {
        // Both partitions trivial; identical means perfect agreement.
        if (labels_a == labels_b || sum_ij == sum_a) {
            return 1.0;
        }
        throw std::invalid_argument("adjusted_rand_index: chance correction undefined");
    }
    return (sum_ij - expected) / denom;
}

}  // namespace anmmm
