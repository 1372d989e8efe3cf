#pragma once

#include <cstdint>
#include <vector>

#include "anmmm/gppom.hpp"

namespace anmmm {

struct ClusterResult {
    std::vector<int> labels;            // 1-based cluster indices
    Matrix centroids;                   // C x q
    std::vector<double> objective_trace;  // within-cluster sum of squares per iteration
    int iterations = 0;
};

struct KmeansOptions {
    int restarts = 10;
    int max_iters = 300;
    std::uint64_t seed = 0;
};

// Lloyd iterations, best of seeded restarts by final within-cluster sum of
// squares. Centroids are initialized from C distinct data points; an empty
// cluster is repaired by stealing the point farthest from its centroid.
ClusterResult kmeans(const Matrix& points, int clusters, const KmeansOptions& options);

struct ClusterMechanismOptions {
    FitOptions fit;
    KmeansOptions kmeans;
};

// Standardize, fit the latent mechanism parameters in the assumed causal
// direction, then k-means on the latent rows.
ClusterResult cluster_mechanisms(const Matrix& pairs, double lambda, int clusters,
                                 const ClusterMechanismOptions& options);

// Adjusted Rand index of two partitions, in [-1, 1]. When the chance
// correction degenerates (both partitions trivial) identical partitions
// score 1.0 and anything else throws.
double adjusted_rand_index(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

}  // namespace anmmm
