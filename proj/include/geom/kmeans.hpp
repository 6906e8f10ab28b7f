#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace geom {

struct KMeansResult {
    Eigen::MatrixXd centers; // k x dim
    std::vector<int> assignment;
    double inertia = 0.0;
};

/// Lloyd's algorithm with seeded k-means++ starts; `restarts` independent runs,
/// best inertia wins. Deterministic for a fixed seed.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed = 0,
                    int restarts = 100, int max_iterations = 100);

} // namespace geom
