#include "geom/kmeans.hpp"

#include "geom/mesh.hpp"
#include "geom/rng.hpp"

#include <limits>

namespace geom {

namespace {

KMeansResult lloyd_run(const Eigen::MatrixXd& points, int k, Rng& rng, int max_iterations) {
    const int n = static_cast<int>(points.rows());
    const int dim = static_cast<int>(points.cols());

    // k-means++ seeding
    Eigen::MatrixXd centers(k, dim);
    centers.row(0) = points.row(static_cast<int>(rng.uniform_index(n)));
    Eigen::VectorXd d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        double total = d2.sum();
        int pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(rng.uniform_index(n));
        }
        centers.row(c) = points.row(pick);
        d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    KMeansResult res;
    res.assignment.assign(n, 0);
    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d = (points.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (res.assignment[i] != best) {
                res.assignment[i] = best;
                changed = true;
            }
        }
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            sums.row(res.assignment[i]) += points.row(i);
            ++counts[res.assignment[i]];
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
        if (!changed && iter > 0) break;
    }
    res.centers = centers;
    res.inertia = 0.0;
    for (int i = 0; i < n; ++i)
        res.inertia += (points.row(i) - centers.row(res.assignment[i])).squaredNorm();
    return res;
}

} // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts,
                    int max_iterations) {
    if (points.rows() < 1 || k < 1) throw invalid("kmeans: need points and k >= 1");
    if (k > points.rows()) throw invalid("kmeans: k exceeds point count");
    Rng rng(seed ^ 0x6b6d31u);
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        KMeansResult run = lloyd_run(points, k, rng, max_iterations);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return best;
}

} // namespace geom
