#include "geom/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geom {

namespace {

struct Candidate {
    double d2;
    int idx;
    bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && idx < o.idx); }
};

} // namespace

KnnIndex::KnnIndex(const std::vector<Vec3>& points) : points_(points) {
    if (points_.empty()) throw invalid("knn index: empty point set");
    Vec3 lo = points_.front(), hi = points_.front();
    for (const Vec3& p : points_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    origin_ = lo;
    Vec3 extent = hi - lo;
    double diag = extent.norm();
    // target ~2 points per cell on average
    double volume = std::max(extent.x(), 1e-12) * std::max(extent.y(), 1e-12) *
                    std::max(extent.z(), 1e-12);
    cell_ = std::max(std::cbrt(2.0 * volume / static_cast<double>(points_.size())), diag * 1e-9);
    if (!(cell_ > 0.0)) cell_ = 1.0;
    auto dims = [&]() {
        nx_ = std::max(1, static_cast<int>(extent.x() / cell_) + 1);
        ny_ = std::max(1, static_cast<int>(extent.y() / cell_) + 1);
        nz_ = std::max(1, static_cast<int>(extent.z() / cell_) + 1);
        return static_cast<size_t>(nx_) * ny_ * nz_;
    };
    // degenerate extents (planes, lines) can blow the grid up; rescale the
    // cell until the table stays proportional to the point count
    size_t total = dims();
    const size_t limit = std::max<size_t>(64, points_.size() * 4);
    while (total > limit) {
        cell_ *= std::max(1.26, std::cbrt(static_cast<double>(total) / limit));
        total = dims();
    }
    cells_.resize(total);
    for (int i = 0; i < static_cast<int>(points_.size()); ++i)
        cells_[cell_of(points_[i])].push_back(i);
}

int KnnIndex::cell_of(const Vec3& p) const {
    int cx = std::clamp(static_cast<int>((p.x() - origin_.x()) / cell_), 0, nx_ - 1);
    int cy = std::clamp(static_cast<int>((p.y() - origin_.y()) / cell_), 0, ny_ - 1);
    int cz = std::clamp(static_cast<int>((p.z() - origin_.z()) / cell_), 0, nz_ - 1);
    return (cz * ny_ + cy) * nx_ + cx;
}

std::vector<int> KnnIndex::query_point(const Vec3& p, int k, int exclude) const {
    const int n = static_cast<int>(points_.size());
    int available = n - (exclude >= 0 ? 1 : 0);
    if (k > available) throw invalid("knn query: k exceeds available points");

    int cx = std::clamp(static_cast<int>((p.x() - origin_.x()) / cell_), 0, nx_ - 1);
    int cy = std::clamp(static_cast<int>((p.y() - origin_.y()) / cell_), 0, ny_ - 1);
    int cz = std::clamp(static_cast<int>((p.z() - origin_.z()) / cell_), 0, nz_ - 1);

    std::vector<Candidate> best;
    best.reserve(static_cast<size_t>(k) * 2);
    double kth = std::numeric_limits<double>::infinity();
    int max_r = std::max({nx_, ny_, nz_});

    for (int r = 0; r <= max_r + 1; ++r) {
        // shells 0..r-1 are done; an unseen point in shell >= r is at least
        // (r-1)*cell away, so stop once the k-th distance fits inside that
        if (best.size() >= static_cast<size_t>(k) && r >= 1) {
            double safe = static_cast<double>(r - 1) * cell_;
            if (kth <= safe * safe) break;
        }
        if (r > max_r) break;
        bool any_cell = false;
        for (int dz = -r; dz <= r; ++dz) {
            int z = cz + dz;
            if (z < 0 || z >= nz_) continue;
            for (int dy = -r; dy <= r; ++dy) {
                int y = cy + dy;
                if (y < 0 || y >= ny_) continue;
                for (int dx = -r; dx <= r; ++dx) {
                    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r) continue;
                    int x = cx + dx;
                    if (x < 0 || x >= nx_) continue;
                    any_cell = true;
                    for (int idx : cells_[(static_cast<size_t>(z) * ny_ + y) * nx_ + x]) {
                        if (idx == exclude) continue;
                        double d2 = (points_[idx] - p).squaredNorm();
                        best.push_back({d2, idx});
                    }
                }
            }
        }
        if (any_cell || best.size() < static_cast<size_t>(k)) {
            std::sort(best.begin(), best.end());
            if (best.size() > static_cast<size_t>(2 * k)) best.resize(2 * k);
            if (best.size() >= static_cast<size_t>(k)) kth = best[k - 1].d2;
        }
    }
    std::sort(best.begin(), best.end());
    std::vector<int> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) out.push_back(best[i].idx);
    return out;
}

std::vector<int> KnnIndex::query(int i, int k) const { return query_point(points_[i], k, i); }

int KnnIndex::nearest(const Vec3& p, int exclude) const { return query_point(p, 1, exclude)[0]; }

} // namespace geom
