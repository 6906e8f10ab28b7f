#pragma once

#include "geom/mesh.hpp"

#include <vector>

namespace geom {

/// Exact k-nearest-neighbor queries over a fixed point set, accelerated by a
/// uniform grid. Ordering is (ascending distance, ascending index), so results
/// match a brute-force sort exactly.
class KnnIndex {
public:
    explicit KnnIndex(const std::vector<Vec3>& points);

    /// k nearest neighbors of points[i], excluding i itself.
    std::vector<int> query(int i, int k) const;
    /// k nearest stored points to an arbitrary location (nothing excluded).
    std::vector<int> query_point(const Vec3& p, int k, int exclude = -1) const;
    /// Index of the nearest stored point to p (excluding `exclude` if >= 0).
    int nearest(const Vec3& p, int exclude = -1) const;

    int size() const { return static_cast<int>(points_.size()); }

private:
    std::vector<Vec3> points_;
    Vec3 origin_;
    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1, nz_ = 1;
    std::vector<std::vector<int>> cells_;

    int cell_of(const Vec3& p) const;
};

} // namespace geom
