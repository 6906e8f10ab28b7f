#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace geom {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

/// Error raised by library operations. `kind` maps onto CLI exit codes.
class Error : public std::runtime_error {
public:
    enum class Kind { InvalidInput, Io, Solver };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline Error invalid(const std::string& what) { return Error(Error::Kind::InvalidInput, what); }
inline Error io_error(const std::string& what) { return Error(Error::Kind::Io, what); }
inline Error solver_error(const std::string& what) { return Error(Error::Kind::Solver, what); }

/// Triangle mesh (or point cloud when faces are empty). Vertex order is
/// meaningful; faces hold 0-based indices.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::string name;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }

    Eigen::MatrixXd vertex_matrix() const;            // n x 3
    void set_vertex_matrix(const Eigen::MatrixXd& v); // n x 3

    double mean_edge_length() const;
    double bbox_diagonal() const;

    /// Throws on out-of-range indices or faces repeating a vertex.
    void validate() const;
};

/// Animated mesh: frames share one face list and vertex count.
struct FrameSequence {
    std::vector<Mesh> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
    int vertex_count() const { return frames.empty() ? 0 : frames.front().vertex_count(); }

    /// Throws unless all frames agree on vertex count and connectivity.
    void validate() const;
};

/// Per-face centroids/normals/areas plus averaged vertex normals.
struct SurfaceFrames {
    std::vector<Vec3> centroids;
    std::vector<Vec3> face_normals;   // unit, winding order
    std::vector<Vec3> vertex_normals; // unit, mean of incident face normals
    std::vector<double> areas;
    std::vector<int> degenerate_faces; // zero-area faces, normal forced to (0,0,1)
};

SurfaceFrames surface_frames(const Mesh& mesh);

/// Per-vertex displacement between consecutive frames, stored signed so that
/// v^(t-1) + m reproduces v^(t) exactly.
struct MotionField {
    std::vector<Vec3> m;
};

/// m = v^(t) - v^(t-1); requires 1 <= t < frame count.
MotionField motion_vectors(const FrameSequence& seq, int t);

struct Neighborhood {
    /// lists[i]: neighbor indices of element i. Ring mode: vertices with
    /// topological distance in [1, j], ordered by (distance, index). Knn mode:
    /// exactly k elements ordered by (euclidean distance, index).
    std::vector<std::vector<int>> lists;
};

enum class NeighborhoodTarget { Vertex, FaceCentroid };

/// BFS rings over the mesh edge graph; j <= 3.
Neighborhood ring_neighborhoods(const Mesh& mesh, int j);
/// Exact k nearest neighbors of vertices or face centroids.
Neighborhood knn_neighborhoods(const Mesh& mesh, int k, NeighborhoodTarget target);
Neighborhood knn_neighborhoods(const std::vector<Vec3>& points, int k);

/// Per-vertex adjacency lists (sorted, unique) from shared face edges.
std::vector<std::vector<int>> vertex_adjacency(const Mesh& mesh);

/// Optional diagnostic: closed meshes with mean degree >= 4 satisfy n_f >= n + 2.
bool watertight_face_bound_holds(const Mesh& mesh);

} // namespace geom
