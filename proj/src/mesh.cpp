#include "geom/mesh.hpp"

#include "geom/knn.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace geom {

Eigen::MatrixXd Mesh::vertex_matrix() const {
    Eigen::MatrixXd v(vertex_count(), 3);
    for (int i = 0; i < vertex_count(); ++i) v.row(i) = vertices[i].transpose();
    return v;
}

void Mesh::set_vertex_matrix(const Eigen::MatrixXd& v) {
    if (v.rows() != vertex_count() || v.cols() != 3)
        throw invalid("vertex matrix shape mismatch");
    for (int i = 0; i < vertex_count(); ++i) vertices[i] = v.row(i).transpose();
}

double Mesh::mean_edge_length() const {
    double total = 0.0;
    long count = 0;
    std::set<std::pair<int, int>> seen;
    for (const Face& f : faces) {
        for (int e = 0; e < 3; ++e) {
            int a = f[e], b = f[(e + 1) % 3];
            auto key = std::minmax(a, b);
            if (seen.insert(key).second) {
                total += (vertices[a] - vertices[b]).norm();
                ++count;
            }
        }
    }
    return count == 0 ? 0.0 : total / static_cast<double>(count);
}

double Mesh::bbox_diagonal() const {
    if (vertices.empty()) return 0.0;
    Vec3 lo = vertices.front(), hi = vertices.front();
    for (const Vec3& v : vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return (hi - lo).norm();
}

void Mesh::validate() const {
    const int n = vertex_count();
    for (size_t fi = 0; fi < faces.size(); ++fi) {
        const Face& f = faces[fi];
        for (int idx : f)
            if (idx < 0 || idx >= n)
                throw invalid("face " + std::to_string(fi) + " references vertex " +
                              std::to_string(idx) + " out of range");
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
            throw invalid("face " + std::to_string(fi) + " repeats a vertex");
    }
}

void FrameSequence::validate() const {
    if (frames.empty()) throw invalid("empty frame sequence");
    const Mesh& first = frames.front();
    first.validate();
    for (size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].vertex_count() != first.vertex_count())
            throw invalid("frame " + std::to_string(i) + " vertex count differs");
        if (frames[i].faces != first.faces)
            throw invalid("frame " + std::to_string(i) + " connectivity differs");
    }
}

SurfaceFrames surface_frames(const Mesh& mesh) {
    SurfaceFrames out;
    const int nf = mesh.face_count();
    const int n = mesh.vertex_count();
    out.centroids.resize(nf);
    out.face_normals.resize(nf);
    out.areas.resize(nf);
    out.vertex_normals.assign(n, Vec3::Zero());

    for (int i = 0; i < nf; ++i) {
        const Face& f = mesh.faces[i];
        const Vec3& v1 = mesh.vertices[f[0]];
        const Vec3& v2 = mesh.vertices[f[1]];
        const Vec3& v3 = mesh.vertices[f[2]];
        out.centroids[i] = (v1 + v2 + v3) / 3.0;
        Vec3 cross = (v2 - v1).cross(v3 - v1);
        double len = cross.norm();
        out.areas[i] = 0.5 * len;
        if (len < 1e-300) {
            out.face_normals[i] = Vec3(0, 0, 1);
            out.degenerate_faces.push_back(i);
        } else {
            out.face_normals[i] = cross / len;
        }
    }
    std::vector<int> incident(n, 0);
    for (int i = 0; i < nf; ++i)
        for (int idx : mesh.faces[i]) {
            out.vertex_normals[idx] += out.face_normals[i];
            ++incident[idx];
        }
    for (int i = 0; i < n; ++i) {
        if (incident[i] == 0) {
            out.vertex_normals[i] = Vec3(0, 0, 1);
            continue;
        }
        double len = out.vertex_normals[i].norm();
        out.vertex_normals[i] = len < 1e-300 ? Vec3(0, 0, 1) : Vec3(out.vertex_normals[i] / len);
    }
    return out;
}

MotionField motion_vectors(const FrameSequence& seq, int t) {
    if (t < 1 || t >= seq.frame_count())
        throw invalid("motion_vectors: frame index " + std::to_string(t) + " out of range");
    const Mesh& prev = seq.frames[t - 1];
    const Mesh& cur = seq.frames[t];
    MotionField out;
    out.m.resize(prev.vertex_count());
    for (int i = 0; i < prev.vertex_count(); ++i) out.m[i] = cur.vertices[i] - prev.vertices[i];
    return out;
}

std::vector<std::vector<int>> vertex_adjacency(const Mesh& mesh) {
    std::vector<std::vector<int>> adj(mesh.vertex_count());
    for (const Face& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            int a = f[e], b = f[(e + 1) % 3];
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

Neighborhood ring_neighborhoods(const Mesh& mesh, int j) {
    if (j < 1 || j > 3) throw invalid("ring_neighborhoods: j must be in [1,3]");
    auto adj = vertex_adjacency(mesh);
    const int n = mesh.vertex_count();
    Neighborhood out;
    out.lists.resize(n);
    std::vector<int> dist(n, -1);
    std::vector<int> touched;
    for (int s = 0; s < n; ++s) {
        std::deque<int> queue{s};
        dist[s] = 0;
        touched.assign(1, s);
        std::vector<std::pair<int, int>> found; // (distance, index)
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            if (dist[u] == j) continue;
            for (int v : adj[u]) {
                if (dist[v] >= 0) continue;
                dist[v] = dist[u] + 1;
                touched.push_back(v);
                found.emplace_back(dist[v], v);
                queue.push_back(v);
            }
        }
        std::sort(found.begin(), found.end());
        out.lists[s].reserve(found.size());
        for (auto& [d, v] : found) out.lists[s].push_back(v);
        for (int v : touched) dist[v] = -1;
    }
    return out;
}

Neighborhood knn_neighborhoods(const std::vector<Vec3>& points, int k) {
    const int n = static_cast<int>(points.size());
    if (k >= n) throw invalid("knn: k must be smaller than the element count");
    KnnIndex index(points);
    Neighborhood out;
    out.lists.resize(n);
    for (int i = 0; i < n; ++i) out.lists[i] = index.query(i, k);
    return out;
}

Neighborhood knn_neighborhoods(const Mesh& mesh, int k, NeighborhoodTarget target) {
    if (target == NeighborhoodTarget::Vertex) return knn_neighborhoods(mesh.vertices, k);
    SurfaceFrames sf = surface_frames(mesh);
    return knn_neighborhoods(sf.centroids, k);
}

bool watertight_face_bound_holds(const Mesh& mesh) {
    return mesh.face_count() >= mesh.vertex_count() + 2;
}

} // namespace geom
