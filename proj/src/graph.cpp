#include "geom/graph.hpp"

#include "geom/knn.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace geom {

namespace {

SparseGraph from_weighted_edges(int n, const std::map<std::pair<int, int>, double>& edges) {
    SparseGraph g;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(edges.size() * 2);
    g.neighbors.assign(n, {});
    for (const auto& [key, w] : edges) {
        trips.emplace_back(key.first, key.second, w);
        trips.emplace_back(key.second, key.first, w);
        g.neighbors[key.first].push_back(key.second);
        g.neighbors[key.second].push_back(key.first);
    }
    for (auto& list : g.neighbors) std::sort(list.begin(), list.end());
    g.adjacency.resize(n, n);
    g.adjacency.setFromTriplets(trips.begin(), trips.end());
    g.degrees = g.adjacency * Eigen::VectorXd::Ones(n);
    Eigen::SparseMatrix<double> d(n, n);
    std::vector<Eigen::Triplet<double>> dt;
    dt.reserve(n);
    for (int i = 0; i < n; ++i) dt.emplace_back(i, i, g.degrees[i]);
    d.setFromTriplets(dt.begin(), dt.end());
    g.laplacian = d - g.adjacency;
    auto comp = connected_components(g.neighbors);
    g.connected = std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
    return g;
}

std::map<std::pair<int, int>, double> mesh_edges(const Mesh& mesh) {
    if (mesh.faces.empty()) throw invalid("build_graph: mesh has no edges");
    std::map<std::pair<int, int>, double> edges;
    for (const Face& f : mesh.faces)
        for (int e = 0; e < 3; ++e) {
            auto key = std::minmax(f[e], f[(e + 1) % 3]);
            edges[key] = 1.0;
        }
    return edges;
}

} // namespace

SparseGraph build_graph(const Mesh& mesh) {
    return from_weighted_edges(mesh.vertex_count(), mesh_edges(mesh));
}

SparseGraph build_graph_gaussian(const Mesh& mesh, double alpha) {
    if (!(alpha > 0.0)) throw invalid("build_graph: gaussian alpha must be positive");
    auto edges = mesh_edges(mesh);
    for (auto& [key, w] : edges) {
        double d2 = (mesh.vertices[key.first] - mesh.vertices[key.second]).squaredNorm();
        w = std::exp(-d2 / (2.0 * alpha * alpha));
    }
    return from_weighted_edges(mesh.vertex_count(), edges);
}

SparseGraph build_graph_knn(const std::vector<Vec3>& points, int k) {
    const int n = static_cast<int>(points.size());
    if (n < k + 1) throw invalid("build_graph: point set needs at least k+1 points");
    KnnIndex index(points);
    std::map<std::pair<int, int>, double> edges;
    for (int i = 0; i < n; ++i)
        for (int j : index.query(i, k))
            edges[std::minmax(i, j)] = 1.0; // union symmetrization
    return from_weighted_edges(n, edges);
}

SparseGraph induced_subgraph(const SparseGraph& graph, const std::vector<int>& vertex_ids) {
    const int m = static_cast<int>(vertex_ids.size());
    std::vector<int> local(graph.size(), -1);
    for (int i = 0; i < m; ++i) local[vertex_ids[i]] = i;
    std::map<std::pair<int, int>, double> edges;
    for (int i = 0; i < m; ++i)
        for (int j : graph.neighbors[vertex_ids[i]])
            if (local[j] >= 0 && local[j] > i) edges[{i, local[j]}] = 1.0;
    return from_weighted_edges(m, edges);
}

DeltaField delta_coordinates(const Mesh& mesh, const SparseGraph& graph, DeltaVariant variant) {
    if (graph.size() != mesh.vertex_count())
        throw invalid("delta_coordinates: graph size does not match mesh");
    const int n = mesh.vertex_count();
    DeltaField out;
    out.delta.resize(n, 3);
    Eigen::MatrixXd v = mesh.vertex_matrix();
    for (int i = 0; i < n; ++i) {
        if (graph.neighbors[i].empty()) {
            out.delta.row(i).setZero();
            out.isolated_vertices.push_back(i);
            continue;
        }
        Vec3 bary = Vec3::Zero();
        for (int j : graph.neighbors[i]) bary += mesh.vertices[j];
        bary /= static_cast<double>(graph.neighbors[i].size());
        Vec3 d = mesh.vertices[i] - bary;
        if (variant == DeltaVariant::RawLaplacian) d *= graph.degrees[i];
        out.delta.row(i) = d.transpose();
    }
    return out;
}

std::vector<int> connected_components(const std::vector<std::vector<int>>& neighbors) {
    const int n = static_cast<int>(neighbors.size());
    std::vector<int> comp(n, -1);
    int next = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = next;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : neighbors[u])
                if (comp[v] < 0) {
                    comp[v] = next;
                    queue.push_back(v);
                }
        }
        ++next;
    }
    return comp;
}

} // namespace geom
