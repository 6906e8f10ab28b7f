#pragma once

#include "geom/mesh.hpp"

#include <Eigen/SparseCore>

namespace geom {

/// Undirected graph of a mesh or point set: symmetric adjacency C with zero
/// diagonal, degree diagonal D and Laplacian L = D - C (rows sum to zero).
struct SparseGraph {
    Eigen::SparseMatrix<double> adjacency;
    Eigen::VectorXd degrees;
    Eigen::SparseMatrix<double> laplacian;
    std::vector<std::vector<int>> neighbors; // sorted adjacency lists
    bool connected = true;                   // flagged, not fatal

    int size() const { return static_cast<int>(degrees.size()); }
};

/// Binary weights from shared face edges.
SparseGraph build_graph(const Mesh& mesh);
/// Gaussian weights w = exp(-|vi-vj|^2 / (2 alpha^2)) on mesh edges.
SparseGraph build_graph_gaussian(const Mesh& mesh, double alpha);
/// Mutualized k-NN graph of a point set: edge when either endpoint lists the other.
SparseGraph build_graph_knn(const std::vector<Vec3>& points, int k);

/// Induced subgraph on `vertex_ids` (binary weights, indices local to the list).
SparseGraph induced_subgraph(const SparseGraph& graph, const std::vector<int>& vertex_ids);

/// Delta coordinates. Normalized variant (default) is the offset from the
/// 1-ring barycenter, delta = v - D^-1 C v; raw variant is L v, which equals
/// D times the normalized one. Isolated vertices get delta = 0 and a flag.
struct DeltaField {
    Eigen::MatrixXd delta; // n x 3
    std::vector<int> isolated_vertices;
};

enum class DeltaVariant { BarycentricOffset, RawLaplacian };

DeltaField delta_coordinates(const Mesh& mesh, const SparseGraph& graph,
                             DeltaVariant variant = DeltaVariant::BarycentricOffset);

/// Connected components by BFS; returns component id per vertex.
std::vector<int> connected_components(const std::vector<std::vector<int>>& neighbors);

} // namespace geom
