#pragma once

#include "geom/graph.hpp"

#include <cstdint>

namespace geom {

/// Balanced connected partition of a graph, optionally extended into
/// equal-sized overlapped parts of exactly n_d vertices each.
struct Partitioning {
    int part_count = 0;
    int uniform_size = 0;                       // n_d after extend_overlap, 0 before
    std::vector<int> part_of;                   // pre-overlap owner per vertex
    std::vector<std::vector<int>> parts;        // vertex ids per part (incl. overlap)
    std::vector<std::vector<int>> overlap_only; // vertices added by the overlap pass
};

struct PartitionOptions {
    int target_size = 600;   // vertices per part before overlap
    std::uint64_t seed = 0;  // seeds the deterministic grower
};

/// Seeded BFS region growing with balance repair. Depends only on
/// connectivity, so encoder and decoder reproduce it byte-for-byte.
Partitioning partition_mesh(const SparseGraph& graph, const PartitionOptions& opts = {});

/// Grow every part by BFS frontier, order (distance-to-part, index), until all
/// parts hold exactly n_d vertices. Requires n_d >= max pre-overlap size.
void extend_overlap(Partitioning& partitioning, const SparseGraph& graph, int n_d);

/// Smallest n_d that guarantees every part absorbs its whole first frontier
/// ring, which makes every boundary vertex belong to at least two parts.
int full_ring_overlap_size(const Partitioning& partitioning, const SparseGraph& graph);

/// Degree-weighted average of per-part vertex values. values[p] has one row
/// per vertex of parts[p] (any column count). Weight of vertex i in part p is
/// its degree inside the part's induced subgraph.
Eigen::MatrixXd merge_weighted(const std::vector<Eigen::MatrixXd>& values,
                               const Partitioning& partitioning, const SparseGraph& graph,
                               int columns = 3);

} // namespace geom
