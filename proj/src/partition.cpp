#include "geom/partition.hpp"

#include "geom/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <queue>

namespace geom {

namespace {

// Farthest-point seed selection on hop distance, deterministic.
std::vector<int> pick_seeds(const std::vector<std::vector<int>>& adj, int count,
                            std::uint64_t seed) {
    const int n = static_cast<int>(adj.size());
    Rng rng(seed);
    std::vector<int> seeds{static_cast<int>(rng.uniform_index(n))};
    std::vector<int> dist(n, -1);
    std::deque<int> queue;
    auto relax_from = [&](int s) {
        queue.push_back(s);
        dist[s] = 0;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : adj[u])
                if (dist[v] < 0 || dist[v] > dist[u] + 1) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
        }
    };
    relax_from(seeds[0]);
    while (static_cast<int>(seeds.size()) < count) {
        int best = 0, best_d = -1;
        for (int i = 0; i < n; ++i)
            if (dist[i] > best_d) {
                best_d = dist[i];
                best = i;
            }
        seeds.push_back(best);
        relax_from(best);
    }
    return seeds;
}

bool removal_keeps_connected(const std::vector<std::vector<int>>& adj,
                             const std::vector<int>& part_of, int part, int candidate,
                             int part_size) {
    // BFS over the part without `candidate`
    int start = -1;
    for (int v : adj[candidate])
        if (part_of[v] == part) {
            start = v;
            break;
        }
    if (start < 0) return part_size <= 1;
    std::vector<int> seen{start};
    std::deque<int> queue{start};
    std::vector<bool> visited(adj.size(), false);
    visited[start] = true;
    int reached = 1;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : adj[u]) {
            if (visited[v] || v == candidate || part_of[v] != part) continue;
            visited[v] = true;
            ++reached;
            queue.push_back(v);
        }
    }
    return reached == part_size - 1;
}

} // namespace

Partitioning partition_mesh(const SparseGraph& graph, const PartitionOptions& opts) {
    const int n = graph.size();
    if (opts.target_size < 50 && opts.target_size < n)
        throw invalid("partition_mesh: target size must be at least 50");
    if (!graph.connected) throw invalid("partition_mesh: graph must be connected");

    Partitioning out;
    if (opts.target_size >= n) {
        out.part_count = 1;
        out.part_of.assign(n, 0);
        out.parts.resize(1);
        out.parts[0].resize(n);
        std::iota(out.parts[0].begin(), out.parts[0].end(), 0);
        out.overlap_only.resize(1);
        return out;
    }

    const int parts = static_cast<int>(std::lround(
        std::ceil(static_cast<double>(n) / static_cast<double>(opts.target_size))));
    auto seeds = pick_seeds(graph.neighbors, parts, opts.seed);

    out.part_count = parts;
    out.part_of.assign(n, -1);
    out.parts.assign(parts, {});
    out.overlap_only.assign(parts, {});

    // round-robin frontier growth keeps sizes within one claim of each other
    std::vector<std::deque<int>> frontier(parts);
    for (int p = 0; p < parts; ++p) {
        if (out.part_of[seeds[p]] >= 0) continue; // duplicate seed on tiny graphs
        out.part_of[seeds[p]] = p;
        out.parts[p].push_back(seeds[p]);
        frontier[p].push_back(seeds[p]);
    }
    int assigned = 0;
    for (int p = 0; p < parts; ++p) assigned += static_cast<int>(out.parts[p].size());
    while (assigned < n) {
        bool progress = false;
        for (int p = 0; p < parts; ++p) {
            while (!frontier[p].empty()) {
                int u = frontier[p].front();
                int claimed = -1;
                for (int v : graph.neighbors[u])
                    if (out.part_of[v] < 0) {
                        claimed = v;
                        break;
                    }
                if (claimed < 0) {
                    frontier[p].pop_front();
                    continue;
                }
                out.part_of[claimed] = p;
                out.parts[p].push_back(claimed);
                frontier[p].push_back(claimed);
                ++assigned;
                progress = true;
                break;
            }
        }
        if (!progress) break; // unreachable only if graph is disconnected
    }

    // balance repair: shift boundary vertices from oversized into undersized parts
    const double lo = 0.8 * opts.target_size, hi = 1.2 * opts.target_size;
    for (int round = 0; round < 4 * parts; ++round) {
        int small = -1;
        double worst = lo;
        for (int p = 0; p < parts; ++p)
            if (static_cast<double>(out.parts[p].size()) < worst) {
                worst = static_cast<double>(out.parts[p].size());
                small = p;
            }
        if (small < 0) break;
        bool moved = false;
        for (int u : out.parts[small]) {
            for (int v : graph.neighbors[u]) {
                int donor = out.part_of[v];
                if (donor == small) continue;
                if (static_cast<double>(out.parts[donor].size()) <= hi &&
                    static_cast<double>(out.parts[donor].size()) <=
                        static_cast<double>(out.parts[small].size()) + 1)
                    continue;
                if (!removal_keeps_connected(graph.neighbors, out.part_of, donor, v,
                                             static_cast<int>(out.parts[donor].size())))
                    continue;
                out.part_of[v] = small;
                out.parts[small].push_back(v);
                auto& d = out.parts[donor];
                d.erase(std::find(d.begin(), d.end(), v));
                moved = true;
                break;
            }
            if (moved) break;
        }
        if (!moved) break;
    }
    for (auto& list : out.parts) std::sort(list.begin(), list.end());
    return out;
}

int full_ring_overlap_size(const Partitioning& partitioning, const SparseGraph& graph) {
    int needed = 0;
    for (const auto& members : partitioning.parts) {
        std::vector<bool> in_part(graph.size(), false);
        for (int v : members) in_part[v] = true;
        int ring = 0;
        std::vector<bool> counted(graph.size(), false);
        for (int v : members)
            for (int u : graph.neighbors[v])
                if (!in_part[u] && !counted[u]) {
                    counted[u] = true;
                    ++ring;
                }
        needed = std::max(needed, static_cast<int>(members.size()) + ring);
    }
    return std::min(needed, graph.size());
}

void extend_overlap(Partitioning& partitioning, const SparseGraph& graph, int n_d) {
    const int n = graph.size();
    if (n_d > n) throw invalid("extend_overlap: n_d exceeds vertex count");
    size_t max_size = 0;
    for (const auto& part : partitioning.parts) max_size = std::max(max_size, part.size());
    if (n_d < static_cast<int>(max_size))
        throw invalid("extend_overlap: n_d below the largest pre-overlap part");

    for (int p = 0; p < partitioning.part_count; ++p) {
        auto& members = partitioning.parts[p];
        std::vector<bool> in_part(n, false);
        for (int v : members) in_part[v] = true;
        // BFS layers outward from the part, ordered by (distance, index)
        std::vector<int> current = members;
        while (static_cast<int>(members.size()) < n_d) {
            std::vector<int> next;
            for (int u : current)
                for (int v : graph.neighbors[u])
                    if (!in_part[v]) {
                        in_part[v] = true;
                        next.push_back(v);
                    }
            if (next.empty())
                throw invalid("extend_overlap: part " + std::to_string(p) +
                              " cannot reach n_d vertices");
            std::sort(next.begin(), next.end());
            for (int v : next) {
                if (static_cast<int>(members.size()) >= n_d) break;
                members.push_back(v);
                partitioning.overlap_only[p].push_back(v);
            }
            current = std::move(next);
        }
        std::sort(members.begin(), members.end());
    }
    partitioning.uniform_size = n_d;
}

Eigen::MatrixXd merge_weighted(const std::vector<Eigen::MatrixXd>& values,
                               const Partitioning& partitioning, const SparseGraph& graph,
                               int columns) {
    const int n = graph.size();
    if (static_cast<int>(values.size()) != partitioning.part_count)
        throw invalid("merge_weighted: one value block per part required");

    Eigen::MatrixXd merged = Eigen::MatrixXd::Zero(n, columns);
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(n);
    for (int p = 0; p < partitioning.part_count; ++p) {
        const auto& members = partitioning.parts[p];
        if (values[p].rows() != static_cast<Eigen::Index>(members.size()) ||
            values[p].cols() != columns)
            throw invalid("merge_weighted: value block shape mismatch for part " +
                          std::to_string(p));
        std::vector<bool> in_part(n, false);
        for (int v : members) in_part[v] = true;
        for (size_t local = 0; local < members.size(); ++local) {
            int v = members[local];
            double deg = 0.0;
            for (int u : graph.neighbors[v])
                if (in_part[u]) deg += 1.0;
            if (deg == 0.0) deg = 0.5; // isolated inside the part, keep a small vote
            merged.row(v) += deg * values[p].row(static_cast<Eigen::Index>(local));
            weight[v] += deg;
        }
    }
    for (int v = 0; v < n; ++v) {
        if (weight[v] == 0.0) throw invalid("merge_weighted: vertex covered by no part");
        merged.row(v) /= weight[v];
    }
    return merged;
}

} // namespace geom
