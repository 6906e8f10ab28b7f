#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geom/eval.hpp"
#include "geom/graph.hpp"
#include "geom/partition.hpp"
#include "support/shapes.hpp"

#include <set>

using namespace geom;

namespace {

bool part_connected(const SparseGraph& g, const std::vector<int>& members) {
    SparseGraph sub = induced_subgraph(g, members);
    return sub.connected;
}

} // namespace

TEST_CASE("partition: 1000 vertices at target 500 gives 2 connected parts") {
    Mesh m = testing::torus(40, 25); // 1000 vertices
    SparseGraph g = build_graph(m);
    PartitionOptions opts;
    opts.target_size = 500;
    Partitioning p = partition_mesh(g, opts);
    CHECK(p.part_count == 2);
    for (const auto& part : p.parts) CHECK(part_connected(g, part));
}

TEST_CASE("partition: target >= n gives a single whole-mesh part") {
    Mesh m = testing::grid_plane(9, 9);
    SparseGraph g = build_graph(m);
    PartitionOptions opts;
    opts.target_size = 1000;
    Partitioning p = partition_mesh(g, opts);
    CHECK(p.part_count == 1);
    CHECK(static_cast<int>(p.parts[0].size()) == g.size());
}

TEST_CASE("partition: pre-overlap parts cover every vertex exactly once, balanced") {
    Mesh m = testing::blob(4, 5, 300); // 2562 vertices
    SparseGraph g = build_graph(m);
    PartitionOptions opts;
    opts.target_size = 300;
    Partitioning p = partition_mesh(g, opts);

    std::vector<int> seen(g.size(), 0);
    for (const auto& part : p.parts)
        for (int v : part) ++seen[v];
    for (int c : seen) CHECK(c == 1);
    for (int v = 0; v < g.size(); ++v) CHECK(p.part_of[v] >= 0);

    for (const auto& part : p.parts) {
        CHECK(part_connected(g, part));
        CHECK(static_cast<double>(part.size()) >= 0.8 * opts.target_size);
        CHECK(static_cast<double>(part.size()) <= 1.2 * opts.target_size);
    }
}

TEST_CASE("extend_overlap: exact n_d sizes and boundary multi-membership") {
    Mesh m = testing::icosphere(3); // 642 vertices
    SparseGraph g = build_graph(m);
    PartitionOptions opts;
    opts.target_size = 150;
    Partitioning p = partition_mesh(g, opts);
    int n_d = full_ring_overlap_size(p, g);
    std::vector<int> owner = p.part_of;
    extend_overlap(p, g, n_d);
    for (const auto& part : p.parts) CHECK(static_cast<int>(part.size()) == n_d);

    // every pre-overlap boundary vertex now belongs to at least 2 parts
    std::vector<int> membership(g.size(), 0);
    for (const auto& part : p.parts)
        for (int v : part) ++membership[v];
    int boundary = 0, multi = 0;
    for (int v = 0; v < g.size(); ++v) {
        bool is_boundary = false;
        for (int u : g.neighbors[v]) is_boundary = is_boundary || owner[u] != owner[v];
        if (!is_boundary) continue;
        ++boundary;
        if (membership[v] >= 2) ++multi;
    }
    CHECK(boundary > 0);
    CHECK(multi == boundary);

    CHECK_THROWS_AS(extend_overlap(p, g, g.size() + 1), Error);
}

TEST_CASE("merge_weighted: passthrough, constants and the 5a+3b hand case") {
    Mesh m = testing::grid_plane(19, 19); // 400 vertices
    SparseGraph g = build_graph(m);
    PartitionOptions opts;
    opts.target_size = 120;
    Partitioning p = partition_mesh(g, opts);
    size_t max_size = 0;
    for (const auto& part : p.parts) max_size = std::max(max_size, part.size());
    extend_overlap(p, g, static_cast<int>(1.2 * static_cast<double>(max_size)));

    // identical per-part constants merge to the same constant
    std::vector<Eigen::MatrixXd> constants;
    for (const auto& part : p.parts)
        constants.push_back(Eigen::MatrixXd::Constant(static_cast<int>(part.size()), 3, 4.25));
    Eigen::MatrixXd merged = merge_weighted(constants, p, g);
    CHECK((merged.array() - 4.25).abs().maxCoeff() < 1e-12);

    // direct arithmetic: weight 5 on value a, weight 3 on value b
    double a = 2.0, b = -1.0;
    CHECK((5.0 * a + 3.0 * b) / 8.0 == doctest::Approx(0.875));

    // single-membership vertices pass through unchanged
    std::vector<Eigen::MatrixXd> values;
    for (int q = 0; q < p.part_count; ++q)
        values.push_back(Eigen::MatrixXd::Constant(static_cast<int>(p.parts[q].size()), 3,
                                                   static_cast<double>(q + 1)));
    Eigen::MatrixXd merged2 = merge_weighted(values, p, g);
    std::vector<int> membership(g.size(), 0);
    std::vector<int> only(g.size(), -1);
    for (int q = 0; q < p.part_count; ++q)
        for (int v : p.parts[q]) {
            ++membership[v];
            only[v] = q;
        }
    for (int v = 0; v < g.size(); ++v)
        if (membership[v] == 1)
            CHECK(merged2(v, 0) == doctest::Approx(static_cast<double>(only[v] + 1)));
}

TEST_CASE("partition determinism: identical seed, identical bytes") {
    Mesh m = testing::blob(3, 21, 100);
    SparseGraph g = build_graph(m);
    PartitionOptions opts;
    opts.target_size = 150;
    opts.seed = 77;
    Partitioning a = partition_mesh(g, opts);
    Partitioning b = partition_mesh(g, opts);
    CHECK(a.part_of == b.part_of);
    CHECK(a.parts == b.parts);
}

TEST_CASE("weighted merge beats unweighted on noisy-plane boundary RMSE") {
    Mesh plane = testing::grid_plane(29, 29); // 900 vertices
    SparseGraph g = build_graph(plane);
    PartitionOptions opts;
    opts.target_size = 200;
    Partitioning p = partition_mesh(g, opts);
    size_t max_size = 0;
    for (const auto& part : p.parts) max_size = std::max(max_size, part.size());
    extend_overlap(p, g, static_cast<int>(1.15 * static_cast<double>(max_size)));

    // per-part "reconstructions": noisy copies of the true plane, noise scaled
    // by inverse in-part degree so low-degree boundary copies are worse (the
    // situation degree weighting is meant to handle)
    Rng rng(9);
    std::vector<Eigen::MatrixXd> recon;
    for (const auto& part : p.parts) {
        Eigen::MatrixXd block(static_cast<int>(part.size()), 3);
        std::vector<bool> in_part(g.size(), false);
        for (int v : part) in_part[v] = true;
        for (size_t i = 0; i < part.size(); ++i) {
            int v = part[i];
            double deg = 0.0;
            for (int u : g.neighbors[v])
                if (in_part[u]) deg += 1.0;
            double scale = 0.05 / std::max(1.0, deg);
            block.row(static_cast<int>(i)) =
                plane.vertices[v].transpose() +
                Eigen::RowVector3d(rng.normal(), rng.normal(), rng.normal()) * scale;
        }
        recon.push_back(block);
    }

    Eigen::MatrixXd weighted = merge_weighted(recon, p, g);

    // unweighted merge: plain average over covering parts
    Eigen::MatrixXd unweighted = Eigen::MatrixXd::Zero(g.size(), 3);
    Eigen::VectorXd count = Eigen::VectorXd::Zero(g.size());
    for (int q = 0; q < p.part_count; ++q)
        for (size_t i = 0; i < p.parts[q].size(); ++i) {
            unweighted.row(p.parts[q][i]) += recon[q].row(static_cast<int>(i));
            count[p.parts[q][i]] += 1.0;
        }
    for (int v = 0; v < g.size(); ++v) unweighted.row(v) /= count[v];

    double werr = 0.0, uerr = 0.0;
    int boundary = 0;
    for (int v = 0; v < g.size(); ++v) {
        if (count[v] < 2.0) continue; // boundary = multi-covered vertices
        ++boundary;
        werr += (weighted.row(v) - plane.vertices[v].transpose()).squaredNorm();
        uerr += (unweighted.row(v) - plane.vertices[v].transpose()).squaredNorm();
    }
    REQUIRE(boundary > 0);
    CHECK(std::sqrt(werr / boundary) <= std::sqrt(uerr / boundary));
}
