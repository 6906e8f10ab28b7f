#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "geom/lowrank.hpp"
#include "geom/mesh.hpp"
#include "geom/rng.hpp"

#include <set>

using namespace geom;

namespace {

Eigen::MatrixXd random_lowrank(int rows, int cols, int rank, Rng& rng) {
    Eigen::MatrixXd A(rows, rank), B(rank, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < rank; ++j) A(i, j) = rng.normal();
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < cols; ++j) B(i, j) = rng.normal();
    return A * B;
}

} // namespace

TEST_CASE("rpca: zero matrix returns immediately") {
    LowRankDecomposition d = rpca_alm(Eigen::MatrixXd::Zero(10, 6));
    CHECK(d.iterations == 1);
    CHECK(d.E.norm() == 0.0);
    CHECK(d.S.norm() == 0.0);
}

TEST_CASE("rpca: planted rank-2 plus 5% spikes recovered exactly") {
    Rng rng(1);
    const int rows = 200, cols = 60;
    Eigen::MatrixXd E_true = random_lowrank(rows, cols, 2, rng);
    Eigen::MatrixXd S_true = Eigen::MatrixXd::Zero(rows, cols);
    std::set<std::pair<int, int>> support;
    const int spikes = rows * cols / 20; // 5%
    while (static_cast<int>(support.size()) < spikes) {
        int i = static_cast<int>(rng.uniform_index(rows));
        int j = static_cast<int>(rng.uniform_index(cols));
        if (support.emplace(i, j).second)
            S_true(i, j) = (rng.uniform() < 0.5 ? -10.0 : 10.0);
    }
    Eigen::MatrixXd M = E_true + S_true;

    SolverConfig cfg; // mu = rows*cols/(4 ||M||_1), beta = 1e-7 per defaults
    LowRankDecomposition d = rpca_alm(M, cfg);
    CHECK(d.converged);
    CHECK((d.E - E_true).norm() / E_true.norm() < 1e-4);
    CHECK(d.residual <= 1e-7);

    // spike support exactly recovered: the largest |S| entries sit exactly on
    // the planted support and every planted spike dominates every off-support entry
    double smallest_on = 1e300, largest_off = 0.0;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            double v = std::abs(d.S(i, j));
            if (support.count({i, j})) smallest_on = std::min(smallest_on, v);
            else largest_off = std::max(largest_off, v);
        }
    CHECK(smallest_on > largest_off);
    CHECK(smallest_on > 5.0);
    CHECK(largest_off < 1e-3);
}

TEST_CASE("rpca: residual bound invariant and alpha sweep drives S to zero") {
    Rng rng(2);
    Eigen::MatrixXd M = random_lowrank(60, 40, 3, rng);
    for (int i = 0; i < 60; ++i) M(i, i % 40) += (i % 2 ? 4.0 : -4.0);

    double prev_s_norm = 1e300;
    for (double alpha : {0.05, 0.1, 0.3, 1.0, 3.0}) {
        SolverConfig cfg;
        cfg.alpha = alpha;
        cfg.max_iterations = 800;
        LowRankDecomposition d = rpca_alm(M, cfg);
        CHECK((M - d.E - d.S).norm() / M.norm() <= std::max(1e-7, d.residual) + 1e-12);
        CHECK(d.S.norm() <= prev_s_norm * (1.0 + 1e-6) + 1e-9);
        prev_s_norm = d.S.norm();
    }
}

TEST_CASE("godec: exact rank-r input with large lambda leaves S empty") {
    Rng rng(3);
    Eigen::MatrixXd M = random_lowrank(50, 30, 4, rng);
    SolverConfig cfg;
    cfg.rank = 4;
    cfg.lambda_auto = false;
    cfg.lambda = 100.0;
    LowRankDecomposition d = godec(M, cfg);
    CHECK(d.S.norm() == 0.0);
    CHECK((d.E - M).norm() < 1e-8);
}

TEST_CASE("godec: zero input, rank cap enforced every iteration") {
    LowRankDecomposition z = godec(Eigen::MatrixXd::Zero(8, 8));
    CHECK(z.E.norm() == 0.0);
    CHECK(z.S.norm() == 0.0);

    Rng rng(4);
    Eigen::MatrixXd M = random_lowrank(40, 25, 6, rng);
    for (int t = 0; t < 50; ++t) M(static_cast<int>(rng.uniform_index(40)),
                                   static_cast<int>(rng.uniform_index(25))) += 6.0;
    SolverConfig cfg;
    cfg.rank = 5;
    LowRankDecomposition d = godec(M, cfg);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.E);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-9 * svd.singularValues()[0]) ++rank;
    CHECK(rank <= 5);
    CHECK((M - d.E - d.S).norm() / M.norm() <= std::max(1e-7, d.residual) + 1e-12);

    CHECK_THROWS_AS(godec(M, [] { SolverConfig c; c.rank = 0; return c; }()), Error);
    CHECK_THROWS_AS(godec(M,
                          [] {
                              SolverConfig c;
                              c.lambda_auto = false;
                              c.lambda = -1.0;
                              return c;
                          }()),
                    Error);
}

TEST_CASE("matrix completion: fully observed low-rank input is reproduced") {
    Rng rng(5);
    Eigen::MatrixXd M = random_lowrank(60, 16, 3, rng);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(60, 16, true);
    CompletionResult r = matrix_complete(M, mask);
    CHECK(r.converged);
    CHECK((r.E - M).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("matrix completion: progressive schedule init/cap/ratio") {
    Rng rng(6);
    const int k = 20;
    Eigen::MatrixXd M = random_lowrank(100, k, 1, rng);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(100, k);
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < k; ++j) mask(i, j) = rng.uniform() < 0.5;
    for (int i = 0; i < 100; ++i) mask(i, i % k) = true; // every row observed somewhere
    Eigen::MatrixXd observed = M;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < k; ++j)
            if (!mask(i, j)) observed(i, j) = 0.0;

    CompletionResult r = matrix_complete(observed, mask);
    REQUIRE(!r.rank_schedule.empty());
    CHECK(r.rank_schedule.front() == k / 2);            // floor(0.5 k)
    for (int v : r.rank_schedule) CHECK(v <= 3 * k / 4); // floor(0.75 k) cap
    for (size_t i = 1; i < r.rank_schedule.size(); ++i)
        CHECK(r.rank_schedule[i] >= r.rank_schedule[i - 1]);

    // rank-1 planted matrix, 50% mask: relative error < 1e-4
    CHECK((r.E - M).norm() / M.norm() < 1e-4);
}

TEST_CASE("matrix completion: rejects empty rows") {
    Eigen::MatrixXd M = Eigen::MatrixXd::Ones(4, 4);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(4, 4, true);
    mask.row(2).setConstant(false);
    CHECK_THROWS_AS(matrix_complete(M, mask), Error);
}
