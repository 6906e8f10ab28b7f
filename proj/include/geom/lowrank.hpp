#pragma once

#include <Eigen/Core>

#include <vector>

namespace geom {

/// M ~= E + S with E low-rank and S sparse.
struct LowRankDecomposition {
    Eigen::MatrixXd E;
    Eigen::MatrixXd S;
    int iterations = 0;
    bool converged = true;
    double residual = 0.0;        // ||M - E - S||_F / ||M||_F at exit
    double sparsity = 0.0;        // fraction of nonzero entries in S
};

struct SolverConfig {
    double alpha = -1.0;   // sparsity weight; <= 0 picks 1 / sqrt(max dim)
    double mu = -1.0;      // ALM penalty; <= 0 picks rows*cols / (4 ||M||_1)
                           // for rpca_alm and 1 / (2 sigma_1) for completion
    double rho = 1.0;      // mu growth per iteration (completion default 1.1)
    double beta = 1e-7;    // stop when ||M - E - S||_F <= beta ||M||_F
    int max_iterations = 2000;
    int rank = -1;         // GoDec rank cap; < 0 picks min(10, min dim), 0 rejected
    bool lambda_auto = true; // GoDec: pick lambda as 0.1 max|M - WT| at iteration 1
    double lambda = 0.0;   // GoDec shrinkage when lambda_auto is false; must be >= 0
};

/// Principal component pursuit via the augmented Lagrange multiplier method:
/// min ||E||_* + alpha ||S||_1 s.t. E + S = M.
LowRankDecomposition rpca_alm(const Eigen::MatrixXd& M, const SolverConfig& cfg = {});

/// SVD-free rank-r factorization E = W T via QR updates and soft thresholding.
LowRankDecomposition godec(const Eigen::MatrixXd& M, const SolverConfig& cfg = {});

struct CompletionResult {
    Eigen::MatrixXd E;
    int iterations = 0;
    bool converged = true;
    double residual = 0.0;
    std::vector<int> rank_schedule; // n_lambda per iteration (progressive scheme)
};

/// Masked matrix completion: recover E from the observed entries of M
/// (mask(i,j) != 0 marks observed). Progressive singular-value schedule starts
/// at floor(0.5 k), grows on a 0.995 decay-ratio test, caps at floor(0.75 k),
/// with k = column count.
CompletionResult matrix_complete(const Eigen::MatrixXd& M,
                                 const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask,
                                 const SolverConfig& cfg = {});

} // namespace geom
