#include "geom/lowrank.hpp"

#include "geom/mesh.hpp"
#include "geom/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace geom {

namespace {

Eigen::MatrixXd shrink(const Eigen::MatrixXd& X, double tau) {
    return X.unaryExpr([tau](double v) {
        double a = std::abs(v) - tau;
        return a > 0.0 ? (v > 0.0 ? a : -a) : 0.0;
    });
}

/// Singular value thresholding D_tau(X) = U shrink(Sigma) V^T. `keep` caps the
/// number of singular values used (progressive scheme); keep < 0 uses all.
Eigen::MatrixXd svt(const Eigen::MatrixXd& X, double tau, int keep,
                    Eigen::VectorXd* singular_values = nullptr) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv = svd.singularValues();
    if (singular_values) *singular_values = sv;
    int limit = keep < 0 ? static_cast<int>(sv.size())
                         : std::min<int>(keep, static_cast<int>(sv.size()));
    Eigen::VectorXd thresholded = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < limit; ++i) thresholded[i] = std::max(sv[i] - tau, 0.0);
    return svd.matrixU() * thresholded.asDiagonal() * svd.matrixV().transpose();
}

double sparsity_fraction(const Eigen::MatrixXd& S) {
    long nz = 0;
    for (int j = 0; j < S.cols(); ++j)
        for (int i = 0; i < S.rows(); ++i)
            if (S(i, j) != 0.0) ++nz;
    return static_cast<double>(nz) / static_cast<double>(S.size());
}

} // namespace

LowRankDecomposition rpca_alm(const Eigen::MatrixXd& M, const SolverConfig& cfg) {
    LowRankDecomposition out;
    out.E = Eigen::MatrixXd::Zero(M.rows(), M.cols());
    out.S = Eigen::MatrixXd::Zero(M.rows(), M.cols());
    if (!M.allFinite()) throw invalid("rpca: input has non-finite entries");
    double normM = M.norm();
    if (normM == 0.0) {
        out.iterations = 1;
        return out;
    }

    double alpha = cfg.alpha > 0.0 ? cfg.alpha
                                   : 1.0 / std::sqrt(static_cast<double>(
                                         std::max(M.rows(), M.cols())));
    double mu = cfg.mu > 0.0 ? cfg.mu
                             : static_cast<double>(M.rows()) * static_cast<double>(M.cols()) /
                                   (4.0 * M.cwiseAbs().sum());

    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(M.rows(), M.cols());
    Eigen::MatrixXd E = out.E, S = out.S;
    out.converged = false;
    for (int t = 1; t <= cfg.max_iterations; ++t) {
        E = svt(M - S + Y / mu, 1.0 / mu, -1);
        S = shrink(M - E + Y / mu, alpha / mu);
        Eigen::MatrixXd residual = M - E - S;
        Y += mu * residual;
        mu *= cfg.rho;
        out.iterations = t;
        out.residual = residual.norm() / normM;
        if (out.residual <= cfg.beta) {
            out.converged = true;
            break;
        }
    }
    out.E = std::move(E);
    out.S = std::move(S);
    out.sparsity = sparsity_fraction(out.S);
    return out;
}

LowRankDecomposition godec(const Eigen::MatrixXd& M, const SolverConfig& cfg) {
    const int rows = static_cast<int>(M.rows());
    const int cols = static_cast<int>(M.cols());
    if (cfg.rank == 0) throw invalid("godec: rank must be at least 1");
    int r = cfg.rank > 0 ? cfg.rank : std::min(10, std::min(rows, cols));
    if (r > std::min(rows, cols)) throw invalid("godec: rank exceeds matrix dimensions");
    if (!cfg.lambda_auto && cfg.lambda < 0.0) throw invalid("godec: lambda must be >= 0");

    LowRankDecomposition out;
    out.E = Eigen::MatrixXd::Zero(rows, cols);
    out.S = Eigen::MatrixXd::Zero(rows, cols);
    double normM = M.norm();
    if (normM == 0.0) {
        out.iterations = 1;
        return out;
    }

    Rng rng(7);
    Eigen::MatrixXd T(r, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < r; ++i) T(i, j) = rng.normal();

    double lambda = cfg.lambda_auto ? -1.0 : cfg.lambda;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::MatrixXd WT;
    out.converged = false;
    double prev_residual = std::numeric_limits<double>::infinity();
    for (int t = 1; t <= cfg.max_iterations; ++t) {
        Eigen::MatrixXd base = M - S;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(base * T.transpose());
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, r);
        T = Q.transpose() * base;
        WT = Q * T;
        if (lambda < 0.0) lambda = 0.1 * (M - WT).cwiseAbs().maxCoeff();
        S = shrink(M - WT, lambda);
        out.iterations = t;
        out.residual = (M - WT - S).norm() / normM;
        if (std::abs(prev_residual - out.residual) < 1e-12 || out.residual <= cfg.beta) {
            out.converged = true;
            break;
        }
        prev_residual = out.residual;
    }
    out.E = std::move(WT);
    out.S = std::move(S);
    out.sparsity = sparsity_fraction(out.S);
    return out;
}

CompletionResult matrix_complete(const Eigen::MatrixXd& M,
                                 const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask,
                                 const SolverConfig& cfg) {
    const int rows = static_cast<int>(M.rows());
    const int cols = static_cast<int>(M.cols());
    if (mask.rows() != rows || mask.cols() != cols)
        throw invalid("matrix_complete: mask shape mismatch");
    for (int i = 0; i < rows; ++i) {
        bool any = false;
        for (int j = 0; j < cols; ++j) any = any || mask(i, j);
        if (!any) throw invalid("matrix_complete: row " + std::to_string(i) + " has no observation");
    }

    CompletionResult out;
    double normM = M.norm();
    if (normM == 0.0) {
        out.E = Eigen::MatrixXd::Zero(rows, cols);
        out.iterations = 1;
        return out;
    }

    const int k = cols;
    int n_lambda = std::max(1, static_cast<int>(std::floor(0.5 * k)));
    const int cap = std::max(n_lambda, static_cast<int>(std::floor(0.75 * k)));
    // start the SVT threshold at twice the spectral norm so E grows from rank
    // zero along the nuclear-norm path; a large mu0 freezes the zero-filled
    // matrix's spurious spectrum into E
    double sigma1 = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()[0];
    double mu = cfg.mu > 0.0 ? cfg.mu : 1.0 / (2.0 * sigma1);
    const double mu_cap = mu * 1e14;
    double rho = cfg.rho > 1.0 ? cfg.rho : 1.1;
    double eps = cfg.beta;

    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(rows, cols);
    out.converged = false;
    double prev_residual = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int t = 1; t <= cfg.max_iterations; ++t) {
        Eigen::VectorXd sv;
        E = svt(M - S + Y / mu, 1.0 / mu, n_lambda, &sv);
        // S carries the filler for unobserved entries only
        Eigen::MatrixXd target = M - E + Y / mu;
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) S(i, j) = mask(i, j) ? 0.0 : target(i, j);
        Eigen::MatrixXd residual = M - E - S;
        Y += mu * residual;
        mu = std::min(mu * rho, mu_cap);
        out.iterations = t;
        out.rank_schedule.push_back(n_lambda);
        out.residual = residual.norm() / normM;
        if (out.residual < eps) {
            out.converged = true;
            break;
        }
        // progressive growth: add a singular value while the spectrum still decays
        if (n_lambda < cap && n_lambda >= 2 && n_lambda <= sv.size() && sv[n_lambda - 2] > 0.0) {
            double ratio = sv[n_lambda - 1] / sv[n_lambda - 2];
            if (ratio <= 0.995) n_lambda = std::min(n_lambda + 1, cap);
        } else if (n_lambda < cap && n_lambda < 2) {
            n_lambda = std::min(n_lambda + 1, cap);
        }
        if (std::abs(prev_residual - out.residual) < 1e-14 * std::max(1.0, out.residual)) {
            if (++stalled >= 10) break; // plateau under the hard rank cap
        } else {
            stalled = 0;
        }
        prev_residual = out.residual;
    }
    out.E = std::move(E);
    return out;
}

} // namespace geom
