#include "geom/spectral.hpp"

#include "geom/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace geom {

namespace {

void fix_signs(Eigen::MatrixXd& U) {
    for (int c = 0; c < U.cols(); ++c) {
        for (int r = 0; r < U.rows(); ++r) {
            if (std::abs(U(r, c)) > 1e-9) {
                if (U(r, c) < 0.0) U.col(c) = -U.col(c);
                break;
            }
        }
    }
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& X) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(X.rows(), X.cols());
    // keep a deterministic orientation: diagonal of R nonnegative
    Eigen::MatrixXd r = qr.matrixQR().topRows(X.cols()).triangularView<Eigen::Upper>();
    for (int c = 0; c < X.cols(); ++c)
        if (r(c, c) < 0.0) q.col(c) = -q.col(c);
    return q;
}

// 1e-2 * mean degree. Any positive shift keeps T's eigenvectors and their
// ordering; the size only controls numerics. The subspace noise per iteration
// scales like eps * cond(L + delta I) * (lambda_boundary / delta), so a tiny
// shift (1e-8 scale) floors the subspace change near 1e-7 and the 1e-9
// convergence tolerance becomes unreachable.
double default_delta(const SparseGraph& graph) {
    double tr = 0.0;
    for (int i = 0; i < graph.size(); ++i) tr += graph.degrees[i];
    return 1e-2 * tr / std::max(1, graph.size());
}

struct ShiftedSolver {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

    ShiftedSolver(const SparseGraph& graph, double delta) {
        Eigen::SparseMatrix<double> shifted = graph.laplacian;
        Eigen::SparseMatrix<double> eye(graph.size(), graph.size());
        eye.setIdentity();
        shifted += delta * eye;
        ldlt.compute(shifted);
        if (ldlt.info() != Eigen::Success)
            throw solver_error("factorization of L + delta*I failed");
    }

    // X <- T^zeta X with T = (L + delta I)^-1, never forming T
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X, int zeta) const {
        Eigen::MatrixXd Y = X;
        for (int i = 0; i < zeta; ++i) Y = ldlt.solve(Y);
        return Y;
    }
};

// Rayleigh-Ritz: rotate an orthonormal Q so its columns align with the Ritz
// vectors of L in the span, ascending Ritz value. Returns the Ritz values.
Eigen::VectorXd rayleigh_ritz(const SparseGraph& graph, Eigen::MatrixXd& Q) {
    Eigen::MatrixXd B = Q.transpose() * (graph.laplacian * Q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (B + B.transpose()));
    Q = (Q * es.eigenvectors()).eval();
    return es.eigenvalues();
}

} // namespace

SpectralBasis eigendecompose(const SparseGraph& graph, int m) {
    const int n = graph.size();
    if (n == 0) throw invalid("eigendecompose: empty graph");
    const bool full = m < 0 || m >= n;
    if (full && n > kDenseEigCap)
        throw invalid("eigendecompose: full decomposition beyond the dense cap (" +
                      std::to_string(kDenseEigCap) + "); request a partial basis");

    if (n <= kDenseEigCap) {
        Eigen::MatrixXd dense(graph.laplacian);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
        if (solver.info() != Eigen::Success) throw solver_error("dense eigensolver failed");
        int keep = full ? n : m;
        SpectralBasis basis;
        basis.U = solver.eigenvectors().leftCols(keep);
        basis.lambda = solver.eigenvalues().head(keep);
        fix_signs(basis.U);
        return basis;
    }

    // large partial request: track the subspace with orthogonal iterations
    TrackerOptions opts;
    opts.zeta = 4;
    TrackerResult res = orthogonal_iterations(graph, random_orthonormal(n, m, 12345), opts);
    if (!res.converged)
        throw solver_error("eigendecompose: orthogonal iterations did not converge");
    return std::move(res.basis);
}

Eigen::MatrixXd gft(const SpectralBasis& basis, const Eigen::MatrixXd& signal) {
    if (signal.rows() != basis.U.rows()) throw invalid("gft: signal row count mismatch");
    return basis.U.transpose() * signal;
}

Eigen::MatrixXd igft(const SpectralBasis& basis, const Eigen::MatrixXd& coefficients) {
    if (coefficients.rows() != basis.U.cols()) throw invalid("igft: coefficient count mismatch");
    return basis.U * coefficients;
}

Eigen::MatrixXd lowpass_project(const SpectralBasis& basis, int n_l,
                                const Eigen::MatrixXd& signal) {
    if (n_l < 1) throw invalid("lowpass_project: n_l must be at least 1");
    if (n_l > basis.size()) throw invalid("lowpass_project: n_l exceeds available basis");
    if (signal.rows() != basis.U.rows()) throw invalid("lowpass_project: row count mismatch");
    auto sub = basis.U.leftCols(n_l);
    return sub * (sub.transpose() * signal);
}

Eigen::MatrixXd random_orthonormal(int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd X(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) X(r, c) = rng.normal();
    return orthonormalize(X);
}

Eigen::MatrixXd resize_orthonormal(const Eigen::MatrixXd& U, int cols, std::uint64_t seed) {
    if (cols <= U.cols()) return U.leftCols(cols);
    Rng rng(seed);
    Eigen::MatrixXd X(U.rows(), cols);
    X.leftCols(U.cols()) = U;
    for (int c = static_cast<int>(U.cols()); c < cols; ++c)
        for (int r = 0; r < U.rows(); ++r) X(r, c) = rng.normal();
    return orthonormalize(X);
}

// sin of the largest principal angle, via the residual of B projected onto
// span(A). Computing acos(sigma_min) instead floors near sqrt(eps) ~ 1e-8
// because 1 - sigma cancels; the residual form resolves angles down to ~1e-14.
static double subspace_sin(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd R = B - A * (A.transpose() * B);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
    return std::clamp(svd.singularValues().maxCoeff(), 0.0, 1.0);
}

double max_principal_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    return std::asin(subspace_sin(A, B));
}

TrackerResult orthogonal_iterations(const SparseGraph& graph, const Eigen::MatrixXd& init,
                                    const TrackerOptions& opts) {
    const int n = graph.size();
    if (init.rows() != n) throw invalid("orthogonal_iterations: init row count mismatch");
    double delta = opts.delta > 0.0 ? opts.delta : default_delta(graph);
    ShiftedSolver solver(graph, delta);

    TrackerResult out;
    Eigen::MatrixXd U = init;
    Eigen::VectorXd lambda;
    for (int t = 1; t <= opts.t_max; ++t) {
        Eigen::MatrixXd next = orthonormalize(solver.apply(U, opts.zeta));
        lambda = rayleigh_ritz(graph, next);
        out.iterations = t;
        double change = subspace_sin(U, next);
        U = next;
        if (change < opts.tol) {
            out.converged = true;
            break;
        }
    }
    if (lambda.size() == 0) lambda = rayleigh_ritz(graph, U);
    fix_signs(U);
    out.basis.U = std::move(U);
    out.basis.lambda = std::move(lambda);
    return out;
}

TrackerResult dynamic_orthogonal_iterations(const SparseGraph& graph, const Eigen::MatrixXd& init,
                                            const Eigen::MatrixXd& signal, double eps_l,
                                            double eps_h, const TrackerOptions& opts) {
    const int n = graph.size();
    if (!(eps_l < eps_h)) throw invalid("dynamic OI: eps_l must be below eps_h");
    if (init.rows() != n || signal.rows() != n)
        throw invalid("dynamic OI: row count mismatch");
    double delta = opts.delta > 0.0 ? opts.delta : default_delta(graph);
    ShiftedSolver solver(graph, delta);

    TrackerResult out;
    Eigen::MatrixXd U = init;
    Eigen::VectorXd lambda;
    Eigen::VectorXd summed = signal.rowwise().sum();
    for (int t = 1; t <= opts.t_max; ++t) {
        U = orthonormalize(solver.apply(U, opts.zeta));
        lambda = rayleigh_ritz(graph, U);
        out.iterations = t;
        Eigen::VectorXd r = summed - U * (U.transpose() * summed);
        double rnorm = r.norm();
        out.final_residual = rnorm;
        out.size_history.push_back(static_cast<int>(U.cols()));
        if (rnorm > eps_h) {
            if (U.cols() + 1 >= n) {
                out.clamped = true;
                break;
            }
            // the residual is orthogonal to span(U) already
            Eigen::MatrixXd grown(n, U.cols() + 1);
            grown.leftCols(U.cols()) = U;
            grown.col(U.cols()) = r / rnorm;
            U = grown;
        } else if (rnorm < eps_l) {
            if (U.cols() <= 1) {
                out.clamped = true;
                break;
            }
            // shrink only if the smaller subspace does not shoot past the
            // band, otherwise grow/shrink oscillates forever
            Eigen::MatrixXd smaller = U.leftCols(U.cols() - 1);
            double after = (summed - smaller * (smaller.transpose() * summed)).norm();
            if (after > eps_h) {
                out.clamped = true; // band unreachable at any size
                break;
            }
            U = smaller.eval();
        } else {
            out.converged = true;
            break;
        }
    }
    if (lambda.size() != U.cols()) lambda = rayleigh_ritz(graph, U);
    fix_signs(U);
    out.basis.U = std::move(U);
    out.basis.lambda = std::move(lambda);
    return out;
}

} // namespace geom
