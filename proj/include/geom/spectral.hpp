#pragma once

#include "geom/graph.hpp"

#include <optional>

namespace geom {

/// Orthonormal low-frequency basis of a Laplacian. Columns are eigenvector
/// approximations sorted by ascending eigenvalue; each column is sign-fixed so
/// its first entry with |value| > 1e-9 is positive.
struct SpectralBasis {
    Eigen::MatrixXd U;      // n x m, orthonormal columns
    Eigen::VectorXd lambda; // ascending
    int size() const { return static_cast<int>(U.cols()); }
};

struct TrackerOptions {
    int zeta = 1;         // power of T = (L + delta I)^-1 per iteration
    int t_max = 2000;     // iteration budget
    double tol = 1e-9;    // principal-angle residual between successive subspaces
    double delta = -1.0;  // shift; <= 0 picks 1e-8 * trace(L) / n
};

struct TrackerResult {
    SpectralBasis basis;
    int iterations = 0;
    bool converged = false;
    bool clamped = false;          // DOI hit a size bound
    double final_residual = 0.0;   // DOI: ||r||_2 at termination
    std::vector<int> size_history; // DOI: n_l per iteration
};

/// Dense cap for full decompositions.
inline constexpr int kDenseEigCap = 5000;

/// m smallest eigenpairs (m < 0 means all). Dense path for n <= cap, tracked
/// orthogonal iterations for larger partial requests.
SpectralBasis eigendecompose(const SparseGraph& graph, int m = -1);

/// Graph Fourier transform and inverse.
Eigen::MatrixXd gft(const SpectralBasis& basis, const Eigen::MatrixXd& signal);
Eigen::MatrixXd igft(const SpectralBasis& basis, const Eigen::MatrixXd& coefficients);

/// Projection onto the n_l lowest-frequency columns.
Eigen::MatrixXd lowpass_project(const SpectralBasis& basis, int n_l,
                                const Eigen::MatrixXd& signal);

/// Deterministic orthonormal start for a tracker chain.
Eigen::MatrixXd random_orthonormal(int rows, int cols, std::uint64_t seed);
/// Resize an orthonormal basis: shrink keeps leading columns, growth appends
/// seeded random directions re-orthonormalized against the rest.
Eigen::MatrixXd resize_orthonormal(const Eigen::MatrixXd& U, int cols, std::uint64_t seed);

/// Orthogonal iterations toward the n_l lowest-frequency subspace of L.
/// `init` must have orthonormal columns (warm start from an adjacent submesh).
TrackerResult orthogonal_iterations(const SparseGraph& graph, const Eigen::MatrixXd& init,
                                    const TrackerOptions& opts = {});

/// Residual-driven subspace sizing (DOI): grow while ||r|| > eps_h, shrink
/// while ||r|| < eps_l, stop inside [eps_l, eps_h]. `signal` holds the x,y,z
/// coordinate columns of the submesh.
TrackerResult dynamic_orthogonal_iterations(const SparseGraph& graph, const Eigen::MatrixXd& init,
                                            const Eigen::MatrixXd& signal, double eps_l,
                                            double eps_h, const TrackerOptions& opts = {});

/// Largest principal angle (radians) between the column spaces of A and B.
double max_principal_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

} // namespace geom
