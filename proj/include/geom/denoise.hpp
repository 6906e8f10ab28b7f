#pragma once

#include "geom/graph.hpp"
#include "geom/partition.hpp"
#include "geom/spectral.hpp"

namespace geom {

enum class FaceClass : std::uint8_t { Flat = 0, Edge = 1, Corner = 2 };

struct FeatureLabels {
    std::vector<FaceClass> face_class;
    std::vector<bool> feature; // corner or edge
    bool degenerate = false;   // single tight cluster, everything flat
};

/// Per-face k-NN normal covariance eigenvalues + 3-class k-means. Clusters are
/// ordered by eigenvalue spread: widest = flat (one dominant direction),
/// narrowest = corner (isotropic).
FeatureLabels classify_features(const Mesh& mesh, int k_patch = 20);

struct GuidedField {
    std::vector<Vec3> guided; // unit normals
    std::vector<int> patch_of; // chosen ideal patch (anchor face id) per face
};

/// For each face, among candidate k-NN patches containing it, pick the one
/// minimizing (lambda2 - lambda1) * max normal deviation; guided normal is the
/// area-weighted mean of the winner's normals.
GuidedField guided_normals(const Mesh& mesh, int k_patch = 20);

/// Noise variance estimate: smallest eigenvalue of the mean centered patch
/// covariance over n_t k-NN patches of size patch_size.
double estimate_noise_variance(const Mesh& mesh, int patch_count = 64, int patch_size = 32);

struct CoarseOptions {
    int target_part_size = 600;
    double overlap_factor = 1.15; // n_d = overlap_factor * max pre-overlap size
    int em_budget = 5;            // b inner EM updates per size adjustment
    int max_adjustments = 60;     // outer n_l +/- 1 steps per axis
    double tolerance_factor = 0.05; // eps = factor * sigma_z^2
    std::uint64_t seed = 0;
    int zeta = 4;
};

struct CoarseResult {
    Mesh mesh;
    double noise_variance = 0.0;
    bool skipped_clean = false;    // input judged noise-free
    bool em_fallback = false;      // EM diverged somewhere, lowpass used
    std::vector<int> oi_iterations; // per submesh, warm-start telemetry
    std::vector<int> subspace_sizes; // final n_l per submesh (x axis)
};

/// Coarse spectral smoothing: per overlapped submesh and axis, Bayesian
/// subspace-size search with EM-updated noise model, reconstruction U_{n_l} H,
/// degree-weighted merge.
CoarseResult coarse_denoise(const Mesh& mesh, const CoarseOptions& opts = {});

struct FineOptions {
    double sigma_s = 0.3; // normal-similarity kernel width
    int zeta = 10;        // smoothing power on the normal graph
    int u_iter = 15;      // vertex update iterations
    int k_patch = 20;
};

/// Paper presets: Set 1 for scanned meshes, Set 2 for CAD meshes.
FineOptions fine_preset_scanned(); // sigma_s=1, zeta=3, u_iter=5
FineOptions fine_preset_cad();     // sigma_s=0.3, zeta=10, u_iter=15

/// Feature-aware guided-normal smoothing and vertex update. When a guided
/// field is supplied, patch scores and similarity weights use the guided
/// normals as the robust reference instead of the raw face normals.
Mesh fine_denoise(const Mesh& mesh, const FeatureLabels& features, const FineOptions& opts = {},
                  const GuidedField* guided = nullptr);

/// Update vertices toward the given face normals (gradient descent on the
/// normal-consistency energy), iterations sweeps.
Mesh update_vertices_from_normals(const Mesh& mesh, const std::vector<Vec3>& face_normals,
                                  int iterations);

/// Energy the vertex update descends: sum over faces of |<n_c, c - v>|^2 over
/// incident vertices.
double normal_consistency_energy(const Mesh& mesh, const std::vector<Vec3>& face_normals);

struct BilateralOptions {
    int k = 7;
    double sigma1 = -1.0; // <= 0: per-point mean neighbor distance
    double sigma2 = -1.0; // <= 0: 0.5 * sigma1
    int iterations = 1;
};

/// Bilateral point-cloud filtering along (estimated) normals.
std::vector<Vec3> bilateral_point_denoise(const std::vector<Vec3>& points,
                                          const std::vector<Vec3>* normals,
                                          const BilateralOptions& opts = {});

struct DynamicDenoiseOptions {
    double energy_keep = 0.9999; // low band holds this fraction of GFT energy
    int godec_rank = -1;         // < 0: min(ceil(n_s/4), 10)
    double godec_lambda = -1.0;  // < 0: auto
};

struct DynamicDenoiseResult {
    FrameSequence frames;
    int n_h = 0;                  // shared high-band width
    std::vector<int> n_h_per_frame;
    bool fallback_lowpass = false; // too few frames for low-rank structure
    bool identical_highband = false; // warning: per-frame high bands near-identical
};

/// Dynamic-mesh denoising: shared frame-1 basis, per-frame GFT, GoDec on the
/// stacked high-frequency coefficients, per-frame splice and inverse GFT.
DynamicDenoiseResult denoise_dynamic(const FrameSequence& seq,
                                     const DynamicDenoiseOptions& opts = {});

} // namespace geom
