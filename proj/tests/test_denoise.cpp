#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "geom/denoise.hpp"
#include "geom/eval.hpp"
#include "geom/knn.hpp"
#include "support/shapes.hpp"

using namespace geom;

namespace {

// ridge: two planes meeting along y = 0 at a dihedral angle
Mesh ridge_mesh(int nx = 20, int ny = 20, double slope = 1.0) {
    Mesh m = testing::grid_plane(nx, ny);
    for (Vec3& v : m.vertices) v.z() = -slope * std::abs(v.y() - 0.5);
    m.name = "ridge";
    return m;
}

} // namespace

TEST_CASE("classify_features: cube corners/edges/flats match brute-force eigen inspection") {
    Mesh cube = testing::cube(6);
    FeatureLabels labels = classify_features(cube, 20);
    REQUIRE(!labels.degenerate);

    // oracle: the k=20 patch of a face reaches roughly one grid cell (1/6)
    // beyond it, so a face sees a cube edge iff its centroid sits within 0.17
    // of that border. Corner faces see two borders of their side, edge faces
    // one, interior faces none.
    SurfaceFrames sf = surface_frames(cube);
    for (int f = 0; f < cube.face_count(); ++f) {
        Vec3 c = sf.centroids[f];
        int near_border = 0;
        for (int axis = 0; axis < 3; ++axis) {
            if (std::abs(c[axis] - 0.5) > 0.49) continue; // the side's own plane
            if (std::min(c[axis], 1.0 - c[axis]) < 0.17) ++near_border;
        }
        FaceClass expect = near_border >= 2   ? FaceClass::Corner
                           : near_border == 1 ? FaceClass::Edge
                                              : FaceClass::Flat;
        CHECK(labels.face_class[f] == expect);
    }
}

TEST_CASE("classify_features: sphere and plane are all flat") {
    FeatureLabels sphere = classify_features(testing::icosphere(3), 20);
    for (bool f : sphere.feature) CHECK(!f);
    FeatureLabels plane = classify_features(testing::grid_plane(15, 15), 20);
    for (bool f : plane.feature) CHECK(!f);
}

TEST_CASE("classify_features: labels are rigid-motion invariant") {
    Mesh m = testing::cube(5);
    FeatureLabels before = classify_features(m, 20);
    Eigen::Matrix3d rot = Eigen::AngleAxisd(0.83, Vec3(1, 2, -1).normalized()).toRotationMatrix();
    for (Vec3& v : m.vertices) v = rot * v + Vec3(3, -2, 7);
    FeatureLabels after = classify_features(m, 20);
    CHECK(before.face_class == after.face_class);
}

TEST_CASE("guided_normals: plane exact, noisy plane beats raw normals, ridge side purity") {
    Mesh plane = testing::grid_plane(15, 15);
    GuidedField flat = guided_normals(plane, 20);
    for (const Vec3& g : flat.guided) {
        CHECK((g - Vec3(0, 0, 1)).norm() < 1e-12);
        CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-9));
    }

    Mesh noisy = add_noise(plane, {NoiseKind::GaussianAlongNormals, 0.3, 21});
    GuidedField gf = guided_normals(noisy, 20);
    SurfaceFrames nsf = surface_frames(noisy);
    int improved = 0;
    for (int f = 0; f < noisy.face_count(); ++f) {
        double ag = std::acos(std::clamp(gf.guided[f].dot(Vec3(0, 0, 1)), -1.0, 1.0));
        double ar = std::acos(std::clamp(nsf.face_normals[f].dot(Vec3(0, 0, 1)), -1.0, 1.0));
        if (ag <= ar) ++improved;
    }
    CHECK(static_cast<double>(improved) / noisy.face_count() >= 0.95);

    // dihedral ridge: guided normals stay on their own side
    Mesh ridge = ridge_mesh();
    GuidedField rg = guided_normals(ridge, 12);
    SurfaceFrames rsf = surface_frames(ridge);
    Vec3 up_side = Vec3(0, 1, 1).normalized();   // y > 0.5 slope
    Vec3 down_side = Vec3(0, -1, 1).normalized(); // y < 0.5 slope
    for (int f = 0; f < ridge.face_count(); ++f) {
        double y = rsf.centroids[f].y();
        if (std::abs(y - 0.5) < 0.1) continue; // skip the crease strip itself
        Vec3 own = y > 0.5 ? up_side : down_side;
        Vec3 cross = y > 0.5 ? down_side : up_side;
        CHECK(rg.guided[f].dot(own) > rg.guided[f].dot(cross));
        // never the cross-edge average: angle to own side stays small
        CHECK(rg.guided[f].dot(own) > 0.99);
    }

    // exhaustive candidate enumeration oracle: chosen patch attains the
    // minimal a_j * b_ij score among all candidates of the face
    SurfaceFrames sf2 = surface_frames(ridge);
    KnnIndex centroid_index(sf2.centroids);
    const int k_patch = 12;
    std::vector<std::vector<int>> patches(ridge.face_count());
    for (int j = 0; j < ridge.face_count(); ++j) {
        patches[j].push_back(j);
        auto nn = centroid_index.query(j, k_patch - 1);
        patches[j].insert(patches[j].end(), nn.begin(), nn.end());
    }
    for (int i = 0; i < ridge.face_count(); i += 37) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < ridge.face_count(); ++j) {
            if (std::find(patches[j].begin(), patches[j].end(), i) == patches[j].end()) continue;
            Eigen::Matrix3d R = Eigen::Matrix3d::Zero();
            for (int l : patches[j]) R += sf2.face_normals[l] * sf2.face_normals[l].transpose();
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(R);
            double a = std::abs(es.eigenvalues()[1] - es.eigenvalues()[0]);
            double b = 0.0;
            for (int l : patches[j])
                b = std::max(b, (sf2.face_normals[i] - sf2.face_normals[l]).norm());
            best = std::min(best, a * b);
        }
        Eigen::Matrix3d R = Eigen::Matrix3d::Zero();
        for (int l : patches[rg.patch_of[i]])
            R += sf2.face_normals[l] * sf2.face_normals[l].transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(R);
        double a = std::abs(es.eigenvalues()[1] - es.eigenvalues()[0]);
        double b = 0.0;
        for (int l : patches[rg.patch_of[i]])
            b = std::max(b, (sf2.face_normals[i] - sf2.face_normals[l]).norm());
        CHECK(a * b == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("estimate_noise: planar zero, known sigma within 25%, monotone sweep") {
    Mesh plane = testing::grid_plane(40, 40);
    double clean = estimate_noise_variance(plane);
    CHECK(clean < 1e-10 * plane.bbox_diagonal() * plane.bbox_diagonal());

    double ell = plane.mean_edge_length();
    double prev = -1.0;
    for (double sigma_e : {0.1, 0.2, 0.4}) {
        Mesh noisy = add_noise(plane, {NoiseKind::GaussianAlongNormals, sigma_e, 33});
        double est = std::sqrt(estimate_noise_variance(noisy));
        double truth = sigma_e * ell;
        if (sigma_e == 0.2) CHECK(est == doctest::Approx(truth).epsilon(0.25));
        CHECK(est > prev);
        prev = est;
    }
}

TEST_CASE("coarse_denoise: noiseless input passes through, noisy CAD improves theta") {
    Mesh cad = testing::cad_dodecahedron(2);
    CoarseOptions opts;
    opts.target_part_size = 300;

    CoarseResult clean = coarse_denoise(cad, opts);
    CHECK(clean.skipped_clean);
    double bbox = cad.bbox_diagonal();
    for (int i = 0; i < cad.vertex_count(); ++i)
        CHECK((clean.mesh.vertices[i] - cad.vertices[i]).norm() < 1e-6 * bbox);

    Mesh noisy = add_noise(cad, {NoiseKind::GaussianAlongNormals, 0.7, 4});
    CoarseResult coarse = coarse_denoise(noisy, opts);
    CHECK(coarse.mesh.vertex_count() == cad.vertex_count());
    CHECK(coarse.mesh.faces == cad.faces);
    double theta_noisy = metrics(cad, noisy).theta_deg;
    double theta_coarse = metrics(cad, coarse.mesh).theta_deg;
    CHECK(theta_coarse < theta_noisy);

    // warm-started parts converge in fewer OI iterations than the cold first part
    if (coarse.oi_iterations.size() >= 2) {
        double later = 0.0;
        for (size_t i = 1; i < coarse.oi_iterations.size(); ++i) later += coarse.oi_iterations[i];
        later /= static_cast<double>(coarse.oi_iterations.size() - 1);
        CHECK(later < coarse.oi_iterations.front());
    }
}

TEST_CASE("vertex update: ground-truth normals repair a noisy cube to under 1 degree") {
    Mesh cube = testing::cube(6);
    SurfaceFrames truth = surface_frames(cube);
    Mesh noisy = add_noise(cube, {NoiseKind::GaussianAlongNormals, 0.3, 9});
    Mesh repaired = update_vertices_from_normals(noisy, truth.face_normals, 20);
    CHECK(metrics(cube, repaired).theta_deg < 1.0);
}

TEST_CASE("vertex update: clean mesh moves less than 1e-3 edge lengths per sweep") {
    Mesh m = testing::icosphere(2);
    SurfaceFrames sf = surface_frames(m);
    Mesh once = update_vertices_from_normals(m, sf.face_normals, 1);
    double ell = m.mean_edge_length();
    for (int i = 0; i < m.vertex_count(); ++i)
        CHECK((once.vertices[i] - m.vertices[i]).norm() < 1e-3 * ell);
}

TEST_CASE("vertex update energy is nonincreasing across iterations") {
    Mesh cube = testing::cube(5);
    SurfaceFrames truth = surface_frames(cube);
    Mesh noisy = add_noise(cube, {NoiseKind::GaussianAlongNormals, 0.4, 13});
    Mesh cur = noisy;
    double prev = normal_consistency_energy(cur, truth.face_normals);
    for (int it = 0; it < 8; ++it) {
        cur = update_vertices_from_normals(cur, truth.face_normals, 1);
        double e = normal_consistency_energy(cur, truth.face_normals);
        CHECK(e <= prev * (1.0 + 1e-12));
        prev = e;
    }
}

TEST_CASE("fine_denoise: zeta=0 and u_iter=0 is the identity") {
    Mesh cube = testing::cube(4);
    FeatureLabels labels = classify_features(cube, 12);
    FineOptions opts;
    opts.zeta = 0;
    opts.u_iter = 0;
    opts.k_patch = 12;
    Mesh out = fine_denoise(cube, labels, opts);
    for (int i = 0; i < cube.vertex_count(); ++i)
        CHECK((out.vertices[i] - cube.vertices[i]).norm() == 0.0);
}

TEST_CASE("fine presets match the published parameter sets") {
    FineOptions scanned = fine_preset_scanned();
    CHECK(scanned.sigma_s == 1.0);
    CHECK(scanned.zeta == 3);
    CHECK(scanned.u_iter == 5);
    FineOptions cad = fine_preset_cad();
    CHECK(cad.sigma_s == 0.3);
    CHECK(cad.zeta == 10);
    CHECK(cad.u_iter == 15);
}

TEST_CASE("bilateral points: noiseless plane is a fixed point, noisy plane flattens 2x") {
    Mesh plane = testing::grid_plane(25, 25);
    BilateralOptions opts;
    SurfaceFrames sf = surface_frames(plane);
    auto still = bilateral_point_denoise(plane.vertices, &sf.vertex_normals, opts);
    for (size_t i = 0; i < still.size(); ++i)
        CHECK((still[i] - plane.vertices[i]).norm() < 1e-9);

    Mesh noisy = add_noise(plane, {NoiseKind::GaussianAlongNormals, 0.3, 31});
    opts.iterations = 3;
    auto smoothed = bilateral_point_denoise(noisy.vertices, nullptr, opts);
    auto rms_z = [](const std::vector<Vec3>& pts) {
        double acc = 0.0;
        for (const Vec3& p : pts) acc += p.z() * p.z();
        return std::sqrt(acc / pts.size());
    };
    CHECK(rms_z(noisy.vertices) / rms_z(smoothed) >= 2.0);
}

TEST_CASE("dynamic denoise: noiseless sequence survives, energy rule holds") {
    FrameSequence seq = testing::articulated_cylinder(12);
    DynamicDenoiseResult res = denoise_dynamic(seq);
    CHECK(!res.fallback_lowpass);
    double bbox = seq.frames[0].bbox_diagonal();
    for (int f = 0; f < seq.frame_count(); ++f)
        for (int i = 0; i < seq.vertex_count(); ++i)
            CHECK((res.frames.frames[f].vertices[i] - seq.frames[f].vertices[i]).norm() <
                  0.02 * bbox);

    // protected low band keeps >= 99.99% of per-frame GFT energy
    SparseGraph g = build_graph(seq.frames.front());
    SpectralBasis basis = eigendecompose(g);
    for (int f = 0; f < seq.frame_count(); ++f) {
        Eigen::MatrixXd c = gft(basis, seq.frames[f].vertex_matrix());
        double total = c.bottomRows(seq.vertex_count() - 1).squaredNorm();
        double high = c.bottomRows(res.n_h_per_frame[f]).squaredNorm();
        CHECK(high <= (1.0 - 0.9999) * total * (1.0 + 1e-9));
    }
}

TEST_CASE("dynamic denoise: beats noisy baseline and equal-band lowpass per frame") {
    FrameSequence clean = testing::articulated_cylinder(30);
    FrameSequence noisy = clean;
    for (int f = 0; f < clean.frame_count(); ++f)
        noisy.frames[f] = add_noise(clean.frames[f], {NoiseKind::GaussianAlongNormals, 0.2,
                                                      1000 + static_cast<std::uint64_t>(f)});
    DynamicDenoiseResult res = denoise_dynamic(noisy);

    SparseGraph g = build_graph(clean.frames.front());
    SpectralBasis basis = eigendecompose(g);
    const int n = clean.vertex_count();
    double mean_ours = 0.0, mean_noisy = 0.0, mean_lowpass = 0.0;
    for (int f = 0; f < clean.frame_count(); ++f) {
        double t_ours = metrics(clean.frames[f], res.frames.frames[f]).theta_deg;
        double t_noisy = metrics(clean.frames[f], noisy.frames[f]).theta_deg;
        // equal-n_h independent per-frame lowpass: zero the same high band
        Eigen::MatrixXd c = gft(basis, noisy.frames[f].vertex_matrix());
        c.bottomRows(res.n_h_per_frame[f]).setZero();
        Mesh lp = clean.frames[f];
        lp.set_vertex_matrix(igft(basis, c));
        double t_lp = metrics(clean.frames[f], lp).theta_deg;
        mean_ours += t_ours;
        mean_noisy += t_noisy;
        mean_lowpass += t_lp;
        (void)n;
    }
    CHECK(mean_ours < mean_noisy);
    CHECK(mean_ours < mean_lowpass);
}

TEST_CASE("dynamic denoise: translation equivariance per frame") {
    FrameSequence seq = testing::articulated_cylinder(8);
    FrameSequence noisy = seq;
    for (int f = 0; f < seq.frame_count(); ++f)
        noisy.frames[f] = add_noise(seq.frames[f], {NoiseKind::GaussianAlongNormals, 0.15,
                                                    2000 + static_cast<std::uint64_t>(f)});
    DynamicDenoiseResult base = denoise_dynamic(noisy);

    FrameSequence shifted = noisy;
    Vec3 offset(11.0, -4.0, 2.5);
    for (auto& frame : shifted.frames)
        for (Vec3& v : frame.vertices) v += offset;
    DynamicDenoiseResult moved = denoise_dynamic(shifted);
    for (int f = 0; f < seq.frame_count(); ++f)
        for (int i = 0; i < seq.vertex_count(); ++i)
            CHECK((moved.frames.frames[f].vertices[i] - base.frames.frames[f].vertices[i] - offset)
                      .norm() < 1e-6);
}

TEST_CASE("dynamic denoise: two frames fall back to per-frame lowpass with a flag") {
    FrameSequence seq = testing::articulated_cylinder(2);
    DynamicDenoiseResult res = denoise_dynamic(seq);
    CHECK(res.fallback_lowpass);
    CHECK(res.frames.frame_count() == 2);
}

TEST_CASE("full pipeline smoothness: every produced normal field is unit length") {
    Mesh cad = testing::cad_dodecahedron(1);
    Mesh noisy = add_noise(cad, {NoiseKind::GaussianAlongNormals, 0.4, 3});
    GuidedField gf = guided_normals(noisy, 15);
    for (const Vec3& g : gf.guided) CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-9));
    SurfaceFrames sf = surface_frames(noisy);
    for (const Vec3& n : sf.face_normals) CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-9));
    for (const Vec3& n : sf.vertex_normals) CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-9));
}
