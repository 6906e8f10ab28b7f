#include "geom/eval.hpp"

#include "geom/knn.hpp"
#include "geom/rng.hpp"

#include <algorithm>
#include <cmath>

namespace geom {

namespace {

constexpr double kRadToDeg = 57.29577951308232;

// Geometric Laplacian with inverse-distance weights over the 1-ring.
Eigen::MatrixXd geometric_laplacian(const Mesh& mesh,
                                    const std::vector<std::vector<int>>& adj) {
    const int n = mesh.vertex_count();
    Eigen::MatrixXd gl(n, 3);
    for (int i = 0; i < n; ++i) {
        if (adj[i].empty()) {
            gl.row(i).setZero();
            continue;
        }
        Vec3 acc = Vec3::Zero();
        double wsum = 0.0;
        for (int j : adj[i]) {
            double d = (mesh.vertices[i] - mesh.vertices[j]).norm();
            double w = d > 1e-300 ? 1.0 / d : 1e300;
            acc += w * mesh.vertices[j];
            wsum += w;
        }
        gl.row(i) = (mesh.vertices[i] - acc / wsum).transpose();
    }
    return gl;
}

} // namespace

MetricReport metrics(const Mesh& reference, const Mesh& candidate) {
    MetricReport out;
    out.n = candidate.vertex_count();
    out.n_f = candidate.face_count();

    // HD: mean over candidate vertices of nearest reference vertex distance
    KnnIndex ref_index(reference.vertices);
    double hd = 0.0;
    out.per_vertex_error.resize(candidate.vertex_count());
    for (int i = 0; i < candidate.vertex_count(); ++i) {
        int j = ref_index.nearest(candidate.vertices[i]);
        double d = (candidate.vertices[i] - reference.vertices[j]).norm();
        out.per_vertex_error[i] = d;
        hd += d;
    }
    out.hd = candidate.vertex_count() > 0 ? hd / candidate.vertex_count() : 0.0;

    const bool matched = reference.vertex_count() == candidate.vertex_count() &&
                         reference.faces == candidate.faces;
    if (!matched) {
        if (reference.faces != candidate.faces && reference.vertex_count() == candidate.vertex_count())
            throw invalid("metrics: theta/NMSVE need identical connectivity");
        return out; // HD-only report for meshes without correspondence
    }

    SurfaceFrames ref_sf = surface_frames(reference);
    SurfaceFrames cand_sf = surface_frames(candidate);
    double angle_sum = 0.0;
    for (int f = 0; f < reference.face_count(); ++f) {
        double c = std::clamp(ref_sf.face_normals[f].dot(cand_sf.face_normals[f]), -1.0, 1.0);
        angle_sum += std::acos(c) * kRadToDeg;
    }
    out.theta_deg = reference.face_count() > 0 ? angle_sum / reference.face_count() : 0.0;

    auto adj = vertex_adjacency(reference);
    Eigen::MatrixXd gl_ref = geometric_laplacian(reference, adj);
    Eigen::MatrixXd gl_cand = geometric_laplacian(candidate, adj);
    double acc = 0.0;
    for (int i = 0; i < reference.vertex_count(); ++i) {
        acc += (reference.vertices[i] - candidate.vertices[i]).norm();
        acc += (gl_ref.row(i) - gl_cand.row(i)).norm();
    }
    out.nmsve = acc / (2.0 * reference.vertex_count());
    return out;
}

Mesh add_noise(const Mesh& mesh, const NoiseSpec& spec) {
    if (spec.sigma_e < 0.0) throw invalid("add_noise: sigma_e must be >= 0");
    Mesh out = mesh;
    if (spec.sigma_e == 0.0) return out;

    const double scale = spec.sigma_e * mesh.mean_edge_length();
    Rng rng(spec.seed);
    switch (spec.kind) {
    case NoiseKind::GaussianAlongNormals: {
        SurfaceFrames sf = surface_frames(mesh);
        for (int i = 0; i < out.vertex_count(); ++i)
            out.vertices[i] += sf.vertex_normals[i] * (scale * rng.normal());
        break;
    }
    case NoiseKind::Impulsive: {
        for (int i = 0; i < out.vertex_count(); ++i) {
            double pick = rng.uniform();
            Vec3 d(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            if (pick < spec.impulsive_fraction) out.vertices[i] += 3.0 * scale * d;
        }
        break;
    }
    case NoiseKind::Uniform: {
        for (int i = 0; i < out.vertex_count(); ++i) {
            Vec3 d(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            out.vertices[i] += scale * d;
        }
        break;
    }
    case NoiseKind::SpatialMask: {
        SurfaceFrames sf = surface_frames(mesh);
        std::vector<bool> in_mask(mesh.vertex_count(), false);
        for (int v : spec.mask) {
            if (v < 0 || v >= mesh.vertex_count()) throw invalid("add_noise: mask index out of range");
            in_mask[v] = true;
        }
        for (int i = 0; i < out.vertex_count(); ++i) {
            double eps = scale * rng.normal(); // consume the stream uniformly
            if (in_mask[i]) out.vertices[i] += sf.vertex_normals[i] * eps;
        }
        break;
    }
    }
    return out;
}

std::vector<double> heatmap_field(const Mesh& reference, const Mesh& candidate, HeatmapMode mode) {
    if (reference.vertex_count() != candidate.vertex_count())
        throw invalid("heatmap_field: vertex count mismatch");
    const int n = reference.vertex_count();
    std::vector<double> field(n, 0.0);
    if (mode == HeatmapMode::Position) {
        for (int i = 0; i < n; ++i)
            field[i] = (reference.vertices[i] - candidate.vertices[i]).norm();
    } else {
        if (reference.faces != candidate.faces)
            throw invalid("heatmap_field: normal mode needs identical connectivity");
        SurfaceFrames rs = surface_frames(reference);
        SurfaceFrames cs = surface_frames(candidate);
        std::vector<double> acc(n, 0.0);
        std::vector<int> count(n, 0);
        for (int f = 0; f < reference.face_count(); ++f) {
            double c = std::clamp(rs.face_normals[f].dot(cs.face_normals[f]), -1.0, 1.0);
            double angle = std::acos(c) * kRadToDeg;
            for (int v : reference.faces[f]) {
                acc[v] += angle;
                ++count[v];
            }
        }
        for (int i = 0; i < n; ++i) field[i] = count[i] > 0 ? acc[i] / count[i] : 0.0;
    }
    double mx = *std::max_element(field.begin(), field.end());
    if (mx > 0.0)
        for (double& v : field) v /= mx;
    return field;
}

double nmsve_db(double nmsve) { return 10.0 * std::log10(std::max(nmsve, 1e-300)); }

} // namespace geom
