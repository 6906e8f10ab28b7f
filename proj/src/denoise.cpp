#include "geom/denoise.hpp"

#include "geom/kmeans.hpp"
#include "geom/lowrank.hpp"
#include "geom/knn.hpp"
#include "geom/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace geom {

namespace {

// patch = face itself plus its k_patch-1 nearest centroids
std::vector<std::vector<int>> face_patches(const SurfaceFrames& sf, int k_patch) {
    KnnIndex index(sf.centroids);
    std::vector<std::vector<int>> patches(sf.centroids.size());
    for (int i = 0; i < static_cast<int>(sf.centroids.size()); ++i) {
        patches[i].push_back(i);
        auto nn = index.query(i, std::min<int>(k_patch - 1, index.size() - 1));
        patches[i].insert(patches[i].end(), nn.begin(), nn.end());
    }
    return patches;
}

// ascending eigenvalues of the patch normal covariance N^T N
Eigen::Vector3d patch_eigenvalues(const std::vector<Vec3>& normals,
                                  const std::vector<int>& patch) {
    Eigen::Matrix3d R = Eigen::Matrix3d::Zero();
    for (int f : patch) R += normals[f] * normals[f].transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(R);
    return es.eigenvalues();
}

std::vector<std::vector<int>> invert_membership(const std::vector<std::vector<int>>& patches) {
    std::vector<std::vector<int>> candidates(patches.size());
    for (size_t j = 0; j < patches.size(); ++j)
        for (int member : patches[j]) candidates[member].push_back(static_cast<int>(j));
    return candidates;
}

// faces sharing an edge with each face
std::vector<std::vector<int>> face_ring(const Mesh& mesh) {
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (int f = 0; f < mesh.face_count(); ++f)
        for (int e = 0; e < 3; ++e)
            edge_faces[std::minmax(mesh.faces[f][e], mesh.faces[f][(e + 1) % 3])].push_back(f);
    std::vector<std::vector<int>> ring(mesh.face_count());
    for (auto& [edge, fs] : edge_faces)
        for (size_t a = 0; a < fs.size(); ++a)
            for (size_t b = a + 1; b < fs.size(); ++b) {
                ring[fs[a]].push_back(fs[b]);
                ring[fs[b]].push_back(fs[a]);
            }
    return ring;
}

Eigen::MatrixXd toeplitz_ar1(int n, double r) {
    Eigen::MatrixXd t(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t(i, j) = std::pow(r, std::abs(i - j));
    return t;
}

} // namespace

FeatureLabels classify_features(const Mesh& mesh, int k_patch) {
    if (k_patch < 4) throw invalid("classify_features: k_patch must be at least 4");
    SurfaceFrames sf = surface_frames(mesh);
    auto patches = face_patches(sf, k_patch);
    const int nf = mesh.face_count();

    Eigen::MatrixXd triples(nf, 3);
    for (int i = 0; i < nf; ++i) triples.row(i) = patch_eigenvalues(sf.face_normals, patches[i]);

    FeatureLabels out;
    out.face_class.assign(nf, FaceClass::Flat);
    out.feature.assign(nf, false);

    KMeansResult km = kmeans(triples, 3, 17);
    // degenerate when all cluster centers coincide (sphere/plane)
    double scale = triples.rowwise().norm().mean() + 1e-30;
    double center_span = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            center_span = std::max(center_span, (km.centers.row(a) - km.centers.row(b)).norm());
    if (center_span < 0.05 * scale) {
        out.degenerate = true;
        return out;
    }

    // eigenvalue spread orders the clusters: flat has one dominant direction,
    // a corner patch is isotropic
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return km.centers(a, 2) - km.centers(a, 0) > km.centers(b, 2) - km.centers(b, 0);
    });
    std::array<FaceClass, 3> label_of{};
    label_of[order[0]] = FaceClass::Flat;
    label_of[order[1]] = FaceClass::Edge;
    label_of[order[2]] = FaceClass::Corner;
    for (int i = 0; i < nf; ++i) {
        out.face_class[i] = label_of[km.assignment[i]];
        out.feature[i] = out.face_class[i] != FaceClass::Flat;
    }
    return out;
}

GuidedField guided_normals(const Mesh& mesh, int k_patch) {
    if (k_patch < 4) throw invalid("guided_normals: k_patch must be at least 4");
    SurfaceFrames sf = surface_frames(mesh);
    auto patches = face_patches(sf, k_patch);
    auto candidates = invert_membership(patches);
    const int nf = mesh.face_count();

    std::vector<double> flatness(nf); // a_j = lambda2 - lambda1, ascending order
    for (int j = 0; j < nf; ++j) {
        Eigen::Vector3d lam = patch_eigenvalues(sf.face_normals, patches[j]);
        flatness[j] = std::abs(lam[1] - lam[0]);
    }

    GuidedField out;
    out.guided.resize(nf);
    out.patch_of.resize(nf);
    for (int i = 0; i < nf; ++i) {
        int best = i;
        double best_score = std::numeric_limits<double>::infinity();
        for (int j : candidates[i]) {
            double b = 0.0;
            for (int l : patches[j]) b = std::max(b, (sf.face_normals[i] - sf.face_normals[l]).norm());
            double score = flatness[j] * b;
            if (score < best_score) {
                best_score = score;
                best = j;
            }
        }
        out.patch_of[i] = best;
        Vec3 acc = Vec3::Zero();
        for (int l : patches[best]) acc += sf.areas[l] * sf.face_normals[l];
        double len = acc.norm();
        out.guided[i] = len > 1e-300 ? Vec3(acc / len) : sf.face_normals[i];
    }
    return out;
}

double estimate_noise_variance(const Mesh& mesh, int patch_count, int patch_size) {
    const int n = mesh.vertex_count();
    if (patch_count < 10) throw invalid("estimate_noise_variance: need at least 10 patches");
    if (n < patch_size + 1) throw invalid("estimate_noise_variance: too few points");
    KnnIndex index(mesh.vertices);
    std::vector<double> lambda_min;
    lambda_min.reserve(patch_count);
    for (int p = 0; p < patch_count; ++p) {
        int seed = static_cast<int>(static_cast<long>(p) * n / patch_count);
        auto nn = index.query(seed, patch_size - 1);
        nn.push_back(seed);
        Vec3 mean = Vec3::Zero();
        for (int v : nn) mean += mesh.vertices[v];
        mean /= static_cast<double>(nn.size());
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (int v : nn) {
            Vec3 d = mesh.vertices[v] - mean;
            cov += d * d.transpose();
        }
        cov /= static_cast<double>(nn.size());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
        lambda_min.push_back(es.eigenvalues()[0]);
    }
    // low quartile over patches: patches crossing features or curved regions
    // inflate their lambda_min, flat ones read the pure noise floor
    std::sort(lambda_min.begin(), lambda_min.end());
    return std::max(0.0, lambda_min[lambda_min.size() / 4]);
}

CoarseResult coarse_denoise(const Mesh& mesh, const CoarseOptions& opts) {
    CoarseResult out;
    out.mesh = mesh;
    out.noise_variance = estimate_noise_variance(
        mesh, std::max(12, mesh.vertex_count() / 64), std::min(32, mesh.vertex_count() / 4));
    double bbox = mesh.bbox_diagonal();
    if (out.noise_variance <= 1e-14 * bbox * bbox) {
        out.skipped_clean = true;
        return out;
    }

    SparseGraph graph = build_graph(mesh);
    PartitionOptions popts;
    popts.target_size = opts.target_part_size;
    popts.seed = opts.seed;
    Partitioning parts = partition_mesh(graph, popts);
    size_t max_size = 0;
    for (const auto& part : parts.parts) max_size = std::max(max_size, part.size());
    int n_d = std::min(graph.size(),
                       static_cast<int>(std::ceil(opts.overlap_factor * double(max_size))));
    if (n_d > static_cast<int>(max_size)) extend_overlap(parts, graph, n_d);
    n_d = static_cast<int>(parts.parts[0].size());

    const double sigma2 = out.noise_variance;            // variance target
    const double eps = opts.tolerance_factor * sigma2;   // Alg-1 band half-width
    const double ell = mesh.mean_edge_length();
    const double sigma_rel = std::sqrt(sigma2) / std::max(ell, 1e-30);

    // smoothing factors e = v^T L v per part/axis, normalized to [0,1]
    Eigen::MatrixXd coords = mesh.vertex_matrix();
    Eigen::MatrixXd efactor(parts.part_count, 3);
    std::vector<SparseGraph> subgraphs(parts.part_count);
    for (int p = 0; p < parts.part_count; ++p) {
        subgraphs[p] = induced_subgraph(graph, parts.parts[p]);
        Eigen::MatrixXd local(n_d, 3);
        for (int i = 0; i < n_d; ++i) local.row(i) = coords.row(parts.parts[p][i]);
        for (int j = 0; j < 3; ++j)
            efactor(p, j) = local.col(j).dot(subgraphs[p].laplacian * local.col(j));
    }
    for (int j = 0; j < 3; ++j) {
        double mx = efactor.col(j).maxCoeff();
        if (mx > 0) efactor.col(j) /= mx;
    }

    const int n_basis =
        std::min(n_d - 1, static_cast<int>(std::lround(
                              n_d * std::exp(0.0) / (1.0 + 40.0 * std::min(sigma_rel, 1.0)))) +
                              opts.max_adjustments + 2);

    std::vector<Eigen::MatrixXd> recon(parts.part_count);
    Eigen::MatrixXd prev_basis;
    for (int p = 0; p < parts.part_count; ++p) {
        const SparseGraph& sub = subgraphs[p];
        Eigen::MatrixXd local(n_d, 3);
        for (int i = 0; i < n_d; ++i) local.row(i) = coords.row(parts.parts[p][i]);

        TrackerOptions topt;
        topt.zeta = opts.zeta;
        Eigen::MatrixXd init = p == 0 ? random_orthonormal(n_d, n_basis, opts.seed + 1)
                                      : resize_orthonormal(prev_basis, n_basis, opts.seed + 1);
        TrackerResult track = orthogonal_iterations(sub, init, topt);
        out.oi_iterations.push_back(track.iterations);
        prev_basis = track.basis.U;
        const Eigen::MatrixXd& U = track.basis.U;

        recon[p].resize(n_d, 3);
        int nl_x = 0;
        for (int axis = 0; axis < 3; ++axis) {
            Eigen::VectorXd v = local.col(axis);
            int n_l = std::clamp(static_cast<int>(std::lround(
                                     n_d * std::exp(-efactor(p, axis)) /
                                     (1.0 + 40.0 * std::min(sigma_rel, 1.0)))),
                                 3, n_basis);
            double sigma_z = sigma2;
            bool diverged = false;
            Eigen::VectorXd best_recon;
            for (int adj = 0; adj < opts.max_adjustments; ++adj) {
                auto Un = U.leftCols(n_l);
                Eigen::MatrixXd Pi0 = Eigen::MatrixXd::Identity(n_l, n_l);
                double gamma = 1.0;
                Eigen::MatrixXd Sigma = Pi0;
                Eigen::VectorXd H;
                Eigen::MatrixXd Pi;
                for (int g = 0; g < opts.em_budget; ++g) {
                    Eigen::MatrixXd A =
                        Pi0.inverse() + Eigen::MatrixXd::Identity(n_l, n_l) / sigma_z;
                    Pi = A.inverse();
                    H = Pi * (Un.transpose() * v) / sigma_z;
                    double res2 = (v - Un * H).squaredNorm();
                    sigma_z = (res2 + sigma_z * (n_l - (Pi * Pi0.inverse()).trace())) / n_d;
                    if (!(sigma_z > 0.0) || !std::isfinite(sigma_z)) {
                        diverged = true;
                        break;
                    }
                    Eigen::MatrixXd second = Pi + H * H.transpose();
                    gamma = (Sigma.inverse() * second).trace() / n_l;
                    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
                        diverged = true;
                        break;
                    }
                    Eigen::MatrixXd Sraw = second / gamma;
                    double q0 = Sraw.diagonal().mean();
                    double q1 = Sraw.diagonal(1).mean();
                    double r = q0 != 0.0 ? q1 / q0 : 0.0;
                    r = std::copysign(std::min(std::abs(r), 0.99), r);
                    Sigma = toeplitz_ar1(n_l, r);
                    Pi0 = gamma * Sigma;
                }
                if (diverged) break;
                best_recon = Un * H;
                double res2 = (v - best_recon).squaredNorm() / n_d;
                if (res2 > sigma_z + eps && n_l < n_basis) {
                    ++n_l;
                } else if (res2 < sigma_z - eps && n_l > 3) {
                    --n_l;
                } else {
                    break;
                }
            }
            if (diverged || best_recon.size() == 0) {
                out.em_fallback = true;
                SpectralBasis fallback;
                fallback.U = U;
                fallback.lambda = track.basis.lambda;
                best_recon = lowpass_project(fallback, n_l, v);
            }
            recon[p].col(axis) = best_recon;
            if (axis == 0) nl_x = n_l;
        }
        out.subspace_sizes.push_back(nl_x);
    }

    Eigen::MatrixXd merged = merge_weighted(recon, parts, graph);
    out.mesh.set_vertex_matrix(merged);
    return out;
}

FineOptions fine_preset_scanned() { return FineOptions{1.0, 3, 5, 20}; }
FineOptions fine_preset_cad() { return FineOptions{0.3, 10, 15, 20}; }

double normal_consistency_energy(const Mesh& mesh, const std::vector<Vec3>& face_normals) {
    SurfaceFrames sf = surface_frames(mesh);
    double energy = 0.0;
    for (int f = 0; f < mesh.face_count(); ++f)
        for (int corner : mesh.faces[f]) {
            double d = face_normals[f].dot(sf.centroids[f] - mesh.vertices[corner]);
            energy += d * d;
        }
    return energy;
}

Mesh update_vertices_from_normals(const Mesh& mesh, const std::vector<Vec3>& face_normals,
                                  int iterations) {
    if (static_cast<int>(face_normals.size()) != mesh.face_count())
        throw invalid("update_vertices_from_normals: one normal per face required");
    Mesh out = mesh;
    std::vector<std::vector<int>> incident(mesh.vertex_count());
    for (int f = 0; f < mesh.face_count(); ++f)
        for (int v : mesh.faces[f]) incident[v].push_back(f);

    for (int it = 0; it < iterations; ++it) {
        std::vector<Vec3> centroids(mesh.face_count());
        for (int f = 0; f < mesh.face_count(); ++f) {
            const Face& face = out.faces[f];
            centroids[f] =
                (out.vertices[face[0]] + out.vertices[face[1]] + out.vertices[face[2]]) / 3.0;
        }
        std::vector<Vec3> next = out.vertices;
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            if (incident[i].empty()) continue;
            Vec3 acc = Vec3::Zero();
            for (int f : incident[i])
                acc += face_normals[f] * face_normals[f].dot(centroids[f] - out.vertices[i]);
            next[i] += acc / static_cast<double>(incident[i].size());
        }
        out.vertices = std::move(next);
    }
    return out;
}

Mesh fine_denoise(const Mesh& mesh, const FeatureLabels& features, const FineOptions& opts,
                  const GuidedField* guided) {
    if (static_cast<int>(features.feature.size()) != mesh.face_count())
        throw invalid("fine_denoise: feature labels do not match the mesh");
    SurfaceFrames sf = surface_frames(mesh);
    auto patches = face_patches(sf, opts.k_patch);
    auto candidates = invert_membership(patches);
    const int nf = mesh.face_count();
    if (guided && static_cast<int>(guided->guided.size()) != nf)
        throw invalid("fine_denoise: guided field does not match the mesh");
    const std::vector<Vec3>& ref = guided ? guided->guided : sf.face_normals;

    // psi_j = (lambda3 - lambda1) / lambda3 per candidate patch
    std::vector<double> psi(nf);
    std::vector<Vec3> patch_mean(nf);
    for (int j = 0; j < nf; ++j) {
        Eigen::Vector3d lam = patch_eigenvalues(ref, patches[j]);
        psi[j] = lam[2] > 1e-300 ? (lam[2] - lam[0]) / lam[2] : 0.0;
        Vec3 acc = Vec3::Zero();
        for (int g : patches[j]) acc += ref[g];
        patch_mean[j] = acc / static_cast<double>(patches[j].size());
    }

    // best area per face: feature faces search their candidates, the rest keep
    // their own k-NN patch
    std::vector<int> area(nf);
    for (int i = 0; i < nf; ++i) {
        if (!features.feature[i]) {
            area[i] = i;
            continue;
        }
        int best = i;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int j : candidates[i]) {
            double zeta = ref[i].dot(patch_mean[j]);
            double omega = 1e-9;
            for (int g : patches[j]) omega = std::max(omega, (ref[i] - ref[g]).norm());
            double score = psi[j] * zeta / omega;
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        area[i] = best;
    }

    // sigma_c per face: mean squared centroid distance over the edge ring
    auto ring = face_ring(mesh);
    std::vector<double> sigma_c2(nf, 0.0);
    for (int i = 0; i < nf; ++i) {
        if (ring[i].empty()) {
            sigma_c2[i] = 1.0;
            continue;
        }
        for (int j : ring[i]) sigma_c2[i] += (sf.centroids[i] - sf.centroids[j]).squaredNorm();
        sigma_c2[i] /= static_cast<double>(ring[i].size());
        if (sigma_c2[i] <= 0.0) sigma_c2[i] = 1e-12;
    }

    // weighted smoothing sweeps: n <- rownormalized(W_c o W_s o C) n
    std::vector<Vec3> normals = sf.face_normals;
    const double two_sigma_s2 = 2.0 * opts.sigma_s * opts.sigma_s;
    for (int sweep = 0; sweep < opts.zeta; ++sweep) {
        std::vector<Vec3> next(nf);
        for (int i = 0; i < nf; ++i) {
            Vec3 acc = Vec3::Zero();
            double wsum = 0.0;
            for (int j : patches[area[i]]) {
                if (j == i) continue;
                double wc = std::exp(-(sf.centroids[i] - sf.centroids[j]).squaredNorm() /
                                     (2.0 * sigma_c2[i]));
                double ws = std::exp(-(ref[i] - ref[j]).squaredNorm() / two_sigma_s2);
                acc += wc * ws * normals[j];
                wsum += wc * ws;
            }
            next[i] = wsum > 1e-300 ? Vec3(acc / wsum) : normals[i];
        }
        normals = std::move(next);
    }
    for (Vec3& n : normals) {
        double len = n.norm();
        if (len > 1e-300) n /= len;
    }

    return update_vertices_from_normals(mesh, normals, opts.u_iter);
}

std::vector<Vec3> bilateral_point_denoise(const std::vector<Vec3>& points,
                                          const std::vector<Vec3>* normals,
                                          const BilateralOptions& opts) {
    const int n = static_cast<int>(points.size());
    if (opts.k >= n) throw invalid("bilateral_point_denoise: k must be below the point count");
    std::vector<Vec3> current = points;
    for (int it = 0; it < opts.iterations; ++it) {
        KnnIndex index(current);
        std::vector<Vec3> dir(n);
        if (normals && it == 0) {
            dir = *normals;
        } else {
            for (int i = 0; i < n; ++i) {
                auto nn = index.query(i, opts.k);
                Vec3 mean = current[i];
                for (int j : nn) mean += current[j];
                mean /= static_cast<double>(nn.size() + 1);
                Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
                Vec3 d0 = current[i] - mean;
                cov += d0 * d0.transpose();
                for (int j : nn) {
                    Vec3 d = current[j] - mean;
                    cov += d * d.transpose();
                }
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
                dir[i] = es.eigenvectors().col(0);
            }
        }
        std::vector<Vec3> next(n);
        for (int i = 0; i < n; ++i) {
            auto nn = index.query(i, opts.k);
            double s1 = opts.sigma1;
            if (s1 <= 0.0) {
                s1 = 0.0;
                for (int j : nn) s1 += (current[i] - current[j]).norm();
                s1 /= static_cast<double>(nn.size());
                if (s1 <= 0.0) s1 = 1e-12;
            }
            double s2 = opts.sigma2 > 0.0 ? opts.sigma2 : 0.5 * s1;
            double wsum = 0.0, acc = 0.0;
            for (int j : nn) {
                // offset toward the neighbors: the paper's v_i - v_j sign
                // pushes points away from the surface
                double offset = dir[i].dot(current[j] - current[i]);
                double w1 = std::exp(-(current[i] - current[j]).squaredNorm() / (2.0 * s1 * s1));
                double w2 = std::exp(-offset * offset / (2.0 * s2 * s2));
                acc += w1 * w2 * offset;
                wsum += std::abs(w1 * w2);
            }
            next[i] = wsum > 1e-300 ? Vec3(current[i] + dir[i] * (acc / wsum)) : current[i];
        }
        current = std::move(next);
    }
    return current;
}

DynamicDenoiseResult denoise_dynamic(const FrameSequence& seq, const DynamicDenoiseOptions& opts) {
    seq.validate();
    DynamicDenoiseResult out;
    out.frames = seq;
    const int n_s = seq.frame_count();
    const int n = seq.vertex_count();

    SparseGraph graph = build_graph(seq.frames.front());
    SpectralBasis basis = eigendecompose(graph);

    // per-frame GFT and high-band width from the energy rule
    std::vector<Eigen::MatrixXd> coeffs(n_s);
    out.n_h_per_frame.resize(n_s);
    for (int f = 0; f < n_s; ++f) {
        coeffs[f] = gft(basis, seq.frames[f].vertex_matrix());
        // DC row excluded: keeps the band choice translation invariant
        double total = coeffs[f].bottomRows(n - 1).squaredNorm();
        double budget = (1.0 - opts.energy_keep) * total;
        double acc = 0.0;
        int n_h = 0;
        // largest n_h whose top block holds at most the energy budget, so the
        // protected low band keeps >= energy_keep of the total
        for (int i = n - 1; i >= 0; --i) {
            acc += coeffs[f].row(i).squaredNorm();
            if (acc > budget) break;
            ++n_h;
        }
        out.n_h_per_frame[f] = n_h;
    }
    out.n_h = *std::max_element(out.n_h_per_frame.begin(), out.n_h_per_frame.end());

    if (n_s < 3 || out.n_h == 0) {
        // too few frames for low-rank structure: per-frame lowpass fallback
        out.fallback_lowpass = true;
        for (int f = 0; f < n_s; ++f) {
            int keep = n - out.n_h_per_frame[f];
            Eigen::MatrixXd cut = coeffs[f];
            cut.bottomRows(n - keep).setZero();
            out.frames.frames[f].set_vertex_matrix(igft(basis, cut));
        }
        return out;
    }

    // coherent matrices: one row per frame, columns = top n_h coefficients
    const int n_h = out.n_h;
    std::array<Eigen::MatrixXd, 3> stacked;
    for (int axis = 0; axis < 3; ++axis) {
        stacked[axis].resize(n_s, n_h);
        for (int f = 0; f < n_s; ++f)
            stacked[axis].row(f) = coeffs[f].col(axis).tail(n_h).transpose();
    }

    // warn when per-frame high bands are near-identical (spatial noise masks
    // defeat the low-rank separation)
    if (n_s >= 2) {
        double diff = 0.0, scale = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
            diff += (stacked[axis].row(0) - stacked[axis].row(n_s - 1)).norm();
            scale += stacked[axis].row(0).norm();
        }
        out.identical_highband = diff < 1e-9 * std::max(scale, 1e-30);
    }

    SolverConfig cfg;
    cfg.rank = opts.godec_rank > 0
                   ? opts.godec_rank
                   : std::min({static_cast<int>(std::ceil(n_s / 4.0)), 10, n_h, n_s});
    if (opts.godec_lambda >= 0.0) {
        cfg.lambda_auto = false;
        cfg.lambda = opts.godec_lambda;
    }
    std::array<Eigen::MatrixXd, 3> denoised;
    for (int axis = 0; axis < 3; ++axis) denoised[axis] = godec(stacked[axis], cfg).E;

    // splice: each frame keeps its own n_h_i denoised components, the band
    // between n_h_i and n_h stays untouched
    for (int f = 0; f < n_s; ++f) {
        Eigen::MatrixXd c = coeffs[f];
        int keep = out.n_h_per_frame[f];
        for (int axis = 0; axis < 3; ++axis)
            for (int i = 0; i < keep; ++i)
                c(n - 1 - i, axis) = denoised[axis](f, n_h - 1 - i);
        out.frames.frames[f].set_vertex_matrix(igft(basis, c));
    }
    return out;
}

} // namespace geom
