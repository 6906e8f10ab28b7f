#pragma once

#include "geom/mesh.hpp"

#include <cstdint>
#include <vector>

namespace geom {

struct MetricReport {
    double theta_deg = 0.0; // mean face-normal angle, degrees
    double hd = 0.0;        // averaged one-sided Hausdorff (candidate -> reference)
    double nmsve = 0.0;
    int n = 0;
    int n_f = 0;
    std::vector<double> per_vertex_error;
};

/// theta and NMSVE need identical connectivity; HD works on any pair.
MetricReport metrics(const Mesh& reference, const Mesh& candidate);

enum class NoiseKind { GaussianAlongNormals, Impulsive, Uniform, SpatialMask };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::GaussianAlongNormals;
    double sigma_e = 0.0;           // relative to mean edge length
    std::uint64_t seed = 0;
    double impulsive_fraction = 0.05;
    std::vector<int> mask;          // vertex ids for SpatialMask
};

Mesh add_noise(const Mesh& mesh, const NoiseSpec& spec);

enum class HeatmapMode { Position, NormalAngle };

/// Per-vertex scalar field in [0,1] for the jet export.
std::vector<double> heatmap_field(const Mesh& reference, const Mesh& candidate, HeatmapMode mode);

/// 10 * log10(nmsve), with a floor for exact matches.
double nmsve_db(double nmsve);

} // namespace geom
