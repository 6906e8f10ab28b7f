#pragma once

#include "geom/mesh.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace geom {

enum class MeshFormat { Obj, PlyAscii, Off };

struct ParseResult {
    Mesh mesh;
    int fanned_quads = 0; // quads auto-fanned into triangles
};

/// Parse ASCII OBJ / PLY / OFF content. Errors carry 1-based row and column.
ParseResult parse_mesh(std::string_view bytes, MeshFormat format);

/// Serialize to the requested format. Optional per-vertex scalars are written
/// as PLY vertex colors through the 64-entry jet map (PLY only). Floats are
/// emitted with 9 significant digits.
std::string serialize_mesh(const Mesh& mesh, MeshFormat format,
                           const std::vector<double>* vertex_scalars = nullptr);

MeshFormat format_from_path(const std::string& path);
Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path,
               const std::vector<double>* vertex_scalars = nullptr);

FrameSequence load_sequence(const std::string& pattern, int start, int count);
void save_sequence(const FrameSequence& seq, const std::string& pattern, int start);

/// 64-entry jet colormap (dark blue -> dark red), RGB in [0,255].
const std::array<std::array<std::uint8_t, 3>, 64>& jet_colormap();
/// Map a scalar in [0,1] to its jet bin (values clamped).
std::array<std::uint8_t, 3> jet_color(double t);

} // namespace geom
