#include "geom/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace geom {

namespace {

struct Cursor {
    std::string_view text;
    size_t pos = 0;
    int row = 1;

    bool eof() const { return pos >= text.size(); }

    std::string_view next_line() {
        size_t start = pos;
        while (pos < text.size() && text[pos] != '\n') ++pos;
        std::string_view line = text.substr(start, pos - start);
        if (pos < text.size()) ++pos;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        return line;
    }
};

[[noreturn]] void parse_fail(int row, int col, const std::string& what) {
    throw io_error("parse error at " + std::to_string(row) + ":" + std::to_string(col) + ": " +
                   what);
}

struct Tokens {
    std::vector<std::string_view> items;
    std::vector<int> cols; // 1-based column of each token
};

Tokens tokenize(std::string_view line) {
    Tokens t;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size()) break;
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        t.items.push_back(line.substr(start, i - start));
        t.cols.push_back(static_cast<int>(start) + 1);
    }
    return t;
}

double parse_double(std::string_view tok, int row, int col) {
    std::string s(tok);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) parse_fail(row, col, "expected a number, got '" + s + "'");
    return v;
}

long parse_long(std::string_view tok, int row, int col) {
    std::string s(tok);
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) parse_fail(row, col, "expected an integer, got '" + s + "'");
    return v;
}

void push_polygon(Mesh& mesh, const std::vector<int>& idx, int row, int col, int& fanned) {
    const int n = mesh.vertex_count();
    for (int v : idx)
        if (v < 0 || v >= n) parse_fail(row, col, "vertex index out of range");
    if (idx.size() == 3) {
        mesh.faces.push_back({idx[0], idx[1], idx[2]});
    } else if (idx.size() == 4) {
        mesh.faces.push_back({idx[0], idx[1], idx[2]});
        mesh.faces.push_back({idx[0], idx[2], idx[3]});
        ++fanned;
    } else {
        parse_fail(row, col, "only triangles and quads are supported (got " +
                                 std::to_string(idx.size()) + " vertices)");
    }
}

ParseResult parse_obj(std::string_view bytes) {
    ParseResult out;
    Cursor cur{bytes};
    while (!cur.eof()) {
        int row = cur.row++;
        Tokens t = tokenize(cur.next_line());
        if (t.items.empty() || t.items[0][0] == '#') continue;
        if (t.items[0] == "v") {
            if (t.items.size() < 4) parse_fail(row, 1, "vertex line needs 3 coordinates");
            Vec3 v;
            for (int c = 0; c < 3; ++c) v[c] = parse_double(t.items[c + 1], row, t.cols[c + 1]);
            out.mesh.vertices.push_back(v);
        } else if (t.items[0] == "f") {
            std::vector<int> idx;
            for (size_t c = 1; c < t.items.size(); ++c) {
                std::string_view tok = t.items[c];
                size_t slash = tok.find('/');
                if (slash != std::string_view::npos) tok = tok.substr(0, slash);
                long v = parse_long(tok, row, t.cols[c]);
                if (v <= 0) parse_fail(row, t.cols[c], "obj indices must be positive");
                idx.push_back(static_cast<int>(v - 1));
            }
            push_polygon(out.mesh, idx, row, t.cols[0], out.fanned_quads);
        }
        // other directives (vn, vt, usemtl, ...) are ignored
    }
    return out;
}

ParseResult parse_off(std::string_view bytes) {
    ParseResult out;
    Cursor cur{bytes};
    auto next_content = [&]() -> std::pair<Tokens, int> {
        while (!cur.eof()) {
            int row = cur.row++;
            Tokens t = tokenize(cur.next_line());
            if (t.items.empty() || t.items[0][0] == '#') continue;
            return {t, row};
        }
        parse_fail(cur.row, 1, "unexpected end of OFF file");
    };
    auto [header, hrow] = next_content();
    if (header.items[0] != "OFF") parse_fail(hrow, 1, "missing OFF header");
    auto [counts, crow] = next_content();
    if (counts.items.size() < 2) parse_fail(crow, 1, "OFF counts line needs vertices and faces");
    long nv = parse_long(counts.items[0], crow, counts.cols[0]);
    long nf = parse_long(counts.items[1], crow, counts.cols[1]);
    for (long i = 0; i < nv; ++i) {
        auto [t, row] = next_content();
        if (t.items.size() < 3) parse_fail(row, 1, "vertex line needs 3 coordinates");
        Vec3 v;
        for (int c = 0; c < 3; ++c) v[c] = parse_double(t.items[c], row, t.cols[c]);
        out.mesh.vertices.push_back(v);
    }
    for (long i = 0; i < nf; ++i) {
        auto [t, row] = next_content();
        long k = parse_long(t.items[0], row, t.cols[0]);
        if (static_cast<long>(t.items.size()) < k + 1) parse_fail(row, 1, "truncated face line");
        std::vector<int> idx;
        for (long c = 1; c <= k; ++c)
            idx.push_back(static_cast<int>(parse_long(t.items[c], row, t.cols[c])));
        push_polygon(out.mesh, idx, row, t.cols[0], out.fanned_quads);
    }
    return out;
}

ParseResult parse_ply(std::string_view bytes) {
    ParseResult out;
    Cursor cur{bytes};
    auto next_content = [&]() -> std::pair<Tokens, int> {
        while (!cur.eof()) {
            int row = cur.row++;
            Tokens t = tokenize(cur.next_line());
            if (t.items.empty() || t.items[0] == "comment") continue;
            return {t, row};
        }
        parse_fail(cur.row, 1, "unexpected end of PLY file");
    };

    auto [magic, mrow] = next_content();
    if (magic.items[0] != "ply") parse_fail(mrow, 1, "missing ply magic");

    long nv = 0, nf = 0;
    int xcol = -1, ycol = -1, zcol = -1;
    int vprops = 0;
    enum class Section { None, Vertex, Face } section = Section::None;
    bool header_done = false;
    while (!header_done) {
        auto [t, row] = next_content();
        if (t.items[0] == "format") {
            if (t.items.size() < 2 || t.items[1] != "ascii")
                parse_fail(row, t.cols[0], "only ascii PLY is supported");
        } else if (t.items[0] == "element") {
            if (t.items.size() < 3) parse_fail(row, t.cols[0], "malformed element line");
            if (t.items[1] == "vertex") {
                nv = parse_long(t.items[2], row, t.cols[2]);
                section = Section::Vertex;
            } else if (t.items[1] == "face") {
                nf = parse_long(t.items[2], row, t.cols[2]);
                section = Section::Face;
            } else {
                section = Section::None;
            }
        } else if (t.items[0] == "property") {
            if (section == Section::Vertex && t.items.size() >= 3 && t.items[1] != "list") {
                std::string_view name = t.items.back();
                if (name == "x") xcol = vprops;
                if (name == "y") ycol = vprops;
                if (name == "z") zcol = vprops;
                ++vprops;
            }
        } else if (t.items[0] == "end_header") {
            header_done = true;
        }
    }
    if (xcol < 0 || ycol < 0 || zcol < 0) parse_fail(cur.row, 1, "PLY vertex needs x,y,z");

    for (long i = 0; i < nv; ++i) {
        auto [t, row] = next_content();
        if (static_cast<int>(t.items.size()) < vprops) parse_fail(row, 1, "truncated vertex line");
        Vec3 v;
        v[0] = parse_double(t.items[xcol], row, t.cols[xcol]);
        v[1] = parse_double(t.items[ycol], row, t.cols[ycol]);
        v[2] = parse_double(t.items[zcol], row, t.cols[zcol]);
        out.mesh.vertices.push_back(v);
    }
    for (long i = 0; i < nf; ++i) {
        auto [t, row] = next_content();
        long k = parse_long(t.items[0], row, t.cols[0]);
        if (static_cast<long>(t.items.size()) < k + 1) parse_fail(row, 1, "truncated face line");
        std::vector<int> idx;
        for (long c = 1; c <= k; ++c)
            idx.push_back(static_cast<int>(parse_long(t.items[c], row, t.cols[c])));
        push_polygon(out.mesh, idx, row, t.cols[0], out.fanned_quads);
    }
    return out;
}

void fmt_double(std::string& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    out += buf;
}

} // namespace

ParseResult parse_mesh(std::string_view bytes, MeshFormat format) {
    ParseResult result;
    switch (format) {
    case MeshFormat::Obj: result = parse_obj(bytes); break;
    case MeshFormat::PlyAscii: result = parse_ply(bytes); break;
    case MeshFormat::Off: result = parse_off(bytes); break;
    }
    result.mesh.validate();
    return result;
}

std::string serialize_mesh(const Mesh& mesh, MeshFormat format,
                           const std::vector<double>* vertex_scalars) {
    if (vertex_scalars && static_cast<int>(vertex_scalars->size()) != mesh.vertex_count())
        throw invalid("serialize_mesh: scalar field length mismatch");

    std::string out;
    out.reserve(mesh.vertices.size() * 40 + mesh.faces.size() * 20);
    switch (format) {
    case MeshFormat::Obj:
        for (const Vec3& v : mesh.vertices) {
            out += "v ";
            fmt_double(out, v.x());
            out += ' ';
            fmt_double(out, v.y());
            out += ' ';
            fmt_double(out, v.z());
            out += '\n';
        }
        for (const Face& f : mesh.faces) {
            out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' +
                   std::to_string(f[2] + 1) + '\n';
        }
        break;
    case MeshFormat::PlyAscii: {
        double lo = 0.0, hi = 1.0;
        if (vertex_scalars && !vertex_scalars->empty()) {
            auto [mn, mx] = std::minmax_element(vertex_scalars->begin(), vertex_scalars->end());
            lo = *mn;
            hi = *mx;
        }
        out += "ply\nformat ascii 1.0\n";
        out += "element vertex " + std::to_string(mesh.vertex_count()) + '\n';
        out += "property float x\nproperty float y\nproperty float z\n";
        if (vertex_scalars)
            out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
        out += "element face " + std::to_string(mesh.face_count()) + '\n';
        out += "property list uchar int vertex_indices\nend_header\n";
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            const Vec3& v = mesh.vertices[i];
            fmt_double(out, v.x());
            out += ' ';
            fmt_double(out, v.y());
            out += ' ';
            fmt_double(out, v.z());
            if (vertex_scalars) {
                double t = hi > lo ? ((*vertex_scalars)[i] - lo) / (hi - lo) : 0.0;
                auto rgb = jet_color(t);
                out += ' ' + std::to_string(rgb[0]) + ' ' + std::to_string(rgb[1]) + ' ' +
                       std::to_string(rgb[2]);
            }
            out += '\n';
        }
        for (const Face& f : mesh.faces)
            out += "3 " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' +
                   std::to_string(f[2]) + '\n';
        break;
    }
    case MeshFormat::Off:
        out += "OFF\n";
        out += std::to_string(mesh.vertex_count()) + ' ' + std::to_string(mesh.face_count()) +
               " 0\n";
        for (const Vec3& v : mesh.vertices) {
            fmt_double(out, v.x());
            out += ' ';
            fmt_double(out, v.y());
            out += ' ';
            fmt_double(out, v.z());
            out += '\n';
        }
        for (const Face& f : mesh.faces)
            out += "3 " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' +
                   std::to_string(f[2]) + '\n';
        break;
    }
    return out;
}

MeshFormat format_from_path(const std::string& path) {
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == "obj") return MeshFormat::Obj;
    if (ext == "ply") return MeshFormat::PlyAscii;
    if (ext == "off") return MeshFormat::Off;
    throw invalid("unsupported mesh format: ." + ext);
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    ParseResult r = parse_mesh(buf.str(), format_from_path(path));
    auto slash = path.find_last_of("/\\");
    r.mesh.name = slash == std::string::npos ? path : path.substr(slash + 1);
    return std::move(r.mesh);
}

void save_mesh(const Mesh& mesh, const std::string& path,
               const std::vector<double>* vertex_scalars) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << serialize_mesh(mesh, format_from_path(path), vertex_scalars);
}

static std::string pattern_path(const std::string& pattern, int index) {
    if (pattern.find('%') == std::string::npos)
        throw invalid("frame pattern must contain a printf-style %d directive");
    char buf[4096];
    std::snprintf(buf, sizeof(buf), pattern.c_str(), index);
    return buf;
}

FrameSequence load_sequence(const std::string& pattern, int start, int count) {
    FrameSequence seq;
    for (int i = 0; i < count; ++i) seq.frames.push_back(load_mesh(pattern_path(pattern, start + i)));
    seq.validate();
    return seq;
}

void save_sequence(const FrameSequence& seq, const std::string& pattern, int start) {
    for (int i = 0; i < seq.frame_count(); ++i)
        save_mesh(seq.frames[i], pattern_path(pattern, start + i));
}

const std::array<std::array<std::uint8_t, 3>, 64>& jet_colormap() {
    static const auto table = [] {
        std::array<std::array<std::uint8_t, 3>, 64> t{};
        auto channel = [](double x, double center) {
            double v = 1.5 - std::abs(4.0 * x - center);
            return std::clamp(v, 0.0, 1.0);
        };
        for (int i = 0; i < 64; ++i) {
            double x = static_cast<double>(i) / 63.0;
            t[i][0] = static_cast<std::uint8_t>(std::lround(255.0 * channel(x, 3.0)));
            t[i][1] = static_cast<std::uint8_t>(std::lround(255.0 * channel(x, 2.0)));
            t[i][2] = static_cast<std::uint8_t>(std::lround(255.0 * channel(x, 1.0)));
        }
        return t;
    }();
    return table;
}

std::array<std::uint8_t, 3> jet_color(double t) {
    int bin = static_cast<int>(std::clamp(t, 0.0, 1.0) * 64.0);
    return jet_colormap()[std::clamp(bin, 0, 63)];
}

} // namespace geom
