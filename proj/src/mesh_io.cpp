#include "sscmg/mesh_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sscmg {

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string format_mesh(const Mesh& mesh) {
    std::ostringstream os;
    write_mesh(os, mesh);
    return os.str();
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << "MESH2D " << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.level
       << ' ' << format_g17(mesh.h0) << '\n';
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        os << "v " << format_g17(mesh.vertices[i].x) << ' ' << format_g17(mesh.vertices[i].y)
           << ' ' << int(mesh.boundary_vertex[i]) << '\n';
    }
    for (const auto& tri : mesh.triangles) {
        os << "t " << tri.v[0] << ' ' << tri.v[1] << ' ' << tri.v[2] << ' ' << tri.parent << '\n';
    }
    for (const auto& rec : detect_hanging_nodes(mesh)) {
        os << "h " << rec.hanging_vertex << ' ' << rec.edge[0] << ' ' << rec.edge[1] << '\n';
    }
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
    std::ofstream os(path);
    if (!os) throw MeshError("cannot open mesh file for writing: " + path);
    write_mesh(os, mesh);
}

std::pair<Mesh, std::vector<HangingRecord>> read_mesh(std::istream& is) {
    std::string magic;
    int nvert = 0, ntri = 0;
    Mesh mesh;
    if (!(is >> magic >> nvert >> ntri >> mesh.level >> mesh.h0) || magic != "MESH2D")
        throw MeshError("read_mesh: malformed header");
    if (nvert < 3 || ntri < 1 || mesh.h0 <= 0.0 || mesh.h0 > 1.0)
        throw MeshError("read_mesh: implausible header counts");

    mesh.vertices.reserve(nvert);
    mesh.boundary_vertex.reserve(nvert);
    mesh.triangles.reserve(ntri);
    std::vector<HangingRecord> records;

    std::string tag;
    for (int i = 0; i < nvert; ++i) {
        Vec2 p;
        int bflag = 0;
        if (!(is >> tag >> p.x >> p.y >> bflag) || tag != "v")
            throw MeshError("read_mesh: bad vertex line " + std::to_string(i));
        mesh.vertices.push_back(p);
        mesh.boundary_vertex.push_back(bflag ? 1 : 0);
    }
    for (int i = 0; i < ntri; ++i) {
        Triangle tri;
        if (!(is >> tag >> tri.v[0] >> tri.v[1] >> tri.v[2] >> tri.parent) || tag != "t")
            throw MeshError("read_mesh: bad triangle line " + std::to_string(i));
        for (int v : tri.v)
            if (v < 0 || v >= nvert) throw MeshError("read_mesh: triangle vertex out of range");
        mesh.triangles.push_back(tri);
    }
    while (is >> tag) {
        if (tag != "h") throw MeshError("read_mesh: unexpected line tag '" + tag + "'");
        HangingRecord rec;
        if (!(is >> rec.hanging_vertex >> rec.edge[0] >> rec.edge[1]))
            throw MeshError("read_mesh: bad hanging line");
        const Vec2 mid = midpoint(mesh.vertices[rec.edge[0]], mesh.vertices[rec.edge[1]]);
        const Vec2 at = mesh.vertices[rec.hanging_vertex];
        if (std::abs(mid.x - at.x) > 1e-12 || std::abs(mid.y - at.y) > 1e-12)
            throw MeshError("read_mesh: hanging vertex is not the midpoint of its edge");
        records.push_back(rec);
    }
    return {std::move(mesh), std::move(records)};
}

std::pair<Mesh, std::vector<HangingRecord>> read_mesh_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MeshError("cannot open mesh file: " + path);
    return read_mesh(is);
}

}  // namespace sscmg
