#include "sscmg/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

namespace sscmg {

namespace {

struct CoordKey {
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    bool operator==(const CoordKey&) const = default;
};

struct CoordKeyHash {
    std::size_t operator()(const CoordKey& k) const {
        std::uint64_t h = k.x * 0x9e3779b97f4a7c15ULL;
        h ^= k.y + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

CoordKey coord_key(Vec2 p) {
    return {std::bit_cast<std::uint64_t>(p.x), std::bit_cast<std::uint64_t>(p.y)};
}

using CoordMap = std::unordered_map<CoordKey, int, CoordKeyHash>;

CoordMap build_coord_map(const Mesh& mesh) {
    CoordMap map;
    map.reserve(mesh.vertices.size());
    for (int i = 0; i < mesh.num_vertices(); ++i) map[coord_key(mesh.vertices[i])] = i;
    return map;
}

struct BBox {
    double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
};

BBox triangle_bbox(const std::array<Vec2, 3>& c) {
    BBox b{c[0].x, c[0].y, c[0].x, c[0].y};
    for (int i = 1; i < 3; ++i) {
        b.xmin = std::min(b.xmin, c[i].x);
        b.ymin = std::min(b.ymin, c[i].y);
        b.xmax = std::max(b.xmax, c[i].x);
        b.ymax = std::max(b.ymax, c[i].y);
    }
    return b;
}

double bbox_distance(const BBox& a, const BBox& b) {
    const double dx = std::max({0.0, a.xmin - b.xmax, b.xmin - a.xmax});
    const double dy = std::max({0.0, a.ymin - b.ymax, b.ymin - a.ymax});
    return std::hypot(dx, dy);
}

}  // namespace

bool on_unit_square_boundary(Vec2 p) {
    constexpr double tol = 1e-14;
    return std::abs(p.x) <= tol || std::abs(p.x - 1.0) <= tol || std::abs(p.y) <= tol ||
           std::abs(p.y - 1.0) <= tol;
}

double triangle_area(const Mesh& mesh, int t) {
    const auto c = mesh.corners(t);
    return signed_area(c[0], c[1], c[2]);
}

double total_area(const Mesh& mesh) {
    double sum = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) sum += triangle_area(mesh, t);
    return sum;
}

std::vector<std::vector<int>> vertex_to_elements(const Mesh& mesh) {
    std::vector<std::vector<int>> incidence(mesh.num_vertices());
    for (int t = 0; t < mesh.num_triangles(); ++t)
        for (int v : mesh.triangles[t].v) incidence[v].push_back(t);
    return incidence;
}

Mesh unit_square_coarse(int n) {
    if (n < 1) throw MeshError("unit_square_coarse: n must be at least 1");
    Mesh mesh;
    mesh.level = 0;
    mesh.h0 = 1.0 / n;
    mesh.vertices.reserve((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
            mesh.boundary_vertex.push_back(i == 0 || i == n || j == 0 || j == n ? 1 : 0);
        }
    }
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    mesh.triangles.reserve(2 * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            // split along the lower-left/upper-right diagonal, both CCW
            mesh.triangles.push_back({{vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)}, -1});
            mesh.triangles.push_back({{vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)}, -1});
        }
    }
    return mesh;
}

Mesh refine_local(const Mesh& mesh, const std::vector<int>& region) {
    if (region.empty()) throw MeshError("refine_local: empty region");
    std::vector<char> refine_flag(mesh.num_triangles(), 0);
    for (int t : region) {
        if (t < 0 || t >= mesh.num_triangles())
            throw MeshError("refine_local: region references nonexistent element " +
                            std::to_string(t));
        refine_flag[t] = 1;
    }

    Mesh out;
    out.level = mesh.level + 1;
    out.h0 = mesh.h0;
    out.vertices = mesh.vertices;
    out.boundary_vertex = mesh.boundary_vertex;

    // Coordinate lookup reuses vertices created at earlier levels (for
    // instance a hanging node that now becomes a regular corner).
    CoordMap coords = build_coord_map(mesh);

    auto midpoint_index = [&](int a, int b) -> int {
        const Vec2 m = midpoint(out.vertices[a], out.vertices[b]);
        const CoordKey key = coord_key(m);
        auto it = coords.find(key);
        if (it != coords.end()) return it->second;
        const int idx = static_cast<int>(out.vertices.size());
        out.vertices.push_back(m);
        out.boundary_vertex.push_back(on_unit_square_boundary(m) ? 1 : 0);
        coords.emplace(key, idx);
        return idx;
    };

    out.triangles.reserve(mesh.num_triangles() + 3 * region.size());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        if (!refine_flag[t]) {
            out.triangles.push_back({tri.v, t});
            continue;
        }
        const int v0 = tri.v[0], v1 = tri.v[1], v2 = tri.v[2];
        const int m01 = midpoint_index(v0, v1);
        const int m12 = midpoint_index(v1, v2);
        const int m20 = midpoint_index(v2, v0);
        out.triangles.push_back({{v0, m01, m20}, t});
        out.triangles.push_back({{v1, m12, m01}, t});
        out.triangles.push_back({{v2, m20, m12}, t});
        out.triangles.push_back({{m01, m12, m20}, t});
    }
    return out;
}

Mesh refine_uniform(const Mesh& mesh) {
    std::vector<int> all(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) all[t] = t;
    return refine_local(mesh, all);
}

std::vector<HangingRecord> detect_hanging_nodes(const Mesh& mesh) {
    const CoordMap coords = build_coord_map(mesh);

    // hanging vertex -> resolving edge (endpoints sorted)
    std::map<int, std::array<int, 2>> records;

    // Walk the dyadic subdivision of a living edge: if the midpoint exists as
    // a vertex it hangs on this edge, and deeper vertices hang on the halves.
    std::function<void(int, int)> scan = [&](int a, int b) {
        const Vec2 m = midpoint(mesh.vertices[a], mesh.vertices[b]);
        auto it = coords.find(coord_key(m));
        if (it == coords.end()) return;
        const int v = it->second;
        const std::array<int, 2> edge{std::min(a, b), std::max(a, b)};
        auto [pos, inserted] = records.emplace(v, edge);
        if (!inserted && pos->second != edge)
            throw MeshError("detect_hanging_nodes: vertex " + std::to_string(v) +
                            " is the midpoint of two distinct edges (malformed mesh)");
        scan(a, v);
        scan(v, b);
    };

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) scan(tri.v[e], tri.v[(e + 1) % 3]);
    }

    // Kahn's algorithm: emit a record only once its hanging endpoints are out.
    std::vector<HangingRecord> ordered;
    ordered.reserve(records.size());
    std::set<int> pending;
    for (const auto& [v, edge] : records) pending.insert(v);
    while (!pending.empty()) {
        bool progressed = false;
        for (auto it = pending.begin(); it != pending.end();) {
            const auto& edge = records.at(*it);
            if (pending.count(edge[0]) == 0 && pending.count(edge[1]) == 0) {
                ordered.push_back({*it, edge});
                it = pending.erase(it);
                progressed = true;
            } else {
                ++it;
            }
        }
        if (!progressed)
            throw MeshError("detect_hanging_nodes: cyclic hanging-node dependency");
    }
    return ordered;
}

SubdomainCover partition_nonoverlapping(const Mesh& mesh, int rows, int cols) {
    if (rows < 1 || cols < 1)
        throw MeshError("partition_nonoverlapping: grid must be at least 1x1");
    const int n = static_cast<int>(std::lround(1.0 / mesh.h0));
    if (n % cols != 0 || n % rows != 0)
        throw MeshError("partition_nonoverlapping: grid " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " does not align with the " + std::to_string(n) +
                        "-cell coarse mesh (boundaries would cut coarse elements)");

    SubdomainCover cover;
    cover.level = mesh.level;
    cover.p = rows * cols;
    cover.nonoverlapping.resize(cover.p);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.corners(t);
        const Vec2 bary = (1.0 / 3.0) * (c[0] + c[1] + c[2]);
        const int ci = std::min(cols - 1, static_cast<int>(bary.x * cols));
        const int ri = std::min(rows - 1, static_cast<int>(bary.y * rows));
        cover.nonoverlapping[ri * cols + ci].push_back(t);
    }
    return cover;
}

SubdomainCover grow_overlap(const Mesh& mesh, SubdomainCover cover) {
    if (cover.nonoverlapping.empty())
        throw MeshError("grow_overlap: nonoverlapping part missing");
    const double h0 = mesh.h0;
    // Strict comparison: an element whose distance equals h0 exactly stays
    // out, which keeps the grown strip one coarse cell wide on aligned grids.
    const double radius = h0 - 1e-12;

    const int nt = mesh.num_triangles();
    std::vector<BBox> boxes(nt);
    for (int t = 0; t < nt; ++t) boxes[t] = triangle_bbox(mesh.corners(t));

    cover.overlapping.assign(cover.nonoverlapping.size(), {});
    for (std::size_t i = 0; i < cover.nonoverlapping.size(); ++i) {
        const auto& seed = cover.nonoverlapping[i];
        std::vector<char> in_seed(nt, 0);
        BBox seed_box{1e30, 1e30, -1e30, -1e30};
        for (int t : seed) {
            in_seed[t] = 1;
            seed_box.xmin = std::min(seed_box.xmin, boxes[t].xmin);
            seed_box.ymin = std::min(seed_box.ymin, boxes[t].ymin);
            seed_box.xmax = std::max(seed_box.xmax, boxes[t].xmax);
            seed_box.ymax = std::max(seed_box.ymax, boxes[t].ymax);
        }
        auto& grown = cover.overlapping[i];
        for (int t = 0; t < nt; ++t) {
            if (in_seed[t]) {
                grown.push_back(t);
                continue;
            }
            if (bbox_distance(boxes[t], seed_box) >= h0) continue;
            const auto tc = mesh.corners(t);
            bool close = false;
            for (int s : seed) {
                if (bbox_distance(boxes[t], boxes[s]) >= h0) continue;
                if (triangle_distance(tc, mesh.corners(s)) < radius) {
                    close = true;
                    break;
                }
            }
            if (close) grown.push_back(t);
        }
        std::sort(grown.begin(), grown.end());
    }
    return cover;
}

int adjacency_g0(const SubdomainCover& cover) {
    if (cover.overlapping.size() != cover.nonoverlapping.size() || cover.overlapping.empty())
        throw MeshError("adjacency_g0: overlapping part missing");
    const int p = cover.p;
    int g0 = 0;
    for (int i = 0; i < p; ++i) {
        int row = 0;
        for (int j = 0; j < p; ++j) {
            const auto& a = cover.overlapping[i];
            const auto& b = cover.overlapping[j];
            // sorted-set intersection test; a shared closed element counts
            bool meet = false;
            std::size_t ia = 0, ib = 0;
            while (ia < a.size() && ib < b.size()) {
                if (a[ia] == b[ib]) {
                    meet = true;
                    break;
                }
                (a[ia] < b[ib] ? ia : ib) += 1;
            }
            row += meet ? 1 : 0;
        }
        g0 = std::max(g0, row);
    }
    return g0;
}

}  // namespace sscmg
