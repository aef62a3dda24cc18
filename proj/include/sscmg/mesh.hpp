#pragma once

#include "sscmg/geometry.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace sscmg {

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One triangle: counterclockwise vertex indices plus the index of the
/// triangle in the previous level it descends from (-1 on a coarse mesh).
/// Unrefined triangles carried to the next level keep their old index as
/// parent.
struct Triangle {
    std::array<int, 3> v{-1, -1, -1};
    int parent = -1;
};

/// Hierarchical triangulation of the unit square. Vertices of earlier levels
/// keep their indices under refinement, and new vertices are edge midpoints,
/// so all coordinates are exactly representable combinations of the coarse
/// grid. Meshes are immutable after construction.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<Triangle> triangles;
    std::vector<char> boundary_vertex;  // 1 when the vertex lies on the domain boundary
    int level = 0;
    double h0 = 1.0;  // coarse mesh size, inherited by refined meshes

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    std::array<Vec2, 3> corners(int t) const {
        return {vertices[triangles[t].v[0]], vertices[triangles[t].v[1]],
                vertices[triangles[t].v[2]]};
    }
};

/// A vertex sitting at the midpoint of an edge it is not a corner of. The
/// edge endpoints may themselves be hanging; records are emitted in an order
/// that resolves such chains front to back.
struct HangingRecord {
    int hanging_vertex = -1;
    std::array<int, 2> edge{-1, -1};
};

/// Non-overlapping subdomains (disjoint element sets covering the mesh) and
/// their overlap-grown counterparts.
struct SubdomainCover {
    int level = 0;
    std::vector<std::vector<int>> nonoverlapping;
    std::vector<std::vector<int>> overlapping;
    int p = 0;
};

/// Structured coarse triangulation: n x n square cells, each split along the
/// lower-left/upper-right diagonal. 2 n^2 triangles, h0 = 1/n.
Mesh unit_square_coarse(int n);

/// Midpoint refinement of every element. Never introduces hanging nodes.
Mesh refine_uniform(const Mesh& mesh);

/// Midpoint refinement of the given elements only; the rest are carried over
/// unchanged. Midpoints on edges shared with unrefined neighbors become
/// hanging vertices.
Mesh refine_local(const Mesh& mesh, const std::vector<int>& region);

/// One record per vertex lying strictly inside some triangle's edge,
/// topologically ordered so an entry's edge endpoints are either regular or
/// already listed. Throws MeshError on a cyclic dependency.
std::vector<HangingRecord> detect_hanging_nodes(const Mesh& mesh);

/// Assign each element to the rows x cols box containing its barycenter.
/// Requires the grid to align with coarse cell boundaries.
SubdomainCover partition_nonoverlapping(const Mesh& mesh, int rows, int cols);

/// Fill the overlapping sets: every element closer than h0 to a subdomain
/// joins its overlap (whole elements only, so boundaries stay mesh-aligned).
SubdomainCover grow_overlap(const Mesh& mesh, SubdomainCover cover);

/// Maximum number of overlapping subdomains meeting any single subdomain,
/// counting itself: the max row sum of the intersection matrix G.
int adjacency_g0(const SubdomainCover& cover);

double triangle_area(const Mesh& mesh, int t);
double total_area(const Mesh& mesh);
bool on_unit_square_boundary(Vec2 p);

/// Elements adjacent to each vertex.
std::vector<std::vector<int>> vertex_to_elements(const Mesh& mesh);

}  // namespace sscmg
