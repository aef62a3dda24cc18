#include "sscmg/space.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sscmg {

namespace {

Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

// Constant P1 gradients; g[i] is the gradient of the hat at corner i.
std::array<Vec2, 3> p1_gradients(const std::array<Vec2, 3>& c, double area) {
    const double s = 1.0 / (2.0 * area);
    return {s * rot90(c[2] - c[1]), s * rot90(c[0] - c[2]), s * rot90(c[1] - c[0])};
}

}  // namespace

CoefficientField::CoefficientField(const Eigen::Matrix2d& t) : theta(t) {
    if (std::abs(t(0, 1) - t(1, 0)) > 1e-14 * (1.0 + t.cwiseAbs().maxCoeff()))
        throw SpaceError("CoefficientField: theta must be symmetric");
    if (t(0, 0) <= 0.0 || t.determinant() <= 0.0)
        throw SpaceError("CoefficientField: theta must be positive definite");
}

std::vector<std::vector<std::pair<int, double>>> resolve_hanging_weights(
    const Mesh& mesh, const std::vector<HangingRecord>& records) {
    std::vector<std::vector<std::pair<int, double>>> weights(mesh.num_vertices());
    std::vector<char> is_hanging(mesh.num_vertices(), 0);
    for (const auto& rec : records) is_hanging[rec.hanging_vertex] = 1;

    for (const auto& rec : records) {
        std::map<int, double> combined;
        for (int endpoint : rec.edge) {
            if (is_hanging[endpoint]) {
                // records arrive in resolution order, so this is final
                for (const auto& [master, w] : weights[endpoint]) combined[master] += 0.5 * w;
            } else {
                combined[endpoint] += 0.5;
            }
        }
        auto& out = weights[rec.hanging_vertex];
        out.assign(combined.begin(), combined.end());
    }
    return weights;
}

FeSpace build_space(std::shared_ptr<const Mesh> mesh) {
    FeSpace space;
    space.mesh = mesh;
    space.hanging = detect_hanging_nodes(*mesh);

    const int nvert = mesh->num_vertices();
    std::vector<char> is_hanging(nvert, 0);
    for (const auto& rec : space.hanging) is_hanging[rec.hanging_vertex] = 1;

    space.vertex_to_dof.assign(nvert, -1);
    for (int v = 0; v < nvert; ++v) {
        if (!mesh->boundary_vertex[v] && !is_hanging[v]) {
            space.vertex_to_dof[v] = static_cast<int>(space.free_dofs.size());
            space.free_dofs.push_back(v);
        }
    }

    const auto weights = resolve_hanging_weights(*mesh, space.hanging);
    std::vector<Triplet> entries;
    for (int v = 0; v < nvert; ++v) {
        if (space.vertex_to_dof[v] >= 0) {
            entries.emplace_back(v, space.vertex_to_dof[v], 1.0);
        } else if (is_hanging[v]) {
            for (const auto& [master, w] : weights[v]) {
                const int dof = space.vertex_to_dof[master];
                if (dof >= 0) entries.emplace_back(v, dof, w);  // boundary masters pin to zero
            }
        }
    }
    space.expansion = SparseOperator::from_triplets(nvert, space.dim(), entries);
    return space;
}

SparseOperator assemble_stiffness_unconstrained(const Mesh& mesh, const CoefficientField& coeff) {
    std::vector<Triplet> entries;
    entries.reserve(9 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.corners(t);
        const double area = signed_area(c[0], c[1], c[2]);
        if (area <= 0.0) throw SpaceError("assemble: non-positive triangle area");
        const auto g = p1_gradients(c, area);
        std::array<Vec2, 3> tg;
        for (int i = 0; i < 3; ++i)
            tg[i] = {coeff.theta(0, 0) * g[i].x + coeff.theta(0, 1) * g[i].y,
                     coeff.theta(1, 0) * g[i].x + coeff.theta(1, 1) * g[i].y};
        const auto& vid = mesh.triangles[t].v;
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                const double k = area * dot(g[i], tg[j]);
                entries.emplace_back(vid[i], vid[j], k);
                if (j != i) entries.emplace_back(vid[j], vid[i], k);
            }
        }
    }
    return SparseOperator::from_triplets(mesh.num_vertices(), mesh.num_vertices(), entries);
}

SparseOperator assemble_mass_unconstrained(const Mesh& mesh) {
    std::vector<Triplet> entries;
    entries.reserve(9 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double area = triangle_area(mesh, t);
        const auto& vid = mesh.triangles[t].v;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                entries.emplace_back(vid[i], vid[j], i == j ? area / 6.0 : area / 12.0);
    }
    return SparseOperator::from_triplets(mesh.num_vertices(), mesh.num_vertices(), entries);
}

SparseOperator assemble_stiffness(const FeSpace& space, const CoefficientField& theta) {
    SparseOperator a = triple_product(space.expansion,
                                      assemble_stiffness_unconstrained(*space.mesh, theta));
    CholeskyFactor check(a, "stiffness");  // pivot check: SPD or meshing bug
    return a;
}

SparseOperator assemble_mass(const FeSpace& space) {
    SparseOperator m = triple_product(space.expansion, assemble_mass_unconstrained(*space.mesh));
    CholeskyFactor check(m, "mass");
    return m;
}

Vector assemble_load(const FeSpace& space, const std::function<double(double, double)>& f) {
    const Mesh& mesh = *space.mesh;
    Vector b = Vector::Zero(mesh.num_vertices());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.corners(t);
        const double area = triangle_area(mesh, t);
        const std::array<Vec2, 3> mid{midpoint(c[0], c[1]), midpoint(c[1], c[2]),
                                      midpoint(c[2], c[0])};
        const std::array<double, 3> fm{f(mid[0].x, mid[0].y), f(mid[1].x, mid[1].y),
                                       f(mid[2].x, mid[2].y)};
        const auto& vid = mesh.triangles[t].v;
        // hat i is 1/2 at the two midpoints of its incident edges, 0 opposite
        b[vid[0]] += (area / 3.0) * 0.5 * (fm[0] + fm[2]);
        b[vid[1]] += (area / 3.0) * 0.5 * (fm[0] + fm[1]);
        b[vid[2]] += (area / 3.0) * 0.5 * (fm[1] + fm[2]);
    }
    return space.expansion.apply_transpose(b);
}

Vector expand(const FeSpace& space, const Vector& coeffs) {
    if (coeffs.size() != space.dim()) throw SpaceError("expand: coefficient size mismatch");
    return space.expansion.apply(coeffs);
}

double evaluate_in_triangle(const Mesh& mesh, const Vector& nodal, int t, Vec2 p) {
    const auto c = mesh.corners(t);
    const auto l = barycentric(c[0], c[1], c[2], p);
    const auto& vid = mesh.triangles[t].v;
    return l[0] * nodal[vid[0]] + l[1] * nodal[vid[1]] + l[2] * nodal[vid[2]];
}

double evaluate(const FeSpace& space, const Vector& coeffs, Vec2 p) {
    const Mesh& mesh = *space.mesh;
    const Vector nodal = expand(space, coeffs);
    int best = -1;
    double best_area = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.corners(t);
        const auto l = barycentric(c[0], c[1], c[2], p);
        if (std::min({l[0], l[1], l[2]}) >= -1e-10) {
            const double area = signed_area(c[0], c[1], c[2]);
            if (best < 0 || area < best_area) {
                best = t;
                best_area = area;
            }
        }
    }
    if (best < 0) throw SpaceError("evaluate: point outside the domain");
    return evaluate_in_triangle(mesh, nodal, best, p);
}

double h1_seminorm_sq(const FeSpace& space, const Vector& coeffs) {
    const Mesh& mesh = *space.mesh;
    const Vector nodal = expand(space, coeffs);
    double sum = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.corners(t);
        const double area = signed_area(c[0], c[1], c[2]);
        const auto g = p1_gradients(c, area);
        const auto& vid = mesh.triangles[t].v;
        Vec2 grad{0.0, 0.0};
        for (int i = 0; i < 3; ++i) grad = grad + nodal[vid[i]] * g[i];
        sum += area * dot(grad, grad);
    }
    return sum;
}

double constrained_edge_mismatch(const FeSpace& space, const Vector& coeffs,
                                 int samples_per_edge) {
    const Mesh& mesh = *space.mesh;
    if (space.hanging.empty()) return 0.0;
    const Vector nodal = expand(space, coeffs);
    double worst = 0.0;
    for (const auto& rec : space.hanging) {
        const Vec2 a = mesh.vertices[rec.edge[0]];
        const Vec2 b = mesh.vertices[rec.edge[1]];
        for (int s = 1; s <= samples_per_edge; ++s) {
            const double t = static_cast<double>(s) / (samples_per_edge + 1);
            const Vec2 p = a + t * (b - a);
            double lo = 0.0, hi = 0.0;
            bool any = false;
            for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
                const auto c = mesh.corners(tri);
                const auto l = barycentric(c[0], c[1], c[2], p);
                if (std::min({l[0], l[1], l[2]}) < -1e-10) continue;
                const double value = evaluate_in_triangle(mesh, nodal, tri, p);
                if (!any) {
                    lo = hi = value;
                    any = true;
                } else {
                    lo = std::min(lo, value);
                    hi = std::max(hi, value);
                }
            }
            if (any) worst = std::max(worst, hi - lo);
        }
    }
    return worst;
}

}  // namespace sscmg
