#pragma once

#include "sscmg/mesh.hpp"
#include "sscmg/sparse.hpp"

#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace sscmg {

struct SpaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Constant symmetric positive definite diffusion coefficient.
struct CoefficientField {
    Eigen::Matrix2d theta = Eigen::Matrix2d::Identity();

    CoefficientField() = default;
    explicit CoefficientField(const Eigen::Matrix2d& t);
};

/// Constrained P1 space: vertices that are neither on the boundary nor
/// hanging carry the degrees of freedom; the expansion operator maps free-DoF
/// coefficients to nodal values at every vertex (identity rows for free
/// vertices, resolved averages for hanging ones, zero rows on the boundary).
struct FeSpace {
    std::shared_ptr<const Mesh> mesh;
    std::vector<HangingRecord> hanging;  // in resolution order
    std::vector<int> free_dofs;          // vertex index per DoF, ascending
    std::vector<int> vertex_to_dof;      // -1 for constrained vertices
    SparseOperator expansion;            // nvert x dim

    int dim() const { return static_cast<int>(free_dofs.size()); }
};

FeSpace build_space(std::shared_ptr<const Mesh> mesh);

/// Hanging values rewritten as weights on regular vertices by repeated
/// midpoint substitution; each weight list sums to one. Indexed by vertex,
/// empty for regular vertices.
std::vector<std::vector<std::pair<int, double>>> resolve_hanging_weights(
    const Mesh& mesh, const std::vector<HangingRecord>& records);

// All-vertex element assembly, no constraints applied. Exact for P1 with
// constant coefficients.
SparseOperator assemble_stiffness_unconstrained(const Mesh& mesh, const CoefficientField& theta);
SparseOperator assemble_mass_unconstrained(const Mesh& mesh);

// Constrained operators C^T (.) C on free DoFs; both are checked SPD.
SparseOperator assemble_stiffness(const FeSpace& space, const CoefficientField& theta);
SparseOperator assemble_mass(const FeSpace& space);

/// Load vector by the 3-point edge-midpoint rule (exact for quadratics),
/// then constrained.
Vector assemble_load(const FeSpace& space, const std::function<double(double, double)>& f);

/// Nodal values at every vertex from free-DoF coefficients.
Vector expand(const FeSpace& space, const Vector& coeffs);

/// Point evaluation; picks the deepest (smallest) containing triangle when
/// the point lies on shared geometry. Throws when outside the domain.
double evaluate(const FeSpace& space, const Vector& coeffs, Vec2 p);

/// Barycentric interpolation of nodal values inside a chosen triangle.
double evaluate_in_triangle(const Mesh& mesh, const Vector& nodal, int t, Vec2 p);

double h1_seminorm_sq(const FeSpace& space, const Vector& coeffs);

/// Largest two-sided evaluation gap over sample points of all constrained
/// edges (0 when the mesh has none).
double constrained_edge_mismatch(const FeSpace& space, const Vector& coeffs,
                                 int samples_per_edge = 5);

}  // namespace sscmg
