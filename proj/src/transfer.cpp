#include "sscmg/transfer.hpp"

#include <cmath>
#include <map>

namespace sscmg {

namespace {

// Coefficients of the coarse-side function value at point x, expressed on
// coarse free DoFs. The containing coarse triangle is the parent of any fine
// triangle incident to the vertex.
std::map<int, double> coarse_value_row(const FeSpace& coarse, int parent, Vec2 x) {
    const Mesh& cm = *coarse.mesh;
    const auto c = cm.corners(parent);
    const auto l = barycentric(c[0], c[1], c[2], x);
    if (std::min({l[0], l[1], l[2]}) < -1e-9)
        throw TransferError("build_prolongation: fine vertex escapes its parent triangle "
                            "(spaces are not nested)");
    std::map<int, double> row;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(l[i]) < 1e-14) continue;
        const int cv = cm.triangles[parent].v[i];
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(coarse.expansion.m,
                                                                            cv);
             it; ++it)
            row[static_cast<int>(it.col())] += l[i] * it.value();
    }
    return row;
}

std::vector<int> fine_vertex_parents(const FeSpace& fine) {
    const Mesh& fm = *fine.mesh;
    std::vector<int> parent(fm.num_vertices(), -1);
    for (int t = 0; t < fm.num_triangles(); ++t) {
        const int p = fm.triangles[t].parent;
        if (p < 0) throw TransferError("build_prolongation: fine mesh has no parent links");
        for (int v : fm.triangles[t].v)
            if (parent[v] < 0) parent[v] = p;
    }
    return parent;
}

}  // namespace

Prolongation build_prolongation(const FeSpace& coarse, const FeSpace& fine) {
    const Mesh& fm = *fine.mesh;
    if (fm.level != coarse.mesh->level + 1)
        throw TransferError("build_prolongation: meshes are not consecutive levels");
    const auto parents = fine_vertex_parents(fine);

    std::vector<Triplet> entries;
    for (int dof = 0; dof < fine.dim(); ++dof) {
        const int v = fine.free_dofs[dof];
        for (const auto& [col, w] : coarse_value_row(coarse, parents[v], fm.vertices[v]))
            entries.emplace_back(dof, col, w);
    }
    return SparseOperator::from_triplets(fine.dim(), coarse.dim(), entries);
}

double galerkin_defect(const SparseOperator& a_coarse, const Prolongation& p,
                       const SparseOperator& a_fine) {
    if (p.rows() != a_fine.rows() || p.cols() != a_coarse.rows())
        throw TransferError("galerkin_defect: dimension mismatch");
    const SparseOperator petal = triple_product(p, a_fine);
    Eigen::SparseMatrix<double, Eigen::RowMajor> diff = a_coarse.m - petal.m;
    double d = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(diff, k); it; ++it)
            d = std::max(d, std::abs(it.value()));
    const double scale = a_coarse.max_abs();
    return scale > 0.0 ? d / scale : d;
}

double prolongation_exactness_defect(const FeSpace& coarse, const FeSpace& fine,
                                     const Prolongation& p) {
    const Mesh& fm = *fine.mesh;
    const auto parents = fine_vertex_parents(fine);
    // nodal values of every prolonged coarse basis function at every fine
    // vertex, via the fine constraint structure
    const SparseOperator lifted = multiply(fine.expansion, p);
    double defect = 0.0;
    for (int v = 0; v < fm.num_vertices(); ++v) {
        // coarse basis functions vanish on the boundary, so the row is empty
        // there and must match the zero boundary rows of the fine expansion
        const std::map<int, double> expected =
            coarse_value_row(coarse, parents[v], fm.vertices[v]);
        std::map<int, double> got;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(lifted.m, v); it; ++it)
            got[static_cast<int>(it.col())] = it.value();
        for (const auto& [col, w] : expected)
            defect = std::max(defect, std::abs(w - (got.count(col) ? got.at(col) : 0.0)));
        for (const auto& [col, w] : got)
            if (!expected.count(col)) defect = std::max(defect, std::abs(w));
    }
    return defect;
}

}  // namespace sscmg
