#include "sscmg/smoother.hpp"

#include <algorithm>
#include <cmath>

namespace sscmg {

namespace {

// Safety margin on power-iteration estimates keeps rho(R^i A^i) <= 1/k while
// staying within the 1e-5 reporting tolerance on the 1/k target.
constexpr double kLambdaSafety = 1.0 + 1e-6;

SparseOperator composed_prolongation(const std::vector<LevelView>& levels, int from, int to) {
    // product P_to * ... * P_{from+1}
    if (from == to) throw SmootherError("composed_prolongation: empty product");
    SparseOperator acc = *levels[from + 1].prolongation;
    for (int j = from + 2; j <= to; ++j) acc = multiply(*levels[j].prolongation, acc);
    return acc;
}

Subspace make_coarse_subspace(const std::vector<LevelView>& levels, int k) {
    Subspace s;
    s.embedding = composed_prolongation(levels, 0, k);
    s.local_matrix = *levels[0].stiffness;
    s.source_level = 0;
    s.source_dofs.resize(levels[0].space->dim());
    for (int j = 0; j < levels[0].space->dim(); ++j) s.source_dofs[j] = j;
    s.exact = true;
    s.factor = std::make_shared<CholeskyFactor>(s.local_matrix, "coarse stiffness");
    return s;
}

Subspace make_exact_subset_subspace(const SparseOperator& a, std::vector<int> dofs) {
    Subspace s;
    s.dofs = std::move(dofs);
    s.source_dofs = s.dofs;
    s.local_matrix = a.submatrix(s.dofs);
    s.exact = true;
    s.factor = std::make_shared<CholeskyFactor>(s.local_matrix, "subdomain stiffness");
    return s;
}

std::vector<int> dofs_supported_in(const std::vector<std::vector<int>>& support,
                                   const std::vector<char>& element_mask) {
    std::vector<int> dofs;
    for (std::size_t j = 0; j < support.size(); ++j) {
        bool inside = true;
        for (int e : support[j]) {
            if (!element_mask[e]) {
                inside = false;
                break;
            }
        }
        if (inside) dofs.push_back(static_cast<int>(j));
    }
    return dofs;
}

void check_coverage(const Decomposition& d, int dim) {
    std::vector<char> covered(dim, 0);
    for (std::size_t i = 1; i < d.subspaces.size(); ++i)
        for (int j : d.subspaces[i].dofs) covered[j] = 1;
    for (int j = 0; j < dim; ++j)
        if (!covered[j])
            throw SmootherError("decomposition: free DoF " + std::to_string(j) +
                                " belongs to no subspace (cover too small to span the level)");
}

std::vector<char> elements_mask(int n_elements, const std::vector<int>& set) {
    std::vector<char> mask(n_elements, 0);
    for (int e : set) mask[e] = 1;
    return mask;
}

}  // namespace

std::vector<std::vector<int>> dof_support_elements(const FeSpace& space) {
    const auto incidence = vertex_to_elements(*space.mesh);
    const SparseOperator ct = space.expansion.transpose();
    std::vector<std::vector<int>> support(space.dim());
    for (int j = 0; j < space.dim(); ++j) {
        auto& elems = support[j];
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(ct.m, j); it; ++it) {
            if (it.value() == 0.0) continue;
            const auto& inc = incidence[it.col()];
            elems.insert(elems.end(), inc.begin(), inc.end());
        }
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    }
    return support;
}

Decomposition decomposition_uniform(const std::vector<LevelView>& levels, int k,
                                    const SubdomainCover& cover) {
    if (k < 1 || k >= static_cast<int>(levels.size()))
        throw SmootherError("decomposition_uniform: bad level");
    Decomposition d;
    d.level = k;
    d.stiffness = levels[k].stiffness;
    d.subspaces.push_back(make_coarse_subspace(levels, k));

    const FeSpace& space = *levels[k].space;
    const auto support = dof_support_elements(space);
    const int ntri = space.mesh->num_triangles();
    for (const auto& grown : cover.overlapping) {
        auto dofs = dofs_supported_in(support, elements_mask(ntri, grown));
        if (dofs.empty()) continue;
        d.subspaces.push_back(make_exact_subset_subspace(*d.stiffness, std::move(dofs)));
    }
    check_coverage(d, space.dim());
    return d;
}

Decomposition decomposition_nested_local(const std::vector<LevelView>& levels, int k) {
    if (k < 1 || k >= static_cast<int>(levels.size()))
        throw SmootherError("decomposition_nested_local: bad level");
    Decomposition d;
    d.level = k;
    d.stiffness = levels[k].stiffness;
    d.subspaces.push_back(make_coarse_subspace(levels, k));

    for (int i = 1; i <= k; ++i) {
        const FeSpace& space_i = *levels[i].space;
        if (!levels[i].region_elements)
            throw SmootherError("decomposition_nested_local: level " + std::to_string(i) +
                                " has no refinement region");
        auto dofs = dofs_supported_in(dof_support_elements(space_i), *levels[i].region_elements);
        if (dofs.empty())
            throw SmootherError("decomposition_nested_local: subspace " + std::to_string(i) +
                                " is empty (region too small)");

        Subspace s;
        // A^i is the same matrix at every level k >= i
        s.local_matrix = levels[i].stiffness->submatrix(dofs);
        s.source_level = i;
        s.source_dofs = dofs;
        s.exact = false;
        const double estimate = power_iteration_spectral_radius(s.local_matrix);
        double diag_max = 0.0;
        for (int r = 0; r < s.local_matrix.rows(); ++r)
            diag_max = std::max(diag_max, s.local_matrix.m.coeff(r, r));
        s.lambda = std::max(estimate, diag_max) * kLambdaSafety;
        s.scale = 1.0 / (s.lambda * k);

        std::vector<Triplet> sel;
        for (std::size_t c = 0; c < dofs.size(); ++c)
            sel.emplace_back(dofs[c], static_cast<int>(c), 1.0);
        SparseOperator selection = SparseOperator::from_triplets(
            space_i.dim(), static_cast<int>(dofs.size()), sel);
        s.embedding = i == k ? std::move(selection)
                             : multiply(composed_prolongation(levels, i, k), selection);
        s.dofs.clear();
        d.subspaces.push_back(std::move(s));
    }
    return d;
}

Decomposition decomposition_nonnested_local(const std::vector<LevelView>& levels, int k,
                                            const SubdomainCover& cover) {
    if (k < 1 || k >= static_cast<int>(levels.size()))
        throw SmootherError("decomposition_nonnested_local: bad level");
    Decomposition d;
    d.level = k;
    d.stiffness = levels[k].stiffness;
    d.subspaces.push_back(make_coarse_subspace(levels, k));

    const FeSpace& space = *levels[k].space;
    const auto support = dof_support_elements(space);
    const int ntri = space.mesh->num_triangles();
    for (const auto& grown : cover.overlapping) {
        auto dofs = dofs_supported_in(support, elements_mask(ntri, grown));
        if (dofs.empty()) continue;
        d.subspaces.push_back(make_exact_subset_subspace(*d.stiffness, std::move(dofs)));
    }
    check_coverage(d, space.dim());
    return d;
}

Vector Subspace::restrict_residual(const Vector& r) const {
    if (!dofs.empty()) {
        Vector out(dofs.size());
        for (std::size_t i = 0; i < dofs.size(); ++i) out[i] = r[dofs[i]];
        return out;
    }
    return embedding.apply_transpose(r);
}

Vector Subspace::solve_local(const Vector& r) const {
    if (exact) return factor->solve(r);
    return scale * r;
}

void Subspace::add_correction(Vector& z, const Vector& c) const {
    if (!dofs.empty()) {
        for (std::size_t i = 0; i < dofs.size(); ++i) z[dofs[i]] += c[i];
        return;
    }
    z += embedding.apply(c);
}

Vector ssc_sweep(Vector z, const Vector& f, const Decomposition& d, SweepOrder order) {
    if (z.size() != d.dim() || f.size() != d.dim())
        throw SmootherError("ssc_sweep: vector size mismatch");
    auto substep = [&](int i) {
        const Vector r = f - d.stiffness->apply(z);
        const Subspace& s = d.subspaces[i];
        s.add_correction(z, s.solve_local(s.restrict_residual(r)));
    };
    if (order == SweepOrder::forward) {
        for (int i = d.p(); i >= 0; --i) substep(i);
    } else {
        for (int i = 0; i <= d.p(); ++i) substep(i);
    }
    return z;
}

Vector ssc_sweep_symmetric(Vector z, const Vector& f, const Decomposition& d) {
    z = ssc_sweep(std::move(z), f, d, SweepOrder::forward);
    return ssc_sweep(std::move(z), f, d, SweepOrder::backward);
}

Eigen::MatrixXd dense_subspace_projector(const Decomposition& d, int i) {
    const int n = d.dim();
    const Subspace& s = d.subspaces.at(i);
    Eigen::MatrixXd t(n, n);
    for (int j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e[j] = 1.0;
        Vector z = Vector::Zero(n);
        s.add_correction(z, s.solve_local(s.restrict_residual(d.stiffness->apply(e))));
        t.col(j) = z;
    }
    return t;
}

}  // namespace sscmg
