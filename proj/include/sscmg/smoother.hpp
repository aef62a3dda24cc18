#pragma once

#include "sscmg/mesh.hpp"
#include "sscmg/space.hpp"
#include "sscmg/transfer.hpp"

#include <memory>
#include <vector>

namespace sscmg {

struct SmootherError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Substep order of a sweep. Forward runs subspaces p..0 (corrections end at
/// the coarse space), backward runs 0..p; the symmetric sweep is one forward
/// pass followed by one backward pass.
enum class SweepOrder { forward, backward };

/// One subspace of a level decomposition. Either a coordinate subset of the
/// level's free DoFs (dofs nonempty) or an explicitly embedded space such as
/// the coarse space carried up by composed prolongations. The subsolver is an
/// exact factorization of the local matrix or scaled Richardson.
struct Subspace {
    std::vector<int> dofs;                         // strictly increasing; empty -> embedded
    SparseOperator embedding;                      // level_dim x n_i when dofs is empty
    SparseOperator local_matrix;                   // A^i
    std::vector<int> source_dofs;                  // DoF indices in the source level's numbering
    int source_level = -1;                         // -1: this level; 0..k-1 for embedded spaces
    bool exact = true;
    std::shared_ptr<const CholeskyFactor> factor;  // exact subsolver
    double lambda = 0.0;                           // Richardson: safeguarded rho(A^i)
    double scale = 0.0;                            // Richardson: 1/(lambda * k)

    int dim() const {
        return dofs.empty() ? embedding.cols() : static_cast<int>(dofs.size());
    }
    Vector restrict_residual(const Vector& r) const;
    Vector solve_local(const Vector& r) const;
    void add_correction(Vector& z, const Vector& c) const;
};

/// Ordered subspace decomposition of one level; index 0 is the coarse space.
struct Decomposition {
    int level = 0;
    std::shared_ptr<const SparseOperator> stiffness;
    std::vector<Subspace> subspaces;

    int p() const { return static_cast<int>(subspaces.size()) - 1; }
    int dim() const { return stiffness->rows(); }
};

/// What the decomposition builders need to know about each level.
struct LevelView {
    const FeSpace* space = nullptr;
    std::shared_ptr<const SparseOperator> stiffness;
    const Prolongation* prolongation = nullptr;      // from the previous level
    const std::vector<char>* region_elements = nullptr;  // local apps: 1 for elements in the refined region
};

/// Elements touched by each DoF's constraint-expanded basis function.
std::vector<std::vector<int>> dof_support_elements(const FeSpace& space);

/// Overlapping-subdomain decomposition with exact subsolvers on a uniformly
/// refined level; subspace 0 is the coarse space with an exact solve.
Decomposition decomposition_uniform(const std::vector<LevelView>& levels, int k,
                                    const SubdomainCover& cover);

/// Nested local refinement: subspace i (1..k) collects the level-i DoFs
/// supported inside region i, embedded by composed prolongations and relaxed
/// by Richardson scaled with 1/(lambda^i k).
Decomposition decomposition_nested_local(const std::vector<LevelView>& levels, int k);

/// Local refinement with overlapping covers on the irregular level-k grid and
/// exact subsolvers; constraints are already folded into supports and A_k.
Decomposition decomposition_nonnested_local(const std::vector<LevelView>& levels, int k,
                                            const SubdomainCover& cover);

/// One successive-subspace-correction pass: for each subspace in order,
/// restrict the current algebraic residual, apply the subsolver, add the
/// embedded correction.
Vector ssc_sweep(Vector z, const Vector& f, const Decomposition& d, SweepOrder order);

/// Forward then backward pass; this is the multigrid smoother application.
Vector ssc_sweep_symmetric(Vector z, const Vector& f, const Decomposition& d);

/// Dense T^i = embed . subsolve . restrict . A, the oracle factors of the
/// sweep error operators.
Eigen::MatrixXd dense_subspace_projector(const Decomposition& d, int i);

}  // namespace sscmg
