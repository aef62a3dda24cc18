#pragma once

#include "sscmg/space.hpp"

namespace sscmg {

struct TransferError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Prolongation between nested constrained spaces: dim(fine) x dim(coarse),
/// column i holding the fine free-DoF coefficients of coarse basis function i.
/// Residual restriction is its transpose acting on algebraic residuals.
using Prolongation = SparseOperator;

Prolongation build_prolongation(const FeSpace& coarse, const FeSpace& fine);

/// ||A_coarse - P^T A_fine P||_max / ||A_coarse||_max.
double galerkin_defect(const SparseOperator& a_coarse, const Prolongation& p,
                       const SparseOperator& a_fine);

/// Largest nodal mismatch between each prolonged coarse basis function and
/// its coarse-side evaluation at every fine vertex (checks nestedness).
double prolongation_exactness_defect(const FeSpace& coarse, const FeSpace& fine,
                                     const Prolongation& p);

}  // namespace sscmg
