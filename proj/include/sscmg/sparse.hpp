#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>
#include <vector>

namespace sscmg {

using Vector = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

struct LinearAlgebraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sparse linear operator in compressed-row storage.
struct SparseOperator {
    Eigen::SparseMatrix<double, Eigen::RowMajor> m;

    SparseOperator() = default;
    explicit SparseOperator(Eigen::SparseMatrix<double, Eigen::RowMajor> mat) : m(std::move(mat)) {
        m.makeCompressed();
    }

    static SparseOperator from_triplets(int rows, int cols, const std::vector<Triplet>& entries);

    int rows() const { return static_cast<int>(m.rows()); }
    int cols() const { return static_cast<int>(m.cols()); }
    Vector apply(const Vector& x) const { return m * x; }
    Vector apply_transpose(const Vector& x) const { return m.transpose() * x; }
    SparseOperator transpose() const;

    double max_abs() const;
    /// ||B - B^T||_max / ||B||_max (0 for the zero operator).
    double symmetry_defect() const;

    /// Principal submatrix on the given (strictly increasing) index set.
    SparseOperator submatrix(const std::vector<int>& idx) const;

    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(m); }
};

SparseOperator multiply(const SparseOperator& a, const SparseOperator& b);
/// P^T A P, the Galerkin triple product.
SparseOperator triple_product(const SparseOperator& p, const SparseOperator& a);

/// Cached sparse Cholesky factorization of an SPD operator. Construction
/// fails (throws) when the operator is not SPD, which doubles as the pivot
/// check used by the assemblers.
class CholeskyFactor {
public:
    explicit CholeskyFactor(const SparseOperator& a, const std::string& what = "operator");
    Vector solve(const Vector& rhs) const;
    int dim() const { return dim_; }

private:
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
    int dim_ = 0;
};

/// Largest eigenvalue of a symmetric positive semidefinite operator by power
/// iteration (relative tolerance on successive Rayleigh quotients).
double power_iteration_spectral_radius(const SparseOperator& a, double rel_tol = 1e-8,
                                       int max_iters = 5000);

/// MatrixMarket coordinate-format text export.
void write_matrix_market(const SparseOperator& a, const std::string& path);

}  // namespace sscmg
