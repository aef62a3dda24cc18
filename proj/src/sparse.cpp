#include "sscmg/sparse.hpp"

#include "sscmg/mesh_io.hpp"

#include <cmath>
#include <fstream>

namespace sscmg {

SparseOperator SparseOperator::from_triplets(int rows, int cols,
                                             const std::vector<Triplet>& entries) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> m(rows, cols);
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
    return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::transpose() const {
    Eigen::SparseMatrix<double, Eigen::RowMajor> t = m.transpose();
    return SparseOperator(std::move(t));
}

double SparseOperator::max_abs() const {
    double v = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, k); it; ++it)
            v = std::max(v, std::abs(it.value()));
    return v;
}

double SparseOperator::symmetry_defect() const {
    if (rows() != cols()) throw LinearAlgebraError("symmetry_defect: operator not square");
    Eigen::SparseMatrix<double, Eigen::RowMajor> diff = m - Eigen::SparseMatrix<double, Eigen::RowMajor>(m.transpose());
    double d = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(diff, k); it; ++it)
            d = std::max(d, std::abs(it.value()));
    const double scale = max_abs();
    return scale > 0.0 ? d / scale : 0.0;
}

SparseOperator SparseOperator::submatrix(const std::vector<int>& idx) const {
    std::vector<int> inverse(rows(), -1);
    for (std::size_t i = 0; i < idx.size(); ++i) inverse[idx[i]] = static_cast<int>(i);
    std::vector<Triplet> entries;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, idx[i]); it; ++it) {
            const int j = inverse[it.col()];
            if (j >= 0) entries.emplace_back(static_cast<int>(i), j, it.value());
        }
    }
    return from_triplets(static_cast<int>(idx.size()), static_cast<int>(idx.size()), entries);
}

SparseOperator multiply(const SparseOperator& a, const SparseOperator& b) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> r = a.m * b.m;
    return SparseOperator(std::move(r));
}

SparseOperator triple_product(const SparseOperator& p, const SparseOperator& a) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> r = p.m.transpose() * (a.m * p.m);
    return SparseOperator(std::move(r));
}

CholeskyFactor::CholeskyFactor(const SparseOperator& a, const std::string& what) : dim_(a.rows()) {
    if (a.rows() != a.cols())
        throw LinearAlgebraError("CholeskyFactor: " + what + " is not square");
    Eigen::SparseMatrix<double> col(a.m);
    llt_.compute(col);
    if (llt_.info() != Eigen::Success)
        throw LinearAlgebraError("CholeskyFactor: " + what +
                                 " is not symmetric positive definite (pivot failure)");
}

Vector CholeskyFactor::solve(const Vector& rhs) const {
    if (rhs.size() != dim_) throw LinearAlgebraError("CholeskyFactor::solve: size mismatch");
    return llt_.solve(rhs);
}

double power_iteration_spectral_radius(const SparseOperator& a, double rel_tol, int max_iters) {
    const int n = a.rows();
    if (n == 0) return 0.0;
    if (n == 1) return std::abs(a.m.coeff(0, 0));
    // fixed seed: the estimate is part of operator construction and must be
    // reproducible run to run
    Vector v(n);
    std::uint64_t state = 0x2545f4914f6cdd1dULL;
    for (int i = 0; i < n; ++i) {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        v[i] = 0.5 + static_cast<double>(state % 1000003) / 1000003.0;
    }
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Vector w = a.apply(v);
        const double next = v.dot(w);
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        v = w / nw;
        if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::abs(lambda);
}

void write_matrix_market(const SparseOperator& a, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw LinearAlgebraError("cannot open file for writing: " + path);
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << a.rows() << ' ' << a.cols() << ' ' << a.m.nonZeros() << '\n';
    for (int k = 0; k < a.m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a.m, k); it; ++it)
            os << (it.row() + 1) << ' ' << (it.col() + 1) << ' ' << format_g17(it.value()) << '\n';
}

}  // namespace sscmg
