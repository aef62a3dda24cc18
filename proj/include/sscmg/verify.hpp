#pragma once

#include "sscmg/multigrid.hpp"

#include <cstdint>
#include <functional>
#include <random>

namespace sscmg {

struct VerifyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a dense oracle would exceed the dimension cap.
struct DenseCapError : VerifyError {
    using VerifyError::VerifyError;
};

using DenseMatrix = Eigen::MatrixXd;

constexpr int kDefaultDenseCap = 2500;

void check_dense_cap(int dim, int cap);

/// Columns of a black-box linear map applied to unit vectors.
DenseMatrix densify(const std::function<Vector(const Vector&)>& op, int dim,
                    int cap = kDefaultDenseCap);

/// Dense smoothing error operator S_k from homogeneous symmetric sweeps.
/// Level 0 is solved exactly and has no smoother, so k must be >= 1.
DenseMatrix smoother_error_matrix(const Hierarchy& h, int k, int cap = kDefaultDenseCap);

/// Dense multigrid error operator E_k: column j is vcycle(k, e_j, 0).
DenseMatrix mg_error_matrix(const Hierarchy& h, int k, int cap = kDefaultDenseCap);

struct DeltaEstimate {
    double delta = 0.0;         // max eigenvalue of the pencil (sym(A S), A)
    double min_eig = 0.0;       // for the positive-semidefiniteness check
    double sym_residual = 0.0;  // ||A S - (A S)^T||_max / ||A S||_max
};

/// Extreme eigenvalues of S in the energy inner product. Throws when S fails
/// the a-symmetry pre-check (1e-8) or A is not SPD.
DeltaEstimate estimate_delta(const DenseMatrix& s, const SparseOperator& a);

/// delta = 1 - (2 - w1) / (K0 (1 + K1)^2); values >= 1 mean the bound is
/// vacuous.
double theoretical_delta(double w1, double k0, double k1);

struct SubsolverSpectrum {
    std::vector<double> rho;  // rho(R^i A^i) per subspace
    double w1 = 0.0;
};

/// Exact subsolvers contribute exactly 1; Richardson subsolvers report the
/// power-iteration estimate of rho(A^i) times the stored scale.
SubsolverSpectrum estimate_w1(const Decomposition& d);

/// max generalized eigenvalue of (sym(A E), A): the energy-norm bound of an
/// a-symmetric operator.
double energy_spectral_bound(const DenseMatrix& e, const SparseOperator& a);

/// Dense a-orthogonal projection onto the range of the prolongation:
/// P (P^T A P)^{-1} P^T A.
DenseMatrix dense_a_projection(const Prolongation& p, const SparseOperator& a_fine);

/// Hierarchical splitting of a level-k function in the nested-local
/// application: v = Q^_0 v + sum_i (Q^_i - Q^_{i-1}) v with components in the
/// decomposition's subspaces (level-i coefficient vectors).
struct HierarchicalComponents {
    std::vector<Vector> components;        // i = 0..k, level-i coefficients
    double reconstruction_defect = 0.0;    // ||v - sum_i components_i||_inf at level k
    double support_leak = 0.0;             // largest coefficient escaping its subspace
};

HierarchicalComponents hierarchical_decomposition(const Vector& v, const Hierarchy& h, int k,
                                                  int cap = kDefaultDenseCap);

/// Measured stable-decomposition constant: max over random unit-energy
/// probes of sum_i ((R^i)^{-1} v_i, v_i) / a(v, v). Nested-local hierarchies
/// use the hierarchical splitting, the others greedy support splitting.
double estimate_K0(const Hierarchy& h, int k, int probes = 200, std::uint64_t seed = 0,
                   int cap = kDefaultDenseCap);

struct LemmaChainReport {
    double monotonicity1 = 0.0;
    double monotonicity2 = 0.0;
    double smoothing = 0.0;
    double approximation = 0.0;
    double max_violation() const;
};

/// Relative violations of the two monotonicity inequalities, the smoothing
/// property, and the approximation property over random probes.
LemmaChainReport check_lemma_chain(const DenseMatrix& s, const SparseOperator& a,
                                   const DenseMatrix& a_projection, double delta, int m,
                                   int probes = 100, std::uint64_t seed = 0);

struct PsiCheck {
    std::vector<double> psi;
    bool non_increasing = true;
};

PsiCheck check_psi(const std::vector<int>& m, const std::vector<double>& delta);

struct LevelVerification {
    int k = 0;
    int dim = 0;
    int m = 0;
    double sym_residual = 0.0;
    double delta = 0.0;
    double min_eig = 0.0;
    double w1 = 0.0;
    double psi = 0.0;
    double gamma = 0.0;   // 1 / (1 + 2 m (1 - delta)) from the measured delta
    double rho_e = -1.0;  // -1 when the dense cap skipped it
    double recursion_defect = -1.0;
    double lemma_violation = -1.0;
    double k0 = -1.0;
    int g0 = -1;          // -1 when the application has no cover
    double k1 = -1.0;     // closed form: 2 or 2 (1 + g0)
    double delta_theory = -1.0;
};

struct AssumptionReport {
    std::vector<LevelVerification> levels;
    bool assumption1 = true;  // a-symmetry and positive semidefiniteness
    bool assumption2 = true;  // delta_k < 1
    bool assumption3 = true;  // psi_k non-increasing
    bool w1_ok = true;        // w1 < 2
    bool gamma_bound = true;  // rho_E(E_k) <= gamma_k + 1e-6 wherever computed
    bool all_pass() const {
        return assumption1 && assumption2 && assumption3 && w1_ok && gamma_bound;
    }
};

struct VerifyOptions {
    int probes = 100;       // lemma-chain probes per level
    int k0_probes = 200;    // K0 probe vectors
    std::uint64_t seed = 0;
    int dense_cap = kDefaultDenseCap;
};

AssumptionReport run_verification(const Hierarchy& h, const VerifyOptions& options = {});

Vector random_vector(int n, std::mt19937_64& rng);

}  // namespace sscmg
