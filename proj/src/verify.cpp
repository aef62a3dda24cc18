#include "sscmg/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <unordered_map>

namespace sscmg {

void check_dense_cap(int dim, int cap) {
    if (dim > cap)
        throw DenseCapError("dense oracle dimension " + std::to_string(dim) +
                            " exceeds the cap " + std::to_string(cap) +
                            "; shrink J or the coarse mesh, or raise the cap");
}

Vector random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    return v;
}

DenseMatrix densify(const std::function<Vector(const Vector&)>& op, int dim, int cap) {
    check_dense_cap(dim, cap);
    DenseMatrix out(dim, dim);
    for (int j = 0; j < dim; ++j) {
        Vector e = Vector::Zero(dim);
        e[j] = 1.0;
        out.col(j) = op(e);
    }
    return out;
}

DenseMatrix smoother_error_matrix(const Hierarchy& h, int k, int cap) {
    if (k < 1 || k > h.J())
        throw VerifyError("smoother_error_matrix: level 0 is solved exactly; need 1 <= k <= J");
    const Decomposition& d = *h.levels[k].decomposition;
    const Vector zero_f = Vector::Zero(h.dim(k));
    return densify([&](const Vector& v) { return ssc_sweep_symmetric(v, zero_f, d); }, h.dim(k),
                   cap);
}

DenseMatrix mg_error_matrix(const Hierarchy& h, int k, int cap) {
    if (k < 0 || k > h.J()) throw VerifyError("mg_error_matrix: level out of range");
    const Vector zero_f = Vector::Zero(h.dim(k));
    return densify([&](const Vector& v) { return vcycle(h, k, v, zero_f); }, h.dim(k), cap);
}

DeltaEstimate estimate_delta(const DenseMatrix& s, const SparseOperator& a) {
    const int n = static_cast<int>(s.rows());
    if (s.cols() != n || a.rows() != n)
        throw VerifyError("estimate_delta: dimension mismatch");
    const DenseMatrix ad = a.dense();
    const DenseMatrix as = ad * s;

    DeltaEstimate est;
    // normalize by the operator scales, not by ||A S||: an exactly-zero
    // smoother error leaves only roundoff noise in A S
    const double scale =
        ad.cwiseAbs().maxCoeff() * std::max(1.0, s.cwiseAbs().maxCoeff());
    est.sym_residual = scale > 0.0 ? (as - as.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
    if (est.sym_residual > 1e-8)
        throw VerifyError("estimate_delta: operator is not a-symmetric (residual " +
                          std::to_string(est.sym_residual) + ")");

    const DenseMatrix b = 0.5 * (as + as.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> solver(b, ad);
    if (solver.info() != Eigen::Success)
        throw VerifyError("estimate_delta: generalized eigensolve failed (A not SPD?)");
    est.min_eig = solver.eigenvalues().minCoeff();
    est.delta = solver.eigenvalues().maxCoeff();
    return est;
}

double theoretical_delta(double w1, double k0, double k1) {
    if (!(k0 > 0.0)) throw VerifyError("theoretical_delta: K0 must be positive");
    if (!(w1 < 2.0)) throw VerifyError("theoretical_delta: w1 must be below 2");
    if (k1 < 0.0) throw VerifyError("theoretical_delta: K1 must be nonnegative");
    return 1.0 - (2.0 - w1) / (k0 * (1.0 + k1) * (1.0 + k1));
}

SubsolverSpectrum estimate_w1(const Decomposition& d) {
    SubsolverSpectrum spec;
    for (const Subspace& s : d.subspaces) {
        const double rho =
            s.exact ? 1.0 : s.scale * power_iteration_spectral_radius(s.local_matrix);
        spec.rho.push_back(rho);
        spec.w1 = std::max(spec.w1, rho);
    }
    return spec;
}

double energy_spectral_bound(const DenseMatrix& e, const SparseOperator& a) {
    const DenseMatrix ad = a.dense();
    const DenseMatrix ae = ad * e;
    const DenseMatrix b = 0.5 * (ae + ae.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> solver(b, ad);
    if (solver.info() != Eigen::Success)
        throw VerifyError("energy_spectral_bound: generalized eigensolve failed");
    return solver.eigenvalues().maxCoeff();
}

DenseMatrix dense_a_projection(const Prolongation& p, const SparseOperator& a_fine) {
    const DenseMatrix pd = p.dense();
    const DenseMatrix ad = a_fine.dense();
    const DenseMatrix gram = pd.transpose() * ad * pd;
    return pd * gram.llt().solve(pd.transpose() * ad);
}

namespace {

// Uniform-refinement companion spaces Vbar_0..Vbar_k of the whole domain,
// the L2 machinery on them, and the inclusion of the locally refined level-k
// space into Vbar_k.
struct UniformLadder {
    std::vector<std::shared_ptr<const Mesh>> meshes;
    std::vector<FeSpace> spaces;
    std::vector<SparseOperator> mass;
    std::vector<std::unique_ptr<CholeskyFactor>> mass_factor;
    std::vector<Prolongation> prolongations;  // i-1 -> i
    std::vector<SparseOperator> lifts;        // Vbar_i -> Vbar_k (lifts[k] unused)
    SparseOperator inclusion;                 // V_k -> Vbar_k coefficients
};

struct CoordKey {
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    bool operator==(const CoordKey&) const = default;
};
struct CoordKeyHash {
    std::size_t operator()(const CoordKey& k) const {
        std::uint64_t h = k.x * 0x9e3779b97f4a7c15ULL;
        h ^= k.y + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};
CoordKey coord_key(Vec2 p) {
    return {std::bit_cast<std::uint64_t>(p.x), std::bit_cast<std::uint64_t>(p.y)};
}

std::unordered_map<CoordKey, int, CoordKeyHash> vertex_lookup(const Mesh& mesh) {
    std::unordered_map<CoordKey, int, CoordKeyHash> map;
    for (int v = 0; v < mesh.num_vertices(); ++v) map[coord_key(mesh.vertices[v])] = v;
    return map;
}

// Row of the inclusion matrix: the level-k function value at point x as a
// combination of level-k free DoFs.
std::map<int, double> value_row(const FeSpace& space, Vec2 x) {
    const Mesh& mesh = *space.mesh;
    int best = -1;
    double best_area = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.corners(t);
        const auto l = barycentric(c[0], c[1], c[2], x);
        if (std::min({l[0], l[1], l[2]}) >= -1e-10) {
            const double area = signed_area(c[0], c[1], c[2]);
            if (best < 0 || area < best_area) {
                best = t;
                best_area = area;
            }
        }
    }
    if (best < 0) throw VerifyError("hierarchical_decomposition: ladder vertex outside domain");
    const auto c = mesh.corners(best);
    const auto l = barycentric(c[0], c[1], c[2], x);
    std::map<int, double> row;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(l[i]) < 1e-14) continue;
        const int v = mesh.triangles[best].v[i];
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(space.expansion.m, v);
             it; ++it)
            row[static_cast<int>(it.col())] += l[i] * it.value();
    }
    return row;
}

UniformLadder build_uniform_ladder(const Hierarchy& h, int k, int cap) {
    UniformLadder ladder;
    ladder.meshes.push_back(std::make_shared<Mesh>(unit_square_coarse(h.config.coarse_n)));
    for (int i = 1; i <= k; ++i)
        ladder.meshes.push_back(std::make_shared<Mesh>(refine_uniform(*ladder.meshes[i - 1])));
    for (int i = 0; i <= k; ++i) {
        ladder.spaces.push_back(build_space(ladder.meshes[i]));
        check_dense_cap(ladder.spaces[i].dim(), cap);
        ladder.mass.push_back(assemble_mass(ladder.spaces[i]));
        ladder.mass_factor.push_back(
            std::make_unique<CholeskyFactor>(ladder.mass[i], "ladder mass"));
    }
    ladder.prolongations.emplace_back();  // none at level 0
    for (int i = 1; i <= k; ++i)
        ladder.prolongations.push_back(
            build_prolongation(ladder.spaces[i - 1], ladder.spaces[i]));

    ladder.lifts.assign(k + 1, SparseOperator{});
    for (int i = k - 1; i >= 0; --i)
        ladder.lifts[i] = i == k - 1
                              ? ladder.prolongations[k]
                              : multiply(ladder.lifts[i + 1], ladder.prolongations[i + 1]);

    // inclusion V_k -> Vbar_k: locally refined functions are piecewise linear
    // on the uniform refinement as well
    const FeSpace& local = *h.levels[k].space;
    const FeSpace& full = ladder.spaces[k];
    std::vector<Triplet> entries;
    for (int dof = 0; dof < full.dim(); ++dof) {
        const Vec2 x = full.mesh->vertices[full.free_dofs[dof]];
        for (const auto& [col, w] : value_row(local, x)) entries.emplace_back(dof, col, w);
    }
    ladder.inclusion = SparseOperator::from_triplets(full.dim(), local.dim(), entries);
    return ladder;
}

HierarchicalComponents hierarchical_components(const Vector& v, const Hierarchy& h, int k,
                                               const UniformLadder& ladder) {
    if (h.application != Application::local_nested)
        throw VerifyError("hierarchical_decomposition: needs a nested-local hierarchy");
    if (k < 0 || k > h.J()) throw VerifyError("hierarchical_decomposition: level out of range");
    if (v.size() != h.dim(k)) throw VerifyError("hierarchical_decomposition: size mismatch");

    HierarchicalComponents out;
    if (k == 0) {
        out.components.push_back(v);
        return out;
    }

    // L2 projections onto the uniform companion spaces
    const Vector vbar = ladder.inclusion.apply(v);
    const Vector weighted = ladder.mass[k].apply(vbar);
    std::vector<Vector> qbar(k);  // i = 0..k-1
    for (int i = 0; i < k; ++i)
        qbar[i] = ladder.mass_factor[i]->solve(ladder.lifts[i].apply_transpose(weighted));

    const Vector nodal_k = expand(*h.levels[k].space, v);
    const auto lookup_k = vertex_lookup(*h.levels[k].mesh);

    // Q^_i v on the local level-i space: the projection value at nodes
    // interior to region i+1, the function's own value elsewhere
    std::vector<Vector> qhat(k + 1);
    qhat[k] = v;
    for (int i = 0; i < k; ++i) {
        const FeSpace& space_i = *h.levels[i].space;
        const auto incidence = vertex_to_elements(*space_i.mesh);
        const auto lookup_bar = vertex_lookup(*ladder.meshes[i]);
        const std::vector<char>& refined = h.levels[i + 1].refined_parents;
        Vector q(space_i.dim());
        for (int dof = 0; dof < space_i.dim(); ++dof) {
            const int vert = space_i.free_dofs[dof];
            bool interior = true;
            for (int e : incidence[vert])
                if (!refined[e]) interior = false;
            if (interior) {
                const int bar_vert = lookup_bar.at(coord_key(space_i.mesh->vertices[vert]));
                const int bar_dof = ladder.spaces[i].vertex_to_dof[bar_vert];
                q[dof] = qbar[i][bar_dof];
            } else {
                q[dof] = nodal_k[lookup_k.at(coord_key(space_i.mesh->vertices[vert]))];
            }
        }
        qhat[i] = std::move(q);
    }

    out.components.push_back(qhat[0]);
    for (int i = 1; i <= k; ++i)
        out.components.push_back(qhat[i] - h.levels[i].prolongation->apply(qhat[i - 1]));

    // support check against the decomposition's subspaces
    const Decomposition& d = *h.levels[k].decomposition;
    for (int i = 1; i <= k; ++i) {
        std::vector<char> allowed(h.dim(i), 0);
        for (int j : d.subspaces[i].source_dofs) allowed[j] = 1;
        for (int j = 0; j < out.components[i].size(); ++j)
            if (!allowed[j])
                out.support_leak = std::max(out.support_leak, std::abs(out.components[i][j]));
    }

    // telescoping reconstruction back on level k
    Vector acc = out.components[0];
    for (int i = 1; i <= k; ++i)
        acc = h.levels[i].prolongation->apply(acc) + out.components[i];
    out.reconstruction_defect = (acc - v).cwiseAbs().maxCoeff();
    return out;
}

double greedy_k0(const Hierarchy& h, int k, int probes, std::uint64_t seed) {
    const Decomposition& d = *h.levels[k].decomposition;
    const SparseOperator& a = *h.levels[k].stiffness;
    const int dim = h.dim(k);

    // assign every DoF to the first subspace containing it
    std::vector<int> owner(dim, -1);
    std::vector<int> position(dim, -1);
    for (int i = 1; i <= d.p(); ++i) {
        const auto& dofs = d.subspaces[i].dofs;
        for (std::size_t pos = 0; pos < dofs.size(); ++pos) {
            if (owner[dofs[pos]] < 0) {
                owner[dofs[pos]] = i;
                position[dofs[pos]] = static_cast<int>(pos);
            }
        }
    }

    std::mt19937_64 rng(seed ^ 0x5eedULL);
    double k0 = 0.0;
    for (int probe = 0; probe < probes; ++probe) {
        Vector v = random_vector(dim, rng);
        const double energy = v.dot(a.apply(v));
        std::vector<Vector> local(d.p() + 1);
        for (int i = 1; i <= d.p(); ++i) local[i] = Vector::Zero(d.subspaces[i].dim());
        for (int j = 0; j < dim; ++j) local[owner[j]][position[j]] = v[j];
        double num = 0.0;
        for (int i = 1; i <= d.p(); ++i)
            num += local[i].dot(d.subspaces[i].local_matrix.apply(local[i]));
        k0 = std::max(k0, num / energy);
    }
    return k0;
}

double nested_k0(const Hierarchy& h, int k, int probes, std::uint64_t seed, int cap) {
    const Decomposition& d = *h.levels[k].decomposition;
    const SparseOperator& a = *h.levels[k].stiffness;
    const SparseOperator& a0 = *h.levels[0].stiffness;
    const UniformLadder ladder = build_uniform_ladder(h, k, cap);

    std::mt19937_64 rng(seed ^ 0x5eedULL);
    double k0 = 0.0;
    for (int probe = 0; probe < probes; ++probe) {
        Vector v = random_vector(h.dim(k), rng);
        v /= std::sqrt(v.dot(a.apply(v)));
        const auto split = hierarchical_components(v, h, k, ladder);
        if (split.reconstruction_defect > 1e-9 || split.support_leak > 1e-9)
            throw VerifyError("estimate_K0: hierarchical decomposition failed (reconstruction " +
                              std::to_string(split.reconstruction_defect) + ", leak " +
                              std::to_string(split.support_leak) + ")");
        double num = split.components[0].dot(a0.apply(split.components[0]));
        for (int i = 1; i <= k; ++i) {
            const Subspace& s = d.subspaces[i];
            double norm2 = 0.0;
            for (int j : s.source_dofs) norm2 += split.components[i][j] * split.components[i][j];
            num += s.lambda * k * norm2;  // (R^i)^{-1} = lambda^i k I
        }
        k0 = std::max(k0, num);
    }
    return k0;
}

}  // namespace

HierarchicalComponents hierarchical_decomposition(const Vector& v, const Hierarchy& h, int k,
                                                  int cap) {
    if (k == 0) {
        HierarchicalComponents out;
        out.components.push_back(v);
        return out;
    }
    const UniformLadder ladder = build_uniform_ladder(h, k, cap);
    return hierarchical_components(v, h, k, ladder);
}

double estimate_K0(const Hierarchy& h, int k, int probes, std::uint64_t seed, int cap) {
    if (k < 1 || k > h.J()) throw VerifyError("estimate_K0: level out of range");
    if (h.application == Application::local_nested) return nested_k0(h, k, probes, seed, cap);
    return greedy_k0(h, k, probes, seed);
}

double LemmaChainReport::max_violation() const {
    return std::max({monotonicity1, monotonicity2, smoothing, approximation});
}

LemmaChainReport check_lemma_chain(const DenseMatrix& s, const SparseOperator& a,
                                   const DenseMatrix& a_projection, double delta, int m,
                                   int probes, std::uint64_t seed) {
    const int n = static_cast<int>(s.rows());
    LemmaChainReport report;
    std::mt19937_64 rng(seed ^ 0x1e44aULL);
    for (int probe = 0; probe < probes; ++probe) {
        const Vector v = random_vector(n, rng);
        const Vector av = a.apply(v);
        // a_j = a(S^j v, v); both monotonicity lemmas and the smoothing
        // property are statements about this sequence
        std::vector<double> aj(2 * m + 2);
        Vector sj = v;
        aj[0] = av.dot(v);
        for (int j = 1; j <= 2 * m + 1; ++j) {
            sj = s * sj;
            aj[j] = av.dot(sj);
        }
        const double scale = std::max(std::abs(aj[0]), 1e-300);
        for (int j = 0; j + 1 <= 2 * m; ++j)
            report.monotonicity1 = std::max(report.monotonicity1, (aj[j + 1] - aj[j]) / scale);
        for (int j = 0; j + 1 <= 2 * m; ++j) {
            const double bj = aj[j] - aj[j + 1];
            const double bj1 = aj[j + 1] - aj[j + 2];
            report.monotonicity2 = std::max(report.monotonicity2, (bj1 - bj) / scale);
        }
        const double lhs = aj[2 * m] - aj[2 * m + 1];
        const double rhs = (aj[0] - aj[2 * m]) / (2.0 * m);
        report.smoothing = std::max(report.smoothing, (lhs - rhs) / scale);
        if (delta < 1.0) {
            const double apw = aj[0] - av.dot(a_projection * v);
            const double bound = (aj[0] - aj[1]) / (1.0 - delta);
            report.approximation = std::max(report.approximation, (apw - bound) / scale);
        }
    }
    report.monotonicity1 = std::max(report.monotonicity1, 0.0);
    report.monotonicity2 = std::max(report.monotonicity2, 0.0);
    report.smoothing = std::max(report.smoothing, 0.0);
    report.approximation = std::max(report.approximation, 0.0);
    return report;
}

PsiCheck check_psi(const std::vector<int>& m, const std::vector<double>& delta) {
    if (m.size() != delta.size()) throw VerifyError("check_psi: length mismatch");
    PsiCheck check;
    for (std::size_t i = 0; i < m.size(); ++i) check.psi.push_back(m[i] * (1.0 - delta[i]));
    for (std::size_t i = 1; i < check.psi.size(); ++i)
        if (check.psi[i] > check.psi[i - 1] + 1e-9) check.non_increasing = false;
    return check;
}

AssumptionReport run_verification(const Hierarchy& h, const VerifyOptions& options) {
    AssumptionReport report;
    const int J = h.J();
    std::vector<double> deltas;
    std::vector<int> ms;
    DenseMatrix previous_e;  // E_{k-1}, starts as the zero operator on V_0

    for (int k = 1; k <= J; ++k) {
        const Level& level = h.levels[k];
        const SparseOperator& a = *level.stiffness;
        LevelVerification row;
        row.k = k;
        row.dim = h.dim(k);
        row.m = level.m;

        const DenseMatrix s = smoother_error_matrix(h, k, options.dense_cap);
        const DeltaEstimate de = estimate_delta(s, a);
        row.sym_residual = de.sym_residual;
        row.delta = de.delta;
        row.min_eig = de.min_eig;
        if (!(row.sym_residual <= 1e-8) || !(row.min_eig >= -1e-9)) report.assumption1 = false;
        if (!(row.delta < 1.0)) report.assumption2 = false;

        row.w1 = estimate_w1(*level.decomposition).w1;
        if (row.w1 >= 2.0 - 1e-5) report.w1_ok = false;

        row.psi = row.m * (1.0 - row.delta);
        row.gamma = 1.0 / (1.0 + 2.0 * row.m * (1.0 - row.delta));

        const DenseMatrix e = mg_error_matrix(h, k, options.dense_cap);
        if (k == 1) previous_e = DenseMatrix::Zero(h.dim(0), h.dim(0));
        {
            const DenseMatrix pd = level.prolongation->dense();
            const DenseMatrix ad = a.dense();
            const DenseMatrix gram = pd.transpose() * ad * pd;
            const DenseMatrix coarse_solve = gram.llt().solve(pd.transpose() * ad);
            DenseMatrix sm = DenseMatrix::Identity(row.dim, row.dim);
            for (int i = 0; i < row.m; ++i) sm = sm * s;
            const DenseMatrix expected =
                sm *
                (DenseMatrix::Identity(row.dim, row.dim) -
                 pd * ((DenseMatrix::Identity(h.dim(k - 1), h.dim(k - 1)) - previous_e) *
                       coarse_solve)) *
                sm;
            row.recursion_defect = (e - expected).cwiseAbs().maxCoeff();
        }
        row.rho_e = energy_spectral_bound(e, a);
        if (row.rho_e > row.gamma + 1e-6) report.gamma_bound = false;

        const DenseMatrix proj = dense_a_projection(*level.prolongation, a);
        row.lemma_violation =
            check_lemma_chain(s, a, proj, row.delta, row.m, options.probes, options.seed)
                .max_violation();

        row.k0 = estimate_K0(h, k, options.k0_probes, options.seed, options.dense_cap);
        if (level.has_cover) {
            row.g0 = adjacency_g0(level.cover);
            row.k1 = 2.0 * (1.0 + row.g0);
        } else {
            row.k1 = 2.0;
        }
        row.delta_theory = theoretical_delta(std::min(row.w1, 1.0), row.k0, row.k1);

        deltas.push_back(row.delta);
        ms.push_back(row.m);
        previous_e = e;
        report.levels.push_back(row);
    }

    report.assumption3 = check_psi(ms, deltas).non_increasing;
    return report;
}

}  // namespace sscmg
