// Acceptance suite: runs every agreed criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code 0 only when all pass.

#include "sscmg/cli.hpp"
#include "sscmg/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <vector>

using namespace sscmg;

namespace {

int failures = 0;

void report(int id, const char* what, bool pass, double seconds) {
    std::printf("[%s] criterion %2d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, what, seconds);
    if (!pass) ++failures;
}

void run(int id, const char* what, const std::function<bool()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    try {
        pass = fn();
    } catch (const std::exception& err) {
        std::printf("       criterion %d threw: %s\n", id, err.what());
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    report(id, what, pass, dt.count());
}

HierarchyConfig make_config(Application app, int n, int levels, int grid, ScheduleSpec schedule) {
    HierarchyConfig config;
    config.application = app;
    config.coarse_n = n;
    config.levels = levels;
    config.grid_rows = grid;
    config.grid_cols = grid;
    config.schedule = schedule;
    return config;
}

const ScheduleSpec kConstant1{ScheduleKind::constant, 1, 1};

// the three n=2 applications at J=3 used by criteria 1, 2, and 4
std::vector<Hierarchy> desk_hierarchies() {
    std::vector<Hierarchy> hs;
    hs.push_back(build_hierarchy(make_config(Application::uniform, 2, 3, 2, kConstant1)));
    hs.push_back(build_hierarchy(make_config(Application::local_nested, 2, 3, 1, kConstant1)));
    hs.push_back(build_hierarchy(make_config(Application::local_nonnested, 2, 3, 2, kConstant1)));
    return hs;
}

double measured_gamma(const Hierarchy& h, int k) {
    const auto de = estimate_delta(smoother_error_matrix(h, k), *h.levels[k].stiffness);
    return 1.0 / (1.0 + 2.0 * h.levels[k].m * (1.0 - de.delta));
}

bool criterion_smoother_legality() {
    bool pass = true;
    for (const Hierarchy& h : desk_hierarchies()) {
        for (int k = 1; k <= h.J(); ++k) {
            const DenseMatrix s = smoother_error_matrix(h, k);
            const DeltaEstimate de = estimate_delta(s, *h.levels[k].stiffness);
            pass = pass && de.sym_residual <= 1e-8 && de.min_eig >= -1e-9 && de.delta < 1.0;
        }
    }
    return pass;
}

bool criterion_error_recursion() {
    bool pass = true;
    for (const Hierarchy& h : desk_hierarchies()) {
        DenseMatrix previous = DenseMatrix::Zero(h.dim(0), h.dim(0));
        for (int k = 1; k <= h.J(); ++k) {
            const SparseOperator& a = *h.levels[k].stiffness;
            const DenseMatrix e = mg_error_matrix(h, k);
            const DenseMatrix s = smoother_error_matrix(h, k);

            const DenseMatrix pd = h.levels[k].prolongation->dense();
            const DenseMatrix ad = a.dense();
            const DenseMatrix gram = pd.transpose() * ad * pd;
            const DenseMatrix coarse_solve = gram.llt().solve(pd.transpose() * ad);
            DenseMatrix sm = DenseMatrix::Identity(h.dim(k), h.dim(k));
            for (int i = 0; i < h.levels[k].m; ++i) sm = sm * s;
            const DenseMatrix expected =
                sm *
                (DenseMatrix::Identity(h.dim(k), h.dim(k)) -
                 pd * ((DenseMatrix::Identity(h.dim(k - 1), h.dim(k - 1)) - previous) *
                       coarse_solve)) *
                sm;
            pass = pass && (e - expected).cwiseAbs().maxCoeff() <= 1e-9;

            // a-SPSD: symmetric in the energy product with min eigenvalue >= -1e-9
            const DenseMatrix ae = ad * e;
            Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> eig(
                0.5 * (ae + ae.transpose()), ad);
            pass = pass && eig.info() == Eigen::Success &&
                   eig.eigenvalues().minCoeff() >= -1e-9;
            pass = pass && (ae - ae.transpose()).cwiseAbs().maxCoeff() <=
                               1e-8 * ad.cwiseAbs().maxCoeff();
            previous = e;
        }
    }
    return pass;
}

bool criterion_main_bound() {
    struct Config {
        Application app;
        int n, levels, grid;
        ScheduleSpec schedule;
    };
    const std::vector<Config> configs = {
        {Application::uniform, 4, 3, 2, kConstant1},
        {Application::uniform, 3, 3, 3, {ScheduleKind::decreasing, 1, 1}},
        {Application::local_nested, 2, 3, 1, kConstant1},
        {Application::local_nested, 2, 3, 1, {ScheduleKind::optimal_quadratic, 1, 1}},
        {Application::local_nested, 2, 3, 1, {ScheduleKind::increasing, 1, 1}},
        {Application::local_nonnested, 4, 3, 2, kConstant1},
        {Application::local_nonnested, 2, 3, 2, {ScheduleKind::increasing, 1, 1}},
    };
    bool pass = true;
    for (const auto& c : configs) {
        const Hierarchy h = build_hierarchy(make_config(c.app, c.n, c.levels, c.grid, c.schedule));
        const int J = h.J();
        const DenseMatrix e = mg_error_matrix(h, J);
        const double rho = energy_spectral_bound(e, *h.levels[J].stiffness);
        pass = pass && rho <= measured_gamma(h, J) + 1e-6;
    }
    return pass;
}

bool criterion_lemma_chain() {
    bool pass = true;
    for (const Hierarchy& h : desk_hierarchies()) {
        for (int k = 1; k <= h.J(); ++k) {
            const SparseOperator& a = *h.levels[k].stiffness;
            const DenseMatrix s = smoother_error_matrix(h, k);
            const double delta = estimate_delta(s, a).delta;
            const DenseMatrix proj = dense_a_projection(*h.levels[k].prolongation, a);
            const auto lemmas = check_lemma_chain(s, a, proj, delta, h.levels[k].m, 100, 0);
            pass = pass && lemmas.max_violation() <= 1e-9;
        }
    }
    return pass;
}

bool criterion_ssc_identities() {
    bool pass = true;
    std::mt19937_64 rng(17);
    const std::vector<std::pair<Hierarchy, int>> cases = [] {
        std::vector<std::pair<Hierarchy, int>> cs;
        cs.emplace_back(build_hierarchy(make_config(Application::uniform, 4, 1, 2, kConstant1)),
                        1);
        cs.emplace_back(
            build_hierarchy(make_config(Application::local_nested, 2, 2, 1, kConstant1)), 2);
        cs.emplace_back(
            build_hierarchy(make_config(Application::local_nonnested, 4, 2, 2, kConstant1)), 2);
        return cs;
    }();
    for (const auto& [h, k] : cases) {
        const Decomposition& d = *h.levels[k].decomposition;
        const int n = d.dim();
        const Vector zero = Vector::Zero(n);

        DenseMatrix forward(n, n), symmetric(n, n);
        for (int j = 0; j < n; ++j) {
            Vector unit = Vector::Zero(n);
            unit[j] = 1.0;
            forward.col(j) = ssc_sweep(unit, zero, d, SweepOrder::forward);
            unit = Vector::Zero(n);
            unit[j] = 1.0;
            symmetric.col(j) = ssc_sweep_symmetric(unit, zero, d);
        }

        // (I - T^0)(I - T^1) ... (I - T^p) assembled from independent factors
        DenseMatrix product = DenseMatrix::Identity(n, n);
        DenseMatrix adjoint = DenseMatrix::Identity(n, n);
        for (int i = 0; i <= d.p(); ++i) {
            const DenseMatrix factor =
                DenseMatrix::Identity(n, n) - dense_subspace_projector(d, i);
            product = product * factor;
            adjoint = factor * adjoint;
        }
        pass = pass && (forward - product).cwiseAbs().maxCoeff() <= 1e-10;
        pass = pass && (symmetric - adjoint * product).cwiseAbs().maxCoeff() <= 1e-10;

        // a(E^s v, v) = ||E v||_E^2
        const DenseMatrix ad = d.stiffness->dense();
        for (int probe = 0; probe < 10; ++probe) {
            const Vector v = random_vector(n, rng);
            const double lhs = v.dot(ad * (symmetric * v));
            const Vector ev = forward * v;
            const double rhs = ev.dot(ad * ev);
            pass = pass && std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs));
        }
    }
    return pass;
}

bool criterion_w1_values() {
    bool pass = true;
    for (Application app : {Application::uniform, Application::local_nonnested}) {
        const Hierarchy h = build_hierarchy(make_config(app, 4, 2, 2, kConstant1));
        for (int k = 1; k <= h.J(); ++k) {
            const auto spec = estimate_w1(*h.levels[k].decomposition);
            pass = pass && spec.w1 == 1.0;
            for (double rho : spec.rho) pass = pass && rho == 1.0;
        }
    }
    const Hierarchy nested =
        build_hierarchy(make_config(Application::local_nested, 2, 3, 1, kConstant1));
    for (int k = 1; k <= nested.J(); ++k) {
        const auto spec = estimate_w1(*nested.levels[k].decomposition);
        pass = pass && spec.rho[0] == 1.0;  // exact coarse solve
        for (std::size_t i = 1; i < spec.rho.size(); ++i)
            pass = pass && std::abs(spec.rho[i] - 1.0 / k) <= 1e-5;
    }
    return pass;
}

bool criterion_level_trends() {
    auto rho_at = [](Application app, int n, int grid, ScheduleSpec schedule, int levels) {
        const Hierarchy h = build_hierarchy(make_config(app, n, levels, grid, schedule));
        return energy_spectral_bound(mg_error_matrix(h, levels), *h.levels[levels].stiffness);
    };

    bool pass = true;
    // uniform with constant m: flat within 0.05 over J = 1..4
    {
        double lo = 1e30, hi = -1e30;
        for (int J = 1; J <= 4; ++J) {
            const double rho = rho_at(Application::uniform, 3, 3, kConstant1, J);
            lo = std::min(lo, rho);
            hi = std::max(hi, rho);
        }
        pass = pass && (hi - lo) <= 0.05;
    }
    // nested-local with m = 1: non-decreasing in J
    {
        double previous = -1.0;
        for (int J = 1; J <= 4; ++J) {
            const double rho = rho_at(Application::local_nested, 2, 1, kConstant1, J);
            pass = pass && rho >= previous - 1e-9;
            previous = rho;
        }
    }
    // nested-local with m_k = 1 + k^2: flat within 0.1 over J = 1..4
    {
        double lo = 1e30, hi = -1e30;
        for (int J = 1; J <= 4; ++J) {
            const double rho = rho_at(Application::local_nested, 2, 1,
                                      {ScheduleKind::optimal_quadratic, 1, 1}, J);
            lo = std::min(lo, rho);
            hi = std::max(hi, rho);
        }
        pass = pass && (hi - lo) <= 0.1;
    }
    return pass;
}

bool criterion_k0_growth() {
    bool pass = true;
    // nested-local: log-log fit of K0 over k = 1..4 with exponent <= 2.3
    {
        const Hierarchy h =
            build_hierarchy(make_config(Application::local_nested, 2, 4, 1, kConstant1));
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int k = 1; k <= 4; ++k) {
            const double k0 = estimate_K0(h, k, 200, 0);
            pass = pass && k0 > 0.0;
            const double x = std::log(static_cast<double>(k));
            const double y = std::log(k0);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double alpha = (4.0 * sxy - sx * sy) / (4.0 * sxx - sx * sx);
        pass = pass && alpha <= 2.3;
    }
    // uniform: level-independent within 25%
    {
        const Hierarchy h = build_hierarchy(make_config(Application::uniform, 4, 3, 2, kConstant1));
        double lo = 1e30, hi = -1e30;
        for (int k = 1; k <= 3; ++k) {
            const double k0 = estimate_K0(h, k, 200, 0);
            lo = std::min(lo, k0);
            hi = std::max(hi, k0);
        }
        pass = pass && (hi - lo) / lo <= 0.25;
    }
    return pass;
}

bool criterion_solver_end_to_end() {
    bool pass = true;
    const double pi = std::numbers::pi;
    const auto load = [pi](const FeSpace& space) {
        return assemble_load(space, [pi](double x, double y) {
            return 2.0 * pi * pi * std::sin(pi * x) * std::sin(pi * y);
        });
    };
    struct Config {
        Application app;
        int n, grid;
    };
    for (const Config& c : {Config{Application::uniform, 4, 2},
                            Config{Application::local_nested, 2, 1},
                            Config{Application::local_nonnested, 4, 2}}) {
        const Hierarchy h = build_hierarchy(make_config(c.app, c.n, 3, c.grid, kConstant1));
        const int J = h.J();
        const SparseOperator& a = *h.levels[J].stiffness;
        const Vector f = load(*h.levels[J].space);
        const CholeskyFactor direct(a, "system");
        const Vector reference = direct.solve(f);
        const double scale = std::sqrt(reference.dot(a.apply(reference)));

        auto [z, cycle_report] = solve(h, f, 1e-12, 300, &reference);
        const Vector err = z - reference;
        pass = pass && std::sqrt(err.dot(a.apply(err))) <= 1e-8 * scale;

        // per-cycle energy contraction stays below gamma_J + 0.05
        const double gamma = measured_gamma(h, J) + 0.05;
        double previous = scale;  // error of the zero initial guess
        for (const auto& rec : cycle_report.cycles) {
            if (previous > 1e-10 * scale) pass = pass && rec.energy_error <= gamma * previous;
            previous = rec.energy_error;
        }
    }
    return pass;
}

bool criterion_hanging_continuity() {
    bool pass = true;
    std::mt19937_64 rng(23);

    // nested corner refinement at J = 3 stacks several hanging nodes on the
    // coarse edges bordering the refined quadrant
    const Hierarchy h =
        build_hierarchy(make_config(Application::local_nested, 2, 3, 1, kConstant1));
    const FeSpace& space = *h.levels[3].space;

    // some element edge must carry two or more hanging nodes: count vertices
    // strictly inside each living edge geometrically
    const Mesh& mesh = *space.mesh;
    int max_per_edge = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        for (int e = 0; e < 3; ++e) {
            const Vec2 a = mesh.vertices[mesh.triangles[t].v[e]];
            const Vec2 b = mesh.vertices[mesh.triangles[t].v[(e + 1) % 3]];
            int inside = 0;
            for (int v = 0; v < mesh.num_vertices(); ++v) {
                const Vec2 p = mesh.vertices[v];
                if (point_segment_distance(p, a, b) > 1e-12) continue;
                const double len = norm(b - a);
                const double s = dot(p - a, b - a) / (len * len);
                if (s > 1e-9 && s < 1.0 - 1e-9) ++inside;
            }
            max_per_edge = std::max(max_per_edge, inside);
        }
    }
    pass = pass && max_per_edge >= 2;

    for (int probe = 0; probe < 5; ++probe) {
        const Vector coeffs = random_vector(space.dim(), rng);
        pass = pass && constrained_edge_mismatch(space, coeffs, 5) <= 1e-10;
    }
    return pass;
}

}  // namespace

int main() {
    run(1, "smoother legality: S_k a-symmetric, positive semidefinite, delta_k < 1",
        criterion_smoother_legality);
    run(2, "error-operator recursion and a-SPSD of E_k", criterion_error_recursion);
    run(3, "main bound rho_E(E_J) <= gamma_J on 7 configurations", criterion_main_bound);
    run(4, "monotonicity, smoothing, and approximation lemmas on 100 probes",
        criterion_lemma_chain);
    run(5, "SSC error-operator identities and the energy-norm identity",
        criterion_ssc_identities);
    run(6, "w1 = 1 exactly for exact subsolvers; rho(R^i A^i) = 1/k for Richardson",
        criterion_w1_values);
    run(7, "level-dependence trends across J = 1..4", criterion_level_trends);
    run(8, "K0 growth: quadratic fit for nested-local, flat for uniform",
        criterion_k0_growth);
    run(9, "manufactured solution matches the direct solve; contraction below gamma_J",
        criterion_solver_end_to_end);
    run(10, "two-sided continuity across stacked hanging nodes", criterion_hanging_continuity);

    if (failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", failures);
    return 1;
}
