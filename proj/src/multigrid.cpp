#include "sscmg/multigrid.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sscmg {

std::vector<int> make_schedule(const ScheduleSpec& spec, int levels) {
    if (levels < 1) throw MultigridError("make_schedule: need at least one level");
    if (spec.kind == ScheduleKind::constant && spec.m < 1)
        throw MultigridError("make_schedule: constant schedule needs m >= 1");
    if (spec.kind == ScheduleKind::optimal_quadratic && spec.q < 1)
        throw MultigridError("make_schedule: quadratic schedule needs q >= 1");
    std::vector<int> m(levels);
    for (int k = 1; k <= levels; ++k) {
        switch (spec.kind) {
            case ScheduleKind::constant: m[k - 1] = spec.m; break;
            case ScheduleKind::decreasing: m[k - 1] = levels + 1 - k; break;
            case ScheduleKind::increasing: m[k - 1] = 1 + k; break;
            case ScheduleKind::optimal_quadratic: m[k - 1] = spec.q * (1 + k * k); break;
        }
    }
    return m;
}

namespace {

constexpr double kBuildTol = 1e-12;

// Elements of the given mesh whose closure fits in [0,s]^2.
std::vector<int> corner_region(const Mesh& mesh, double s) {
    std::vector<int> region;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto c = mesh.corners(t);
        bool inside = true;
        for (const Vec2& p : c)
            if (p.x > s + 1e-12 || p.y > s + 1e-12) inside = false;
        if (inside) region.push_back(t);
    }
    return region;
}

std::vector<int> region_for_level(const HierarchyConfig& config, const Mesh& previous, int k) {
    if (!config.region.explicit_sets.empty()) {
        const auto& sets = config.region.explicit_sets;
        if (static_cast<int>(sets.size()) < k)
            throw MultigridError("level " + std::to_string(k) +
                                 ": no explicit refinement region given");
        return sets[k - 1];
    }
    double s = config.region.corner_size;
    if (config.region.shrink) s *= std::pow(0.5, k - 1);
    auto region = corner_region(previous, s);
    if (region.empty())
        throw MultigridError("level " + std::to_string(k) + ": corner region of size " +
                             std::to_string(s) + " contains no element");
    return region;
}

}  // namespace

std::vector<LevelView> Hierarchy::views() const {
    std::vector<LevelView> v(levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        v[k].space = levels[k].space.get();
        v[k].stiffness = levels[k].stiffness;
        v[k].prolongation = levels[k].prolongation.get();
        v[k].region_elements = &levels[k].region_elements;
    }
    return v;
}

Hierarchy build_hierarchy(const HierarchyConfig& config) {
    if (config.coarse_n < 1) throw MultigridError("build_hierarchy: coarse_n must be >= 1");
    if (config.levels < 0) throw MultigridError("build_hierarchy: negative level count");

    Hierarchy h;
    h.application = config.application;
    h.config = config;
    const CoefficientField theta(config.theta);
    const std::vector<int> schedule =
        config.levels >= 1 ? make_schedule(config.schedule, config.levels) : std::vector<int>{};

    for (int k = 0; k <= config.levels; ++k) {
        Level level;
        try {
            if (k == 0) {
                level.mesh = std::make_shared<Mesh>(unit_square_coarse(config.coarse_n));
                level.region_elements.assign(level.mesh->num_triangles(), 1);
            } else {
                const Level& prev = h.levels[k - 1];
                std::vector<int> region;
                if (config.application == Application::uniform) {
                    region.resize(prev.mesh->num_triangles());
                    for (int t = 0; t < prev.mesh->num_triangles(); ++t) region[t] = t;
                } else {
                    region = region_for_level(config, *prev.mesh, k);
                    for (int t : region)
                        if (t < 0 || t >= prev.mesh->num_triangles() || !prev.region_elements[t])
                            throw MultigridError(
                                "refinement regions are not nested (element " +
                                std::to_string(t) + " lies outside the previous region)");
                }
                level.mesh = std::make_shared<Mesh>(refine_local(*prev.mesh, region));
                level.refined_parents.assign(prev.mesh->num_triangles(), 0);
                for (int t : region) level.refined_parents[t] = 1;
                level.region_elements.assign(level.mesh->num_triangles(), 0);
                for (int t = 0; t < level.mesh->num_triangles(); ++t)
                    level.region_elements[t] =
                        level.refined_parents[level.mesh->triangles[t].parent];
            }

            if (std::abs(total_area(*level.mesh) - 1.0) > kBuildTol)
                throw MultigridError("mesh does not tile the unit square");

            level.space = std::make_shared<FeSpace>(build_space(level.mesh));
            level.stiffness =
                std::make_shared<SparseOperator>(assemble_stiffness(*level.space, theta));
            level.mass = std::make_shared<SparseOperator>(assemble_mass(*level.space));
            level.m = k >= 1 ? schedule[k - 1] : 0;

            if (k >= 1) {
                const Level& prev = h.levels[k - 1];
                auto p = std::make_shared<Prolongation>(
                    build_prolongation(*prev.space, *level.space));
                const double exact = prolongation_exactness_defect(*prev.space, *level.space, *p);
                if (exact > kBuildTol)
                    throw MultigridError("prolongation is not exact on coarse functions (defect " +
                                         std::to_string(exact) + ")");
                const double ga = galerkin_defect(*prev.stiffness, *p, *level.stiffness);
                const double gm = galerkin_defect(*prev.mass, *p, *level.mass);
                if (ga > kBuildTol || gm > kBuildTol)
                    throw MultigridError("Galerkin identity violated (stiffness defect " +
                                         std::to_string(ga) + ", mass defect " +
                                         std::to_string(gm) + ")");
                level.prolongation = std::move(p);
            }
        } catch (const std::exception& err) {
            throw MultigridError("level " + std::to_string(k) + ": " + err.what());
        }
        h.levels.push_back(std::move(level));
    }

    h.coarse_factor =
        std::make_shared<CholeskyFactor>(*h.levels[0].stiffness, "coarse stiffness");

    const auto views = h.views();
    for (int k = 1; k <= config.levels; ++k) {
        Level& level = h.levels[k];
        try {
            switch (config.application) {
                case Application::uniform:
                case Application::local_nonnested: {
                    auto cover = partition_nonoverlapping(*level.mesh, config.grid_rows,
                                                          config.grid_cols);
                    level.cover = grow_overlap(*level.mesh, std::move(cover));
                    level.has_cover = true;
                    level.decomposition = std::make_shared<Decomposition>(
                        config.application == Application::uniform
                            ? decomposition_uniform(views, k, level.cover)
                            : decomposition_nonnested_local(views, k, level.cover));
                    break;
                }
                case Application::local_nested:
                    level.decomposition =
                        std::make_shared<Decomposition>(decomposition_nested_local(views, k));
                    break;
            }
        } catch (const std::exception& err) {
            throw MultigridError("level " + std::to_string(k) + ": " + err.what());
        }
    }
    return h;
}

Vector vcycle(const Hierarchy& h, int k, Vector z, const Vector& f) {
    if (k < 0 || k > h.J()) throw MultigridError("vcycle: level out of range");
    if (z.size() != h.dim(k) || f.size() != h.dim(k))
        throw MultigridError("vcycle: vector size mismatch at level " + std::to_string(k));
    if (k == 0) return h.coarse_factor->solve(f);

    const Level& level = h.levels[k];
    for (int i = 0; i < level.m; ++i)
        z = ssc_sweep_symmetric(std::move(z), f, *level.decomposition);

    const Vector fbar = level.prolongation->apply_transpose(f - level.stiffness->apply(z));
    const Vector q = vcycle(h, k - 1, Vector::Zero(h.dim(k - 1)), fbar);
    z += level.prolongation->apply(q);

    for (int i = 0; i < level.m; ++i)
        z = ssc_sweep_symmetric(std::move(z), f, *level.decomposition);
    return z;
}

std::pair<Vector, CycleReport> solve(const Hierarchy& h, const Vector& f, double rel_tol,
                                     int max_cycles, const Vector* reference) {
    if (!(rel_tol > 0.0 && rel_tol <= 1.0))
        throw MultigridError("solve: rel_tol must lie in (0, 1]");
    if (max_cycles < 1) throw MultigridError("solve: max_cycles must be >= 1");
    const int J = h.J();
    const SparseOperator& a = *h.levels[J].stiffness;
    if (f.size() != h.dim(J)) throw MultigridError("solve: right-hand side size mismatch");

    CycleReport report;
    Vector z = Vector::Zero(h.dim(J));
    const double fnorm = f.norm();
    if (fnorm == 0.0) {
        report.converged = true;
        return {z, report};
    }

    auto energy_error = [&](const Vector& current) -> double {
        if (!reference) return -1.0;
        const Vector e = current - *reference;
        return std::sqrt(std::max(0.0, e.dot(a.apply(e))));
    };

    double previous = fnorm;
    for (int cycle = 1; cycle <= max_cycles; ++cycle) {
        const auto start = std::chrono::steady_clock::now();
        z = vcycle(h, J, std::move(z), f);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

        const double residual = (f - a.apply(z)).norm();
        CycleRecord rec;
        rec.cycle = cycle;
        rec.residual = residual;
        rec.ratio = previous > 0.0 ? residual / previous : 0.0;
        rec.energy_error = energy_error(z);
        rec.seconds = elapsed.count();
        report.cycles.push_back(rec);
        report.final_residual = residual;
        previous = residual;

        if (residual / fnorm < rel_tol) {
            report.converged = true;
            return {z, report};
        }
    }
    throw NonConvergence("solve: no convergence after " + std::to_string(max_cycles) +
                             " cycles (relative residual " +
                             std::to_string(report.final_residual / fnorm) + ")",
                         std::move(report));
}

}  // namespace sscmg
