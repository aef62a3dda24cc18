#pragma once

#include "sscmg/smoother.hpp"

#include <memory>
#include <string>
#include <vector>

namespace sscmg {

struct MultigridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Application { uniform, local_nested, local_nonnested };

enum class ScheduleKind { constant, decreasing, increasing, optimal_quadratic };

struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::constant;
    int m = 1;  // constant
    int q = 1;  // optimal_quadratic
};

/// Per-level smoothing counts m_1..m_J: constant m, decreasing J+1-k,
/// increasing 1+k, or q(1+k^2).
std::vector<int> make_schedule(const ScheduleSpec& spec, int levels);

/// Refinement regions for the local applications. By default each level
/// refines every element inside the corner box [0,s]^2; shrink halves s per
/// level. Explicit per-level element sets (indices into the previous level)
/// take precedence.
struct RegionSpec {
    double corner_size = 0.5;
    bool shrink = false;
    std::vector<std::vector<int>> explicit_sets;
};

struct HierarchyConfig {
    Application application = Application::uniform;
    int coarse_n = 2;
    int levels = 3;  // J
    int grid_rows = 2;
    int grid_cols = 2;
    ScheduleSpec schedule;
    Eigen::Matrix2d theta = Eigen::Matrix2d::Identity();
    RegionSpec region;
};

struct Level {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const FeSpace> space;
    std::shared_ptr<const SparseOperator> stiffness;
    std::shared_ptr<const SparseOperator> mass;
    std::shared_ptr<const Prolongation> prolongation;    // from level k-1, null at 0
    std::shared_ptr<const Decomposition> decomposition;  // null at 0
    std::vector<char> region_elements;  // 1 for elements inside the refined region
    std::vector<char> refined_parents;  // over the previous mesh: 1 for elements split here
    SubdomainCover cover;               // uniform / non-nested levels
    bool has_cover = false;
    int m = 1;
};

/// Immutable per-level bundle driving the V-cycle and the verifier. Builds
/// eagerly and validates nestedness, Galerkin consistency, and subspace
/// coverage; any failure is reported with its level.
struct Hierarchy {
    Application application = Application::uniform;
    HierarchyConfig config;
    std::vector<Level> levels;
    std::shared_ptr<const CholeskyFactor> coarse_factor;

    int J() const { return static_cast<int>(levels.size()) - 1; }
    int dim(int k) const { return levels[k].space->dim(); }
    std::vector<LevelView> views() const;
};

Hierarchy build_hierarchy(const HierarchyConfig& config);

/// One V-cycle at level k: m_k symmetric sweeps, restricted-residual coarse
/// correction from a zero initial guess, m_k more sweeps. Level 0 is solved
/// exactly.
Vector vcycle(const Hierarchy& h, int k, Vector z0, const Vector& f);

struct CycleRecord {
    int cycle = 0;
    double residual = 0.0;
    double ratio = 0.0;
    double energy_error = -1.0;  // -1 when no reference solution is known
    double seconds = 0.0;
};

struct CycleReport {
    std::vector<CycleRecord> cycles;
    bool converged = false;
    double final_residual = 0.0;
};

struct NonConvergence : std::runtime_error {
    CycleReport report;
    NonConvergence(std::string what, CycleReport r)
        : std::runtime_error(std::move(what)), report(std::move(r)) {}
};

/// Repeated V-cycles from zero until ||f - A z||_2 / ||f||_2 < rel_tol.
/// Throws NonConvergence (report attached) after max_cycles. When a reference
/// solution is supplied the report carries per-cycle energy errors.
std::pair<Vector, CycleReport> solve(const Hierarchy& h, const Vector& f, double rel_tol,
                                     int max_cycles, const Vector* reference = nullptr);

}  // namespace sscmg
