#pragma once

#include "sscmg/multigrid.hpp"
#include "sscmg/verify.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sscmg {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RhsKind { manufactured, constant, file };

/// One experiment: flat key-value text with [section] headers. Unknown keys
/// are rejected. See the README for the full key reference.
struct ExperimentConfig {
    Application application = Application::uniform;
    int coarse_n = 2;
    int levels = 3;
    int grid_rows = 2;
    int grid_cols = 2;
    RegionSpec region;
    ScheduleSpec schedule;
    Eigen::Matrix2d theta = Eigen::Matrix2d::Identity();

    RhsKind rhs = RhsKind::manufactured;
    std::string rhs_file;

    double rel_tol = 1e-10;
    int max_cycles = 100;

    // sweep command
    std::vector<ScheduleSpec> sweep_schedules;
    int sweep_j_min = 1;
    int sweep_j_max = 3;

    std::uint64_t seed = 0;
    int dense_cap = kDefaultDenseCap;

    HierarchyConfig hierarchy_config() const;
    HierarchyConfig hierarchy_config(int levels_override, const ScheduleSpec& schedule_override)
        const;
    void validate() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

ScheduleSpec parse_schedule_token(const std::string& token);
std::string schedule_name(const ScheduleSpec& spec);
std::string application_name(Application app);

}  // namespace sscmg
