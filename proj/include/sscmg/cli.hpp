#pragma once

#include "sscmg/config.hpp"
#include "sscmg/report.hpp"

#include <iosfwd>
#include <string>

namespace sscmg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitAssumption = 4;

/// Writes per-level mesh files (level_<k>.mesh) and prints a counts table.
int run_mesh(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log);

/// Runs the outer V-cycle iteration; writes cycles.csv and solution.txt.
int run_solve(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log);

/// Runs the assumption/bound checks; writes verify.json and levels.csv.
int run_verify(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log);

/// Schedule x level-count comparison; writes sweep.csv.
int run_sweep(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log);

/// Right-hand side vector for the configured rhs selector.
Vector build_rhs(const ExperimentConfig& config, const Hierarchy& h);

}  // namespace sscmg::cli
