#pragma once

#include "sscmg/config.hpp"
#include "sscmg/verify.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sscmg {

/// CSV cycle log: cycle,residual,ratio[,energy_error].
void write_cycles_csv(std::ostream& os, const CycleReport& report, bool with_energy);
void write_cycles_csv_file(const std::string& path, const CycleReport& report, bool with_energy);

/// Per-level verification table (gnuplot-ready columns).
void write_levels_csv(std::ostream& os, const AssumptionReport& report);
void write_levels_csv_file(const std::string& path, const AssumptionReport& report);

/// Versioned JSON verification report ("schema": 1).
std::string verify_report_json(const ExperimentConfig& config, const AssumptionReport& report);
void write_verify_json_file(const std::string& path, const ExperimentConfig& config,
                            const AssumptionReport& report);

struct SweepRow {
    std::string application;
    std::string schedule;
    int levels = 0;
    double rho_e = -1.0;  // -1 when the dense cap skipped it
    double contraction = 0.0;
    int cycles = 0;
};

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_sweep_csv_file(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace sscmg
