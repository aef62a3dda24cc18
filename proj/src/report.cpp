#include "sscmg/report.hpp"

#include "sscmg/mesh_io.hpp"

#include <json.hpp>

#include <fstream>

namespace sscmg {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file: " + path);
    return os;
}

}  // namespace

void write_cycles_csv(std::ostream& os, const CycleReport& report, bool with_energy) {
    os << "cycle,residual";
    if (with_energy) os << ",energy_error";
    os << ",ratio\n";
    for (const auto& rec : report.cycles) {
        os << rec.cycle << ',' << format_g17(rec.residual);
        if (with_energy) os << ',' << format_g17(rec.energy_error);
        os << ',' << format_g17(rec.ratio) << '\n';
    }
}

void write_cycles_csv_file(const std::string& path, const CycleReport& report, bool with_energy) {
    auto os = open_out(path);
    write_cycles_csv(os, report, with_energy);
}

void write_levels_csv(std::ostream& os, const AssumptionReport& report) {
    os << "k,dim,m,delta,min_eig_S,sym_residual,w1,psi,gamma,rho_E,recursion_defect,"
          "lemma_violation,K0,g0,K1,delta_theory\n";
    for (const auto& row : report.levels) {
        os << row.k << ',' << row.dim << ',' << row.m << ',' << format_g17(row.delta) << ','
           << format_g17(row.min_eig) << ',' << format_g17(row.sym_residual) << ','
           << format_g17(row.w1) << ',' << format_g17(row.psi) << ',' << format_g17(row.gamma)
           << ',' << format_g17(row.rho_e) << ',' << format_g17(row.recursion_defect) << ','
           << format_g17(row.lemma_violation) << ',' << format_g17(row.k0) << ',' << row.g0 << ','
           << format_g17(row.k1) << ',' << format_g17(row.delta_theory) << '\n';
    }
}

void write_levels_csv_file(const std::string& path, const AssumptionReport& report) {
    auto os = open_out(path);
    write_levels_csv(os, report);
}

std::string verify_report_json(const ExperimentConfig& config, const AssumptionReport& report) {
    nlohmann::ordered_json doc;
    doc["schema"] = 1;
    doc["application"] = application_name(config.application);
    doc["coarse_n"] = config.coarse_n;
    doc["levels"] = config.levels;
    doc["schedule"] = schedule_name(config.schedule);
    doc["seed"] = config.seed;

    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (const auto& row : report.levels) {
        nlohmann::ordered_json entry;
        entry["k"] = row.k;
        entry["dim"] = row.dim;
        entry["m"] = row.m;
        entry["delta"] = row.delta;
        entry["min_eig_S"] = row.min_eig;
        entry["sym_residual"] = row.sym_residual;
        entry["w1"] = row.w1;
        entry["psi"] = row.psi;
        entry["gamma"] = row.gamma;
        entry["rho_E"] = row.rho_e;
        entry["recursion_defect"] = row.recursion_defect;
        entry["lemma_violation"] = row.lemma_violation;
        entry["K0_measured"] = row.k0;
        if (row.g0 >= 0) entry["g0"] = row.g0;
        entry["K1_closed_form"] = row.k1;
        entry["delta_theory"] = row.delta_theory;
        entry["delta_theory_vacuous"] = row.delta_theory >= 1.0;
        levels.push_back(entry);
    }
    doc["per_level"] = levels;
    doc["assumption1_smoother_spsd"] = report.assumption1;
    doc["assumption2_delta_lt_1"] = report.assumption2;
    doc["assumption3_psi_nonincreasing"] = report.assumption3;
    doc["w1_below_2"] = report.w1_ok;
    doc["gamma_bound"] = report.gamma_bound;
    doc["all_pass"] = report.all_pass();
    return doc.dump(2) + "\n";
}

void write_verify_json_file(const std::string& path, const ExperimentConfig& config,
                            const AssumptionReport& report) {
    auto os = open_out(path);
    os << verify_report_json(config, report);
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "application,schedule,J,rho_E,contraction,cycles\n";
    for (const auto& row : rows) {
        os << row.application << ',' << row.schedule << ',' << row.levels << ','
           << format_g17(row.rho_e) << ',' << format_g17(row.contraction) << ',' << row.cycles
           << '\n';
    }
}

void write_sweep_csv_file(const std::string& path, const std::vector<SweepRow>& rows) {
    auto os = open_out(path);
    write_sweep_csv(os, rows);
}

}  // namespace sscmg
