#include "sscmg/cli.hpp"

#include "sscmg/mesh_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>

namespace sscmg::cli {

namespace {

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

Vector build_rhs(const ExperimentConfig& config, const Hierarchy& h) {
    const FeSpace& space = *h.levels[h.J()].space;
    switch (config.rhs) {
        case RhsKind::manufactured: {
            // u = sin(pi x) sin(pi y); f = -div(theta grad u) for constant theta
            const double t11 = config.theta(0, 0);
            const double t12 = config.theta(0, 1);
            const double t22 = config.theta(1, 1);
            const double pi = std::numbers::pi;
            auto f = [=](double x, double y) {
                return pi * pi *
                       ((t11 + t22) * std::sin(pi * x) * std::sin(pi * y) -
                        2.0 * t12 * std::cos(pi * x) * std::cos(pi * y));
            };
            return assemble_load(space, f);
        }
        case RhsKind::constant:
            return assemble_load(space, [](double, double) { return 1.0; });
        case RhsKind::file: {
            std::ifstream is(config.rhs_file);
            if (!is) throw ConfigError("cannot open rhs file: " + config.rhs_file);
            std::vector<double> values;
            double v = 0.0;
            while (is >> v) values.push_back(v);
            if (static_cast<int>(values.size()) != space.dim())
                throw ConfigError("rhs file has " + std::to_string(values.size()) +
                                  " entries, expected " + std::to_string(space.dim()));
            return Eigen::Map<const Vector>(values.data(), values.size());
        }
    }
    throw ConfigError("unreachable rhs kind");
}

int run_mesh(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log) {
    const Hierarchy h = build_hierarchy(config.hierarchy_config());
    ensure_directory(out_dir);
    log << "level  vertices  triangles  hanging  free_dofs\n";
    for (int k = 0; k <= h.J(); ++k) {
        const Mesh& mesh = *h.levels[k].mesh;
        write_mesh_file(join(out_dir, "level_" + std::to_string(k) + ".mesh"), mesh);
        log << k << "  " << mesh.num_vertices() << "  " << mesh.num_triangles() << "  "
            << h.levels[k].space->hanging.size() << "  " << h.levels[k].space->dim() << '\n';
    }
    return kExitOk;
}

int run_solve(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log) {
    const Hierarchy h = build_hierarchy(config.hierarchy_config());
    const Vector f = build_rhs(config, h);
    ensure_directory(out_dir);

    const bool manufactured = config.rhs == RhsKind::manufactured;
    Vector reference;
    if (manufactured) {
        const CholeskyFactor direct(*h.levels[h.J()].stiffness, "system");
        reference = direct.solve(f);
    }

    auto write_solution = [&](const Vector& z) {
        std::ofstream os(join(out_dir, "solution.txt"));
        for (int i = 0; i < z.size(); ++i) os << format_g17(z[i]) << '\n';
    };

    try {
        auto [z, report] = solve(h, f, config.rel_tol, config.max_cycles,
                                 manufactured ? &reference : nullptr);
        write_cycles_csv_file(join(out_dir, "cycles.csv"), report, manufactured);
        write_solution(z);
        log << "converged in " << report.cycles.size() << " cycles, final residual "
            << format_g17(report.final_residual) << '\n';
        return kExitOk;
    } catch (const NonConvergence& err) {
        write_cycles_csv_file(join(out_dir, "cycles.csv"), err.report, manufactured);
        log << err.what() << '\n';
        return kExitNonConvergence;
    }
}

int run_verify(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log) {
    const Hierarchy h = build_hierarchy(config.hierarchy_config());
    VerifyOptions options;
    options.seed = config.seed;
    options.dense_cap = config.dense_cap;
    const AssumptionReport report = run_verification(h, options);
    ensure_directory(out_dir);
    write_verify_json_file(join(out_dir, "verify.json"), config, report);
    write_levels_csv_file(join(out_dir, "levels.csv"), report);
    log << "assumption1=" << report.assumption1 << " assumption2=" << report.assumption2
        << " assumption3=" << report.assumption3 << " w1<2=" << report.w1_ok
        << " gamma_bound=" << report.gamma_bound << '\n';
    return report.all_pass() ? kExitOk : kExitAssumption;
}

int run_sweep(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log) {
    std::vector<ScheduleSpec> schedules = config.sweep_schedules;
    if (schedules.empty()) schedules.push_back(config.schedule);

    std::vector<SweepRow> rows;
    for (const auto& schedule : schedules) {
        for (int j = config.sweep_j_min; j <= config.sweep_j_max; ++j) {
            const Hierarchy h = build_hierarchy(config.hierarchy_config(j, schedule));
            SweepRow row;
            row.application = application_name(config.application);
            row.schedule = schedule_name(schedule);
            row.levels = j;
            if (h.dim(j) <= config.dense_cap) {
                const DenseMatrix e = mg_error_matrix(h, j, config.dense_cap);
                row.rho_e = energy_spectral_bound(e, *h.levels[j].stiffness);
            }

            ExperimentConfig run = config;
            run.rhs = RhsKind::manufactured;
            const Vector f = build_rhs(run, h);
            const CholeskyFactor direct(*h.levels[j].stiffness, "system");
            const Vector reference = direct.solve(f);
            const double e0 = std::sqrt(
                reference.dot(h.levels[j].stiffness->apply(reference)));
            try {
                auto [z, report] = solve(h, f, config.rel_tol, config.max_cycles, &reference);
                row.cycles = static_cast<int>(report.cycles.size());
                double previous = e0;
                for (const auto& rec : report.cycles) {
                    if (previous > 1e-11 * std::max(e0, 1e-300))
                        row.contraction = std::max(row.contraction, rec.energy_error / previous);
                    previous = rec.energy_error;
                }
            } catch (const NonConvergence&) {
                row.cycles = -1;
                row.contraction = 1.0;
            }
            rows.push_back(row);
            log << row.application << ' ' << row.schedule << " J=" << row.levels
                << " rho_E=" << format_g17(row.rho_e)
                << " contraction=" << format_g17(row.contraction) << '\n';
        }
    }
    ensure_directory(out_dir);
    write_sweep_csv_file(join(out_dir, "sweep.csv"), rows);
    return kExitOk;
}

}  // namespace sscmg::cli
