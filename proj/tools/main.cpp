#include "sscmg/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int dense_cap = sscmg::kDefaultDenseCap;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "seed for randomized probes");
    cmd->add_option("--dense-cap", args.dense_cap, "dense oracle dimension cap");
}

sscmg::ExperimentConfig load(const CommonArgs& args) {
    auto config = sscmg::parse_config_file(args.config_path);
    config.seed = args.seed;
    config.dense_cap = args.dense_cap;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric multigrid with successive-subspace-correction smoothers"};
    app.require_subcommand(1);

    CommonArgs mesh_args, solve_args, verify_args, sweep_args;
    add_common(app.add_subcommand("mesh", "write per-level mesh files"), mesh_args);
    add_common(app.add_subcommand("solve", "run the multigrid solver"), solve_args);
    add_common(app.add_subcommand("verify", "measure constants and check bounds"), verify_args);
    add_common(app.add_subcommand("sweep", "compare schedules across level counts"), sweep_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("mesh"))
            return sscmg::cli::run_mesh(load(mesh_args), mesh_args.out_dir, std::cout);
        if (app.got_subcommand("solve"))
            return sscmg::cli::run_solve(load(solve_args), solve_args.out_dir, std::cout);
        if (app.got_subcommand("verify"))
            return sscmg::cli::run_verify(load(verify_args), verify_args.out_dir, std::cout);
        if (app.got_subcommand("sweep"))
            return sscmg::cli::run_sweep(load(sweep_args), sweep_args.out_dir, std::cout);
    } catch (const sscmg::NonConvergence& err) {
        std::cerr << "error: " << err.what() << '\n';
        return sscmg::cli::kExitNonConvergence;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return sscmg::cli::kExitValidation;
    }
    return sscmg::cli::kExitValidation;
}
