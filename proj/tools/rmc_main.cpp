// rmc: Monte Carlo for products of random column-Dirichlet stochastic
// matrices. Subcommands: ensemble, figure <tag>, check-fixed-point, version.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmc/errors.hpp"
#include "rmc/version.hpp"
#include "rmc/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

void add_common_flags(CLI::App* cmd, rmc::RunConfig& cfg) {
    cmd->add_option("--seed", cfg.master_seed, "Master seed");
    cmd->add_option("--out", cfg.out_dir, "Output directory");
    cmd->add_flag("--svg", cfg.emit_svg, "Also emit SVG plots");
    cmd->add_option("--workers", cfg.workers, "Worker threads (0 = hardware)");
    cmd->add_option("--bins", cfg.bins, "Histogram bin count (0 = automatic)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo for products of random stochastic matrices"};
    app.require_subcommand(1);

    rmc::RunConfig ens_cfg;
    std::vector<std::string> obs_list = {"columns"};
    auto* ens = app.add_subcommand("ensemble", "Run an ensemble and write per-observable CSVs");
    ens->add_option("--n", ens_cfg.n, "Matrix dimension");
    ens->add_option("--a", ens_cfg.a, "Dirichlet concentration");
    ens->add_option("--t", ens_cfg.t_values, "Checkpoint times (repeatable, ascending)");
    ens->add_option("--replicas", ens_cfg.replicas, "Number of independent chains");
    ens->add_option("--observables", obs_list,
                    "Observables: columns distance exponents spectrum perron curve");
    ens->add_option("--eps-real", ens_cfg.eps_real, "Half-width of the real-line band");
    ens->add_flag("--renormalize", ens_cfg.renormalize_columns,
                  "Renormalize product columns every step");
    add_common_flags(ens, ens_cfg);

    rmc::RunConfig fig_cfg = rmc::figure_base_config();
    std::string tag;
    auto* fig = app.add_subcommand("figure", "Reproduce one figure's data series");
    fig->add_option("tag", tag, "Figure tag (fig1a ... fig6d)")->required();
    fig->add_option("--replicas", fig_cfg.replicas, "Override the figure's ensemble size");
    fig->add_option("--n", fig_cfg.n, "Override the figure's matrix dimension");
    fig->add_option("--a", fig_cfg.a, "Override the figure's Dirichlet concentration");
    fig->add_option("--t", fig_cfg.t_values, "Override the figure's checkpoint time");
    fig->add_option("--eps-real", fig_cfg.eps_real, "Half-width of the real-line band");
    add_common_flags(fig, fig_cfg);

    double cfp_a = 1.0, cfp_tol = 1e-5;
    int cfp_grid = 99;
    auto* cfp = app.add_subcommand("check-fixed-point",
                                   "Verify the stationary density against the transfer operator");
    cfp->add_option("--a", cfp_a, "Dirichlet concentration");
    cfp->add_option("--grid", cfp_grid, "Number of interior grid points");
    cfp->add_option("--tol", cfp_tol, "Max residual to pass");

    auto* ver = app.add_subcommand("version", "Print the library version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (ver->parsed()) {
            std::printf("rmc %s\n", rmc::kVersion);
            return kExitOk;
        }
        if (ens->parsed()) {
            ens_cfg.observables = std::set<std::string>(obs_list.begin(), obs_list.end());
            rmc::RunManifest man = rmc::run_ensemble(ens_cfg);
            std::printf("wrote %zu files to %s (%.2f s)\n", man.files.size(),
                        ens_cfg.out_dir.c_str(), man.wall_seconds);
            return kExitOk;
        }
        if (fig->parsed()) {
            rmc::RunManifest man = rmc::reproduce_figure(tag, fig_cfg);
            std::printf("wrote %zu files to %s (%.2f s)\n", man.files.size(),
                        fig_cfg.out_dir.c_str(), man.wall_seconds);
            return kExitOk;
        }
        if (cfp->parsed()) {
            const double worst = rmc::check_fixed_point(cfp_a, cfp_grid, cfp_tol, std::cout);
            return worst < cfp_tol ? kExitOk : kExitNumerical;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const rmc::NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const rmc::IoFailure& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    }
    return kExitUsage;
}
