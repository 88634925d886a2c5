// coco-lab: simulate constrained online convex optimization runs, sweep
// horizons for scaling slopes, and re-verify stored artifacts.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "coco_lab.h"

int main(int argc, char** argv) {
    CLI::App app{"constrained online convex optimization lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string trace_dir;
    int jobs = 0;
    long long seed_override = -1;

    CLI::App* run = app.add_subcommand(
        "run", "simulate every configured cell and write per-cell artifacts");
    run->add_option("config", config_path, "experiment config JSON")->required();

    CLI::App* sweep = app.add_subcommand(
        "sweep", "run the horizon grid and fit regret and violation slopes");
    sweep->add_option("config", config_path, "experiment config JSON")->required();

    for (CLI::App* cmd : {run, sweep}) {
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--jobs", jobs, "worker thread count");
        cmd->add_option("--seed-override", seed_override,
                        "replace the configured seeds with this one seed");
    }

    CLI::App* verify = app.add_subcommand(
        "verify", "re-check stored certificates against their traces");
    verify->add_option("dir", trace_dir, "artifact directory")->required();

    CLI11_PARSE(app, argc, argv);

    int exit_code = 0;
    coco_status st;
    if (run->parsed()) {
        st = coco_cmd_run(config_path.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
                          jobs, seed_override, &exit_code);
    } else if (sweep->parsed()) {
        st = coco_cmd_sweep(config_path.c_str(),
                            out_dir.empty() ? nullptr : out_dir.c_str(), jobs,
                            seed_override, &exit_code);
    } else {
        st = coco_cmd_verify(trace_dir.c_str(), &exit_code);
    }
    if (st != COCO_OK) {
        std::fprintf(stderr, "%s\n", coco_last_error());
        return 2;
    }
    return exit_code;
}
