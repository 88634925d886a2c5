#pragma once

// Experiment harness: configuration, per-cell execution, sweeps over
// horizons with scaling-slope fits, and offline re-verification of stored
// artifacts.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "certify.hpp"
#include "instance.hpp"
#include "learner.hpp"

namespace coco {

struct ExperimentConfig {
    std::string generator;
    nlohmann::json params;  // generator arguments, including the domain
    std::vector<Learner> learners;
    std::vector<std::size_t> T_grid;  // strictly increasing
    std::vector<std::uint64_t> seeds;
    std::string output_dir = "out";
    double tol_base = 1e-7;
    int jobs = 1;

    // Env COCO_LAB_TOL overrides the config's "tolerance", which overrides
    // the default. Throws std::invalid_argument on malformed fields.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;  // every effective value echoed
};

// Builds the instance for one grid cell from the configured generator.
Instance make_instance(const ExperimentConfig& cfg, std::size_t T, std::uint64_t seed);

struct RunArtifacts {
    Instance instance;
    Trace trace;
    CertificateReport cert;
    RegretReport regret;
    double wallclock_ms = 0.0;
};
RunArtifacts run_cell(const ExperimentConfig& cfg, Learner learner, std::size_t T,
                      std::uint64_t seed);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
// Ordinary least squares on (log T, log value); values below 1e-12 are
// floored there before the log.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

struct SweepRow {
    std::string generator;
    std::string learner;
    std::size_t T = 0;
    std::uint64_t seed = 0;
    double regret = 0.0;
    double ccv = 0.0;
    double bound_ccv = 0.0;
    bool pass = true;
    double wallclock_ms = 0.0;
};

struct LearnerFit {
    std::string learner;
    SlopeFit regret_fit;  // fitted on per-T medians over seeds
    SlopeFit ccv_fit;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<LearnerFit> fitted;

    std::string csv() const;  // generator,learner,T,seed,regret,ccv,bound_ccv,pass,wallclock_ms
    nlohmann::json to_json() const;
};

// Runs the full grid in memory. Requires at least three horizons for the
// slope fits.
SweepResult run_sweep(const ExperimentConfig& cfg);

// Commands behind the CLI; each returns a process exit code: 0 on success,
// 1 when certificates fail (a machine-readable manifest is written), 2 on
// configuration or I/O errors (message on stderr). seed_override < 0 keeps
// the configured seeds; jobs_override and out_override apply when nonzero /
// nonempty.
int cmd_run(const std::string& config_path, const std::string& out_override,
            int jobs_override, long long seed_override);
int cmd_sweep(const std::string& config_path, const std::string& out_override,
              int jobs_override, long long seed_override);
int cmd_verify(const std::string& trace_dir);

}  // namespace coco
