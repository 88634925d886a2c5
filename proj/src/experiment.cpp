#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <thread>

#include "trace_io.hpp"

namespace fs = std::filesystem;

namespace coco {

namespace {

void append_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void parallel_for(int jobs, std::size_t n,
                  const std::function<void(std::size_t)>& body) {
    jobs = std::max(1, std::min(jobs, static_cast<int>(n)));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(jobs));
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
            } catch (...) {
                errs[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (std::thread& th : pool) th.join();
    for (std::exception_ptr& e : errs)
        if (e) std::rethrow_exception(e);
}

struct Cell {
    Learner learner;
    std::size_t T;
    std::uint64_t seed;
};

std::vector<Cell> grid_cells(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    for (Learner l : cfg.learners)
        for (std::size_t T : cfg.T_grid)
            for (std::uint64_t s : cfg.seeds) cells.push_back({l, T, s});
    return cells;
}

ExperimentConfig load_config(const std::string& path, const std::string& out_override,
                             int jobs_override, long long seed_override) {
    ExperimentConfig cfg =
        ExperimentConfig::from_json(nlohmann::json::parse(read_text_file(path)));
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (jobs_override > 0) cfg.jobs = jobs_override;
    if (seed_override >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed_override)};
    return cfg;
}

int fail_with(const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 2;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.generator = j.at("generator").get<std::string>();
    if (cfg.generator != "rotating_halfplanes" && cfg.generator != "shrinking_box" &&
        cfg.generator != "static")
        throw std::invalid_argument("unknown generator: " + cfg.generator);
    cfg.params = j.value("params", nlohmann::json::object());
    if (!cfg.params.contains("domain"))
        cfg.params["domain"] = ConvexPolygon::rectangle(-4, -4, 4, 4).to_json();
    if (!cfg.params.contains("G")) cfg.params["G"] = 1.0;
    if (cfg.generator == "rotating_halfplanes" && !cfg.params.contains("kernel_radius"))
        cfg.params["kernel_radius"] = 0.5;
    if (cfg.generator == "shrinking_box" && !cfg.params.contains("shrink_rate"))
        cfg.params["shrink_rate"] = 1e-3;
    if (cfg.generator == "static" &&
        (!cfg.params.contains("constraint") || !cfg.params.contains("loss")))
        throw std::invalid_argument("static generator needs constraint and loss params");

    for (const nlohmann::json& l :
         j.value("learners", nlohmann::json::array({"CocoOGD"})))
        cfg.learners.push_back(learner_from_name(l.get<std::string>()));
    if (cfg.learners.empty()) throw std::invalid_argument("no learners configured");

    if (j.contains("T_grid")) {
        for (const nlohmann::json& t : j.at("T_grid"))
            cfg.T_grid.push_back(t.get<std::size_t>());
    } else {
        for (std::size_t T = 1024; T <= 131072; T *= 2) cfg.T_grid.push_back(T);
    }
    if (cfg.T_grid.empty()) throw std::invalid_argument("T_grid is empty");
    for (std::size_t i = 1; i < cfg.T_grid.size(); ++i)
        if (cfg.T_grid[i] <= cfg.T_grid[i - 1])
            throw std::invalid_argument("T_grid must be strictly increasing");
    if (cfg.T_grid[0] == 0) throw std::invalid_argument("horizons must be positive");

    if (j.contains("seeds")) {
        for (const nlohmann::json& s : j.at("seeds"))
            cfg.seeds.push_back(s.get<std::uint64_t>());
    } else {
        cfg.seeds = {1};
    }
    if (cfg.seeds.empty()) throw std::invalid_argument("seeds is empty");

    cfg.output_dir = j.value("output_dir", std::string("out"));
    cfg.tol_base = j.value("tolerance", 1e-7);
    if (const char* env = std::getenv("COCO_LAB_TOL")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end == env || v <= 0.0)
            throw std::invalid_argument("COCO_LAB_TOL is not a positive number");
        cfg.tol_base = v;
    }
    if (cfg.tol_base <= 0.0) throw std::invalid_argument("tolerance must be positive");
    cfg.jobs = j.value("jobs", 1);
    if (cfg.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
    return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json names = nlohmann::json::array();
    for (Learner l : learners) names.push_back(learner_name(l));
    return {{"generator", generator}, {"params", params},
            {"learners", std::move(names)}, {"T_grid", T_grid},
            {"seeds", seeds},             {"output_dir", output_dir},
            {"tolerance", tol_base},      {"jobs", jobs}};
}

Instance make_instance(const ExperimentConfig& cfg, std::size_t T, std::uint64_t seed) {
    nlohmann::json ij = {{"generator", cfg.generator},
                         {"domain", cfg.params.at("domain")},
                         {"T", T},
                         {"G", cfg.params.value("G", 1.0)},
                         {"seed", seed},
                         {"params", cfg.params}};
    Instance ins = instance_from_json(ij);
    ins.seed = seed;  // static instances carry none of their own
    return ins;
}

RunArtifacts run_cell(const ExperimentConfig& cfg, Learner learner, std::size_t T,
                      std::uint64_t seed) {
    Instance ins = make_instance(cfg, T, seed);
    auto t0 = std::chrono::steady_clock::now();
    Trace trace = run(learner, default_config(ins), ins);
    CertificateReport cert = check_aggregates(trace, ins.D, ins.G, 0.0, cfg.tol_base);
    RegretReport regret = offline_benchmark(ins, trace);
    double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return RunArtifacts{std::move(ins), std::move(trace), std::move(cert),
                        std::move(regret), ms};
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("slope fit needs two points");
    std::vector<double> xs, ys;
    for (const auto& [t, v] : points) {
        xs.push_back(std::log(t));
        ys.push_back(std::log(std::max(v, 1e-12)));
    }
    double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("slope fit needs distinct horizons");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = syy - sxy * sxy / sxx;
    fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

std::string SweepResult::csv() const {
    std::string out = "generator,learner,T,seed,regret,ccv,bound_ccv,pass,wallclock_ms\n";
    for (const SweepRow& r : rows) {
        out += r.generator;
        out += ',';
        out += r.learner;
        out += ',';
        out += std::to_string(r.T);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        append_num(out, r.regret);
        out += ',';
        append_num(out, r.ccv);
        out += ',';
        append_num(out, r.bound_ccv);
        out += r.pass ? ",1," : ",0,";
        append_num(out, r.wallclock_ms);
        out += '\n';
    }
    return out;
}

nlohmann::json SweepResult::to_json() const {
    nlohmann::json jrows = nlohmann::json::array();
    for (const SweepRow& r : rows)
        jrows.push_back({{"generator", r.generator},
                         {"learner", r.learner},
                         {"T", r.T},
                         {"seed", r.seed},
                         {"regret", r.regret},
                         {"ccv", r.ccv},
                         {"bound_ccv", r.bound_ccv},
                         {"pass", r.pass},
                         {"wallclock_ms", r.wallclock_ms}});
    nlohmann::json jfits = nlohmann::json::array();
    for (const LearnerFit& f : fitted)
        jfits.push_back({{"learner", f.learner},
                         {"regret_slope", f.regret_fit.slope},
                         {"regret_intercept", f.regret_fit.intercept},
                         {"regret_r2", f.regret_fit.r2},
                         {"ccv_slope", f.ccv_fit.slope},
                         {"ccv_intercept", f.ccv_fit.intercept},
                         {"ccv_r2", f.ccv_fit.r2}});
    return {{"rows", std::move(jrows)}, {"fitted", std::move(jfits)}};
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
    if (cfg.T_grid.size() < 3)
        throw std::invalid_argument("slope fits need at least three horizons");
    std::vector<Cell> cells = grid_cells(cfg);
    SweepResult result;
    result.rows.resize(cells.size());
    parallel_for(cfg.jobs, cells.size(), [&](std::size_t i) {
        const Cell& c = cells[i];
        RunArtifacts art = run_cell(cfg, c.learner, c.T, c.seed);
        result.rows[i] = {cfg.generator,     learner_name(c.learner),
                          c.T,               c.seed,
                          art.regret.regret, art.regret.ccv,
                          art.regret.bound_ccv, art.cert.pass(),
                          art.wallclock_ms};
    });
    for (Learner l : cfg.learners) {
        LearnerFit fit;
        fit.learner = learner_name(l);
        std::vector<std::pair<double, double>> regret_pts, ccv_pts;
        for (std::size_t T : cfg.T_grid) {
            std::vector<double> regs, ccvs;
            for (const SweepRow& r : result.rows)
                if (r.learner == fit.learner && r.T == T) {
                    regs.push_back(r.regret);
                    ccvs.push_back(r.ccv);
                }
            regret_pts.emplace_back(static_cast<double>(T), median(std::move(regs)));
            ccv_pts.emplace_back(static_cast<double>(T), median(std::move(ccvs)));
        }
        fit.regret_fit = fit_slope(regret_pts);
        fit.ccv_fit = fit_slope(ccv_pts);
        result.fitted.push_back(std::move(fit));
    }
    return result;
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            int jobs_override, long long seed_override) {
    try {
        ExperimentConfig cfg =
            load_config(config_path, out_override, jobs_override, seed_override);
        fs::create_directories(cfg.output_dir);
        std::vector<Cell> cells = grid_cells(cfg);
        std::vector<std::string> failed(cells.size());
        parallel_for(cfg.jobs, cells.size(), [&](std::size_t i) {
            const Cell& c = cells[i];
            RunArtifacts art = run_cell(cfg, c.learner, c.T, c.seed);
            std::string stem = art.trace.instance + "-" + art.trace.learner;
            fs::path base = fs::path(cfg.output_dir) / stem;
            write_text_file(base.string() + ".trace.csv",
                            trace_csv(art.trace, &art.cert));
            write_text_file(base.string() + ".certificate.json",
                            art.cert.to_json().dump() + "\n");
            write_text_file(base.string() + ".regret.json",
                            art.regret.to_json().dump(2) + "\n");
            nlohmann::json summary = {{"header", trace_header(art.trace)},
                                      {"config", cfg.to_json()},
                                      {"pass", art.cert.pass()},
                                      {"wallclock_ms", art.wallclock_ms},
                                      {"files",
                                       {{"trace", stem + ".trace.csv"},
                                        {"certificate", stem + ".certificate.json"},
                                        {"regret", stem + ".regret.json"}}}};
            write_text_file(base.string() + ".summary.json", summary.dump(2) + "\n");
            if (c.learner == Learner::coco_ogd && !art.cert.pass()) failed[i] = stem;
        });
        std::vector<std::string> bad;
        for (std::string& s : failed)
            if (!s.empty()) bad.push_back(std::move(s));
        if (!bad.empty()) {
            nlohmann::json manifest = {{"failed_cells", bad}, {"count", bad.size()}};
            write_text_file((fs::path(cfg.output_dir) / "failures.json").string(),
                            manifest.dump(2) + "\n");
            std::cerr << manifest.dump() << "\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        return fail_with(e);
    }
}

int cmd_sweep(const std::string& config_path, const std::string& out_override,
              int jobs_override, long long seed_override) {
    try {
        ExperimentConfig cfg =
            load_config(config_path, out_override, jobs_override, seed_override);
        SweepResult result = run_sweep(cfg);
        fs::create_directories(cfg.output_dir);
        write_text_file((fs::path(cfg.output_dir) / "sweep.csv").string(), result.csv());
        nlohmann::json j = result.to_json();
        j["config"] = cfg.to_json();
        write_text_file((fs::path(cfg.output_dir) / "sweep.json").string(),
                        j.dump(2) + "\n");
        return 0;
    } catch (const std::exception& e) {
        return fail_with(e);
    }
}

namespace {

// A stored certificate must replay bit-for-bit from the scalar trace
// columns, except the separating-line flags, which need geometry the CSV
// does not carry; those are checked for internal consistency instead.
bool verify_cell(const fs::path& summary_path, std::string& why) {
    nlohmann::json s = nlohmann::json::parse(read_text_file(summary_path.string()));
    fs::path dir = summary_path.parent_path();
    const nlohmann::json& files = s.at("files");
    LoadedTrace lt = trace_from_csv(
        read_text_file((dir / files.at("trace").get<std::string>()).string()),
        s.at("header"));
    nlohmann::json cert = nlohmann::json::parse(read_text_file(
        (dir / files.at("certificate").get<std::string>()).string()));
    double tol_base = s.at("config").at("tolerance").get<double>();
    CertificateReport rec = check_aggregates(lt.trace, lt.trace.cfg.D, lt.trace.cfg.G,
                                             0.0, tol_base);

    const nlohmann::json& ag = cert.at("aggregate");
    auto num_mismatch = [&](const char* key, double got) {
        if (ag.at(key).get<double>() == got) return false;
        why = std::string("aggregate ") + key + " does not replay";
        return true;
    };
    if (num_mismatch("sum_p", rec.aggregate.sum_p) ||
        num_mismatch("sum_p32", rec.aggregate.sum_p32) ||
        num_mismatch("sum_delta", rec.aggregate.sum_delta) ||
        num_mismatch("sum_Delta", rec.aggregate.sum_Delta) ||
        num_mismatch("ccv", rec.aggregate.ccv))
        return false;
    auto flag_mismatch = [&](const char* key, bool got) {
        if (ag.at(key).get<bool>() == got) return false;
        why = std::string("aggregate flag ") + key + " does not replay";
        return true;
    };
    if (flag_mismatch("perim_budget_ok", rec.aggregate.perim_budget_ok) ||
        flag_mismatch("area_budget_ok", rec.aggregate.area_budget_ok) ||
        flag_mismatch("p32_budget_ok", rec.aggregate.p32_budget_ok) ||
        flag_mismatch("holder_ok", rec.aggregate.holder_ok) ||
        flag_mismatch("ccv_reduction_ok", rec.aggregate.ccv_reduction_ok) ||
        flag_mismatch("theorem_ok", rec.aggregate.theorem_ok))
        return false;

    const nlohmann::json& steps = cert.at("per_step");
    if (steps.size() != rec.per_step.size()) {
        why = "per-step certificate count does not replay";
        return false;
    }
    bool stored_floor_ok = true;
    for (std::size_t i = 0; i < rec.per_step.size(); ++i) {
        const nlohmann::json& sj = steps[i];
        const StepCertificate& got = rec.per_step[i];
        if (sj.at("t").get<std::size_t>() != got.t ||
            sj.at("area_lemma_slack").get<double>() != got.area_lemma_slack ||
            sj.at("perim_lemma_slack").get<double>() != got.perim_lemma_slack ||
            sj.at("max_bound_slack").get<double>() != got.max_bound_slack) {
            why = "per-step slack at index " + std::to_string(i) + " does not replay";
            return false;
        }
        if (got.area_lemma_slack < -rec.tol || got.perim_lemma_slack < -rec.tol ||
            got.max_bound_slack < -rec.tol || !sj.at("supporting_hp_ok").get<bool>())
            stored_floor_ok = false;
    }
    if (cert.at("per_step_ok").get<bool>() != stored_floor_ok) {
        why = "per_step_ok flag inconsistent with stored slacks";
        return false;
    }
    if (lt.has_slack_columns) {
        if (lt.csv_slacks.size() != rec.per_step.size()) {
            why = "CSV slack column count does not replay";
            return false;
        }
        for (std::size_t i = 0; i < rec.per_step.size(); ++i) {
            if (lt.csv_slacks[i].area_lemma_slack != rec.per_step[i].area_lemma_slack ||
                lt.csv_slacks[i].perim_lemma_slack !=
                    rec.per_step[i].perim_lemma_slack ||
                lt.csv_slacks[i].max_bound_slack != rec.per_step[i].max_bound_slack) {
                why = "CSV slack column at index " + std::to_string(i) +
                      " does not replay";
                return false;
            }
        }
    }
    bool agg_ok = rec.aggregate.perim_budget_ok && rec.aggregate.area_budget_ok &&
                  rec.aggregate.p32_budget_ok && rec.aggregate.holder_ok &&
                  rec.aggregate.ccv_reduction_ok && rec.aggregate.theorem_ok;
    bool expected_pass = agg_ok && stored_floor_ok;
    if (cert.at("pass").get<bool>() != expected_pass) {
        why = "pass flag inconsistent with stored certificate";
        return false;
    }
    if (lt.trace.learner == "CocoOGD" && !expected_pass) {
        why = "certificates fail";
        return false;
    }
    return true;
}

}  // namespace

int cmd_verify(const std::string& trace_dir) {
    try {
        std::vector<fs::path> summaries;
        for (const fs::directory_entry& e : fs::directory_iterator(trace_dir))
            if (e.path().filename().string().ends_with(".summary.json"))
                summaries.push_back(e.path());
        std::sort(summaries.begin(), summaries.end());
        if (summaries.empty())
            throw std::runtime_error("no .summary.json files in " + trace_dir);
        nlohmann::json bad = nlohmann::json::array();
        for (const fs::path& p : summaries) {
            std::string why;
            bool ok = false;
            try {
                ok = verify_cell(p, why);
            } catch (const std::exception& e) {
                why = e.what();
            }
            if (!ok) bad.push_back({{"summary", p.filename().string()}, {"why", why}});
        }
        if (!bad.empty()) {
            std::cerr << nlohmann::json{{"failed", bad}}.dump() << "\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        return fail_with(e);
    }
}

}  // namespace coco
