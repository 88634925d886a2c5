#include "coco_lab.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "experiment.hpp"
#include "trace_io.hpp"

struct coco_instance {
    coco::Instance ins;
};

struct coco_trace {
    coco::Instance ins;
    coco::Trace tr;
};

namespace {

thread_local std::string g_error;

coco_status fail(coco_status s, const std::string& what) {
    g_error = what;
    return s;
}

template <typename F>
coco_status guarded(F&& body) {
    try {
        g_error.clear();
        return body();
    } catch (const nlohmann::json::exception& e) {
        return fail(COCO_ERR_INVALID, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(COCO_ERR_INVALID, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(COCO_ERR_IO, e.what());
    } catch (const std::runtime_error& e) {
        // The core throws runtime_error for inconsistent instance data;
        // genuine file failures arrive as filesystem_error above.
        return fail(COCO_ERR_INVALID, e.what());
    } catch (const std::exception& e) {
        return fail(COCO_ERR_INTERNAL, e.what());
    }
}

coco_status emit(const std::string& text, char** out) {
    char* s = static_cast<char*>(std::malloc(text.size() + 1));
    if (!s) return fail(COCO_ERR_INTERNAL, "out of memory");
    std::memcpy(s, text.c_str(), text.size() + 1);
    *out = s;
    return COCO_OK;
}

constexpr double kDefaultTol = 1e-7;

coco::CertificateReport certificate_of(const coco_trace* tr, double tol) {
    return coco::check_aggregates(tr->tr, tr->tr.cfg.D, tr->tr.cfg.G, 0.0,
                                  tol > 0.0 ? tol : kDefaultTol);
}

}  // namespace

extern "C" {

const char* coco_last_error(void) { return g_error.c_str(); }

coco_status coco_instance_from_json(const char* json_text, coco_instance** out) {
    if (!json_text || !out) return fail(COCO_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        coco::Instance ins =
            coco::instance_from_json(nlohmann::json::parse(json_text));
        *out = new coco_instance{std::move(ins)};
        return COCO_OK;
    });
}

void coco_instance_free(coco_instance* ins) { delete ins; }

coco_status coco_instance_id(const coco_instance* ins, char* buf, size_t cap) {
    if (!ins || !buf) return fail(COCO_ERR_INVALID, "null argument");
    return guarded([&] {
        std::string id = coco::instance_id(ins->ins);
        if (id.size() + 1 > cap)
            return fail(COCO_ERR_INVALID,
                        "buffer too small: need " + std::to_string(id.size() + 1) +
                            " bytes");
        std::memcpy(buf, id.c_str(), id.size() + 1);
        return COCO_OK;
    });
}

coco_status coco_run_learner(const coco_instance* ins, const char* learner,
                             coco_trace** out) {
    if (!ins || !learner || !out) return fail(COCO_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        coco::Learner kind = coco::learner_from_name(learner);
        coco::Trace tr =
            coco::run(kind, coco::default_config(ins->ins), ins->ins);
        *out = new coco_trace{ins->ins, std::move(tr)};
        return COCO_OK;
    });
}

void coco_trace_free(coco_trace* tr) { delete tr; }

coco_status coco_trace_csv(const coco_trace* tr, int with_slacks, char** out) {
    if (!tr || !out) return fail(COCO_ERR_INVALID, "null argument");
    return guarded([&] {
        if (!with_slacks) return emit(coco::trace_csv(tr->tr), out);
        coco::CertificateReport cert = certificate_of(tr, 0.0);
        return emit(coco::trace_csv(tr->tr, &cert), out);
    });
}

coco_status coco_trace_header_json(const coco_trace* tr, char** out) {
    if (!tr || !out) return fail(COCO_ERR_INVALID, "null argument");
    return guarded([&] { return emit(coco::trace_header(tr->tr).dump(), out); });
}

coco_status coco_trace_certificate_json(const coco_trace* tr, double tol,
                                        char** out) {
    if (!tr || !out) return fail(COCO_ERR_INVALID, "null argument");
    return guarded(
        [&] { return emit(certificate_of(tr, tol).to_json().dump(), out); });
}

coco_status coco_trace_regret_json(const coco_trace* tr, char** out) {
    if (!tr || !out) return fail(COCO_ERR_INVALID, "null argument");
    return guarded([&] {
        return emit(coco::offline_benchmark(tr->ins, tr->tr).to_json().dump(), out);
    });
}

void coco_string_free(char* s) { std::free(s); }

coco_status coco_cmd_run(const char* config_path, const char* out_dir, int jobs,
                         long long seed_override, int* exit_code) {
    if (!config_path || !exit_code) return fail(COCO_ERR_INVALID, "null argument");
    return guarded([&] {
        *exit_code = coco::cmd_run(config_path, out_dir ? out_dir : "", jobs,
                                   seed_override);
        return COCO_OK;
    });
}

coco_status coco_cmd_sweep(const char* config_path, const char* out_dir, int jobs,
                           long long seed_override, int* exit_code) {
    if (!config_path || !exit_code) return fail(COCO_ERR_INVALID, "null argument");
    return guarded([&] {
        *exit_code = coco::cmd_sweep(config_path, out_dir ? out_dir : "", jobs,
                                     seed_override);
        return COCO_OK;
    });
}

coco_status coco_cmd_verify(const char* trace_dir, int* exit_code) {
    if (!trace_dir || !exit_code) return fail(COCO_ERR_INVALID, "null argument");
    return guarded([&] {
        *exit_code = coco::cmd_verify(trace_dir);
        return COCO_OK;
    });
}

}  // extern "C"
