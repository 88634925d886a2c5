#include "trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coco {

namespace {

const char* kBaseHeader =
    "t,x_x,x_y,p_norm,w,w_a,w_b,delta_perim,delta_area,violation,loss,active";
const char* kSlackHeader =
    ",area_lemma_slack,perim_lemma_slack,max_bound_slack,supporting_hp_ok";

void append_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

const char* step_rule_name(StepRule r) {
    switch (r) {
        case StepRule::paper: return "paper";
    }
    return "paper";
}

StepRule step_rule_from_name(const std::string& s) {
    if (s == "paper") return StepRule::paper;
    throw std::invalid_argument("unknown step rule: " + s);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double num_field(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace

nlohmann::json trace_header(const Trace& tr) {
    nlohmann::json fs = nlohmann::json::array();
    for (const Point2& p : tr.final_set) fs.push_back({p.x, p.y});
    return {{"learner", tr.learner},
            {"cfg",
             {{"D", tr.cfg.D},
              {"G", tr.cfg.G},
              {"x_init", {tr.cfg.x_init.x, tr.cfg.x_init.y}},
              {"step_rule", step_rule_name(tr.cfg.step_rule)}}},
            {"instance_id", tr.instance},
            {"seed", tr.seed},
            {"initial_perimeter", tr.initial_perimeter},
            {"initial_area", tr.initial_area},
            {"final_perimeter", tr.final_perimeter},
            {"final_area", tr.final_area},
            {"final_set", std::move(fs)}};
}

std::string trace_csv(const Trace& tr, const CertificateReport* slacks) {
    std::string out = kBaseHeader;
    if (slacks) out += kSlackHeader;
    out += '\n';
    out.reserve(out.size() + 140 * tr.rows.size());
    std::size_t next_cert = 0;
    for (const StepRecord& r : tr.rows) {
        out += std::to_string(r.t);
        for (double v : {r.x.x, r.x.y, r.p_norm, r.w, r.w_a, r.w_b, r.delta_perim,
                         r.delta_area, r.violation, r.loss}) {
            out += ',';
            append_num(out, v);
        }
        out += r.active ? ",1" : ",0";
        if (slacks) {
            const std::vector<StepCertificate>& per = slacks->per_step;
            if (r.active && next_cert < per.size() && per[next_cert].t == r.t) {
                const StepCertificate& s = per[next_cert++];
                out += ',';
                append_num(out, s.area_lemma_slack);
                out += ',';
                append_num(out, s.perim_lemma_slack);
                out += ',';
                append_num(out, s.max_bound_slack);
                out += s.supporting_hp_ok ? ",1" : ",0";
            } else {
                out += ",,,,";
            }
        }
        out += '\n';
    }
    return out;
}

LoadedTrace trace_from_csv(const std::string& csv, const nlohmann::json& header) {
    LoadedTrace out;
    Trace& tr = out.trace;
    tr.learner = header.at("learner").get<std::string>();
    tr.instance = header.at("instance_id").get<std::string>();
    tr.seed = header.at("seed").get<std::uint64_t>();
    const nlohmann::json& cfg = header.at("cfg");
    tr.cfg.D = cfg.at("D").get<double>();
    tr.cfg.G = cfg.at("G").get<double>();
    tr.cfg.x_init = {cfg.at("x_init")[0].get<double>(), cfg.at("x_init")[1].get<double>()};
    tr.cfg.step_rule = step_rule_from_name(cfg.at("step_rule").get<std::string>());
    tr.initial_perimeter = header.at("initial_perimeter").get<double>();
    tr.initial_area = header.at("initial_area").get<double>();
    tr.final_perimeter = header.at("final_perimeter").get<double>();
    tr.final_area = header.at("final_area").get<double>();
    for (const nlohmann::json& p : header.at("final_set"))
        tr.final_set.push_back({p[0].get<double>(), p[1].get<double>()});

    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty trace CSV");
    std::string want = kBaseHeader;
    if (line == want + kSlackHeader) {
        out.has_slack_columns = true;
    } else if (line != want) {
        throw std::invalid_argument("unrecognized trace CSV header: " + line);
    }
    std::size_t want_cols = out.has_slack_columns ? 16 : 12;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f = split_csv(line);
        if (f.size() != want_cols)
            throw std::invalid_argument("trace CSV row with " +
                                        std::to_string(f.size()) + " columns");
        StepRecord r;
        r.t = static_cast<std::size_t>(std::strtoull(f[0].c_str(), nullptr, 10));
        r.x = {num_field(f[1]), num_field(f[2])};
        r.p_norm = num_field(f[3]);
        r.w = num_field(f[4]);
        r.w_a = num_field(f[5]);
        r.w_b = num_field(f[6]);
        r.delta_perim = num_field(f[7]);
        r.delta_area = num_field(f[8]);
        r.violation = num_field(f[9]);
        r.loss = num_field(f[10]);
        r.active = f[11] == "1";
        r.proj = r.x;
        r.chord_a = r.chord_b = r.x;
        if (out.has_slack_columns && r.active && !f[12].empty()) {
            StepCertificate s;
            s.t = r.t;
            s.area_lemma_slack = num_field(f[12]);
            s.perim_lemma_slack = num_field(f[13]);
            s.max_bound_slack = num_field(f[14]);
            s.supporting_hp_ok = f[15] == "1";
            out.csv_slacks.push_back(s);
        }
        tr.rows.push_back(r);
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace coco
