#pragma once

// Persistence for traces: the CSV row schema, the run header, and
// round-trip loading for offline re-checking.

#include <string>
#include <vector>

#include "certify.hpp"
#include "learner.hpp"

namespace coco {

// {learner, cfg, instance_id, seed} plus the exact terminal measurements
// needed to re-check aggregates without re-simulating.
nlohmann::json trace_header(const Trace& tr);

// Rows as CSV with columns t,x_x,x_y,p_norm,w,w_a,w_b,delta_perim,
// delta_area,violation,loss,active. With a report, the four slack columns
// are appended (blank on inactive rows). Numbers print with 17 significant
// digits, so parsing returns the exact doubles.
std::string trace_csv(const Trace& tr, const CertificateReport* slacks = nullptr);

// Trace rebuilt from header + CSV. Scalar columns cannot reconstruct the
// projection and chord points, so loaded rows carry proj = x and chords =
// x; check_aggregates skips the separating-line flag for such rows. Stored
// slack columns, when present, ride along for cross-checking.
struct LoadedTrace {
    Trace trace;
    std::vector<StepCertificate> csv_slacks;
    bool has_slack_columns = false;
};
LoadedTrace trace_from_csv(const std::string& csv, const nlohmann::json& header);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace coco
