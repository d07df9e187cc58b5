#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mitotk/dataset.hpp"
#include "mitotk/evaluation.hpp"

namespace mitotk {

// Everything one run wants written down. timestamp stays empty unless the
// caller opts in, so reruns with the same seed emit identical bytes.
struct RunReport {
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config; // flat key/value echo
    std::string timestamp;
    bool has_stats = false;
    ClassStats stats;
    bool has_eval = false;
    EvalReport eval;
    // files the caller already wrote into the output dir (names relative to
    // it); listed ahead of the report's own artifacts in run.json
    std::vector<std::string> extra_artifacts;
};

// metrics.csv / aligned text: group, roc_auc, ba, nmf_acc, amf_acc at 3
// decimals. The ba cell is recomputed from the rounded rate cells (see
// format_ba_cell) so each printed row is internally consistent; undefined
// metrics render empty (CSV) or "-" (text).
std::string metrics_csv(const EvalReport& report);
std::string metrics_text(const EvalReport& report);

// group, threshold, fpr, tpr at full precision.
std::string roc_points_csv(const EvalReport& report);

// group, tp, fn, tn, fp.
std::string confusion_csv(const EvalReport& report);

// Unit-square ROC plot: axes, diagonal reference, one polyline per group
// with a defined AUC. Deterministic bytes for identical input.
std::string render_roc_svg(const EvalReport& report);

// Full-precision JSON of every group row.
std::string metrics_json(const EvalReport& report);

// Writes whatever the report carries (stats.csv; metrics.csv, metrics.json,
// roc_points.csv, roc.svg, confusion.csv) plus run.json, which lists the
// artifact names, the config echo and its digest. Returns the artifact
// paths (run.json excluded). Identical input produces identical bytes.
std::vector<std::string> emit_run_report(const RunReport& run, const std::string& dir);

} // namespace mitotk
