#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mitotk/dataset.hpp"

namespace mitotk {

struct ScoreRow {
    std::string sample_id;
    std::string model_id;
    double score = 0.0; // AMF probability in [0,1]
};

struct ScoreTable {
    std::vector<ScoreRow> rows;
};

// CSV: sample_id, model_id, score. Scores outside [0,1] and repeated
// (sample_id, model_id) pairs are rejected.
ScoreTable read_scores(const std::string& path);
void write_scores(const std::string& path, const ScoreTable& t);
void validate_scores(const ScoreTable& t);

// Mean per sample over its model scores, summed in model_id order so the
// result is independent of row order. Unless allow_partial, every sample
// must have exactly required_models rows. Output keeps first-appearance
// sample order, model_id "ensemble".
ScoreTable ensemble_mean(const ScoreTable& t, int required_models, bool allow_partial = false);

struct OtsuResult {
    double threshold = 0.0;
    bool degenerate = false; // all scores fell in one bin
};

// Maximizes the between-class variance over the bins-bin histogram of [0,1].
// Exact arithmetic contract (the acceptance oracle reproduces it): bin index
// = min(int(s*bins), bins-1); bin centers (i+0.5)/bins; per boundary b in
// 1..bins-1, w/mean sums accumulate left to right in bin order; variance =
// (w0/n)*(w1/n)*(mu0-mu1)^2, 0 when a side is empty; ties on the exact
// maximum resolve to the middle maximizer (lower middle when even); returned
// threshold = b/bins. All scores in one bin j returns (j+1)/bins flagged
// degenerate. Downstream rule everywhere: score >= t predicts AMF.
OtsuResult otsu_threshold(const std::vector<double>& scores, int bins = 256);

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;
    std::int64_t fp = 0;
};

ConfusionMatrix confusion(const std::vector<Label>& labels, const std::vector<double>& scores,
                          double threshold);

// sensitivity = AMF accuracy, specificity = NMF accuracy. A class with no
// samples leaves its rate (and BA) undefined, flagged false and set to NaN.
struct SummaryMetrics {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double balanced_accuracy = 0.0;
    double accuracy = 0.0;
    bool sensitivity_defined = false;
    bool specificity_defined = false;
};

SummaryMetrics summary_metrics(const ConfusionMatrix& cm);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

// Points at every distinct score (descending), led by (0,0) at a sentinel
// threshold of max score + 1. AUC is the tie-aware rank (Mann-Whitney)
// probability, which equals the trapezoidal area under these points.
struct RocResult {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

RocResult roc_curve_auc(const std::vector<Label>& labels, const std::vector<double>& scores);

// One evaluated group (a cancer type or "overall").
struct GroupEval {
    std::string group;
    std::int64_t n = 0;
    OtsuResult otsu;
    ConfusionMatrix cm;
    SummaryMetrics metrics;
    bool auc_defined = false;
    double roc_auc = 0.0;
    std::vector<RocPoint> roc_points;
};

struct EvalReport {
    std::vector<GroupEval> groups;
};

// Joins ensembled scores with manifest labels; Otsu and all metrics are
// computed per group. Groups: each cancer type in first-appearance order
// (when per_type), then "overall". Single-class groups get flagged,
// AUC-less rows instead of errors.
EvalReport evaluate_scores(const Manifest& m, const ScoreTable& mean_scores, bool per_type,
                           int bins = 256);

} // namespace mitotk
