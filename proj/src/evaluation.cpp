#include "mitotk/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "mitotk/csv.hpp"
#include "mitotk/error.hpp"
#include "mitotk/numfmt.hpp"

namespace mitotk {

void validate_scores(const ScoreTable& t) {
    std::unordered_set<std::string> seen;
    seen.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        if (!(r.score >= 0.0 && r.score <= 1.0))
            throw Error("score out of [0,1] for sample '" + r.sample_id + "' model '" +
                        r.model_id + "'");
        if (!seen.insert(r.sample_id + "\x1f" + r.model_id).second)
            throw Error("duplicate (sample_id, model_id): ('" + r.sample_id + "', '" +
                        r.model_id + "')");
    }
}

ScoreTable read_scores(const std::string& path) {
    CsvTable t = read_csv(path);
    std::size_t id_col = t.col("sample_id");
    std::size_t model_col = t.col("model_id");
    std::size_t score_col = t.col("score");
    ScoreTable out;
    out.rows.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        ScoreRow r;
        r.sample_id = row[id_col];
        r.model_id = row[model_col];
        try {
            std::size_t pos = 0;
            r.score = std::stod(row[score_col], &pos);
            if (pos != row[score_col].size())
                throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw Error(path + ": bad score '" + row[score_col] + "'");
        }
        out.rows.push_back(std::move(r));
    }
    try {
        validate_scores(out);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
    return out;
}

void write_scores(const std::string& path, const ScoreTable& t) {
    CsvTable out;
    out.header = {"sample_id", "model_id", "score"};
    out.rows.reserve(t.rows.size());
    for (const auto& r : t.rows)
        out.rows.push_back({r.sample_id, r.model_id, format_full(r.score)});
    write_csv(path, out);
}

ScoreTable ensemble_mean(const ScoreTable& t, int required_models, bool allow_partial) {
    validate_scores(t);
    if (required_models < 1)
        throw Error("ensemble: required_models must be >= 1");

    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<std::pair<std::string, double>>> per_sample;
    per_sample.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        auto [it, inserted] = per_sample.try_emplace(r.sample_id);
        if (inserted)
            order.push_back(r.sample_id);
        it->second.emplace_back(r.model_id, r.score);
    }

    ScoreTable out;
    out.rows.reserve(order.size());
    for (const auto& id : order) {
        auto& models = per_sample[id];
        if (!allow_partial && static_cast<int>(models.size()) != required_models)
            throw Error("ensemble: sample '" + id + "' has " + std::to_string(models.size()) +
                        " model scores, expected " + std::to_string(required_models));
        std::sort(models.begin(), models.end());
        double sum = 0.0;
        for (const auto& [model, score] : models)
            sum += score;
        out.rows.push_back({id, "ensemble", sum / static_cast<double>(models.size())});
    }
    return out;
}

OtsuResult otsu_threshold(const std::vector<double>& scores, int bins) {
    if (scores.size() < 2)
        throw Error("otsu: need at least 2 scores");
    if (bins < 2)
        throw Error("otsu: bins must be >= 2");

    std::vector<std::int64_t> hist(static_cast<std::size_t>(bins), 0);
    for (double s : scores) {
        if (!(s >= 0.0 && s <= 1.0))
            throw Error("otsu: score out of [0,1]");
        int idx = static_cast<int>(s * bins);
        if (idx >= bins)
            idx = bins - 1;
        ++hist[static_cast<std::size_t>(idx)];
    }

    int occupied = 0, last_occupied = 0;
    for (int i = 0; i < bins; ++i)
        if (hist[static_cast<std::size_t>(i)] > 0) {
            ++occupied;
            last_occupied = i;
        }
    if (occupied == 1)
        return {static_cast<double>(last_occupied + 1) / bins, true};

    double n = static_cast<double>(scores.size());
    double best = -1.0;
    std::vector<int> argmax;
    for (int b = 1; b < bins; ++b) {
        double w0 = 0.0, s0 = 0.0, w1 = 0.0, s1 = 0.0;
        for (int i = 0; i < bins; ++i) {
            double h = static_cast<double>(hist[static_cast<std::size_t>(i)]);
            double center = (i + 0.5) / bins;
            if (i < b) {
                w0 += h;
                s0 += h * center;
            } else {
                w1 += h;
                s1 += h * center;
            }
        }
        double var = 0.0;
        if (w0 > 0.0 && w1 > 0.0) {
            double mu0 = s0 / w0;
            double mu1 = s1 / w1;
            var = (w0 / n) * (w1 / n) * (mu0 - mu1) * (mu0 - mu1);
        }
        if (var > best) {
            best = var;
            argmax.assign(1, b);
        } else if (var == best) {
            argmax.push_back(b);
        }
    }
    int chosen = argmax[(argmax.size() - 1) / 2];
    return {static_cast<double>(chosen) / bins, false};
}

ConfusionMatrix confusion(const std::vector<Label>& labels, const std::vector<double>& scores,
                          double threshold) {
    if (labels.size() != scores.size())
        throw Error("confusion: labels/scores length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        bool pred_amf = scores[i] >= threshold;
        if (labels[i] == Label::AMF)
            ++(pred_amf ? cm.tp : cm.fn);
        else
            ++(pred_amf ? cm.fp : cm.tn);
    }
    return cm;
}

SummaryMetrics summary_metrics(const ConfusionMatrix& cm) {
    SummaryMetrics s;
    double nan = std::numeric_limits<double>::quiet_NaN();
    std::int64_t pos = cm.tp + cm.fn;
    std::int64_t neg = cm.tn + cm.fp;
    s.sensitivity_defined = pos > 0;
    s.specificity_defined = neg > 0;
    s.sensitivity = pos > 0 ? static_cast<double>(cm.tp) / static_cast<double>(pos) : nan;
    s.specificity = neg > 0 ? static_cast<double>(cm.tn) / static_cast<double>(neg) : nan;
    s.balanced_accuracy = (pos > 0 && neg > 0) ? (s.sensitivity + s.specificity) / 2.0 : nan;
    std::int64_t total = pos + neg;
    s.accuracy = total > 0 ? static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total) : nan;
    return s;
}

RocResult roc_curve_auc(const std::vector<Label>& labels, const std::vector<double>& scores) {
    if (labels.size() != scores.size())
        throw Error("roc: labels/scores length mismatch");
    std::int64_t pos = 0, neg = 0;
    for (Label l : labels)
        ++(l == Label::AMF ? pos : neg);
    if (pos == 0 || neg == 0)
        throw Error("roc: both classes required");

    std::vector<std::size_t> idx(labels.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average ranks over tie groups (ascending), summed for positives
    double pos_rank_sum = 0.0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && scores[idx[j]] == scores[idx[i]])
            ++j;
        double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (labels[idx[k]] == Label::AMF)
                pos_rank_sum += avg_rank;
        i = j;
    }
    double p = static_cast<double>(pos);
    double auc = (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));

    RocResult out;
    out.auc = auc;
    double max_score = scores[idx.back()];
    out.points.push_back({0.0, 0.0, max_score + 1.0});
    // sweep thresholds descending; at t, prediction is score >= t
    std::int64_t tp = 0, fp = 0;
    for (std::size_t i = idx.size(); i > 0;) {
        std::size_t j = i;
        double t = scores[idx[i - 1]];
        while (j > 0 && scores[idx[j - 1]] == t) {
            if (labels[idx[j - 1]] == Label::AMF)
                ++tp;
            else
                ++fp;
            --j;
        }
        out.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos), t});
        i = j;
    }
    return out;
}

EvalReport evaluate_scores(const Manifest& m, const ScoreTable& mean_scores, bool per_type,
                           int bins) {
    std::unordered_map<std::string, const SampleRecord*> by_id;
    by_id.reserve(m.records.size());
    for (const auto& r : m.records)
        by_id.emplace(r.sample_id, &r);

    struct GroupData {
        std::vector<Label> labels;
        std::vector<double> scores;
    };
    std::vector<std::string> group_order;
    std::unordered_map<std::string, GroupData> groups;
    GroupData overall;
    for (const auto& row : mean_scores.rows) {
        auto it = by_id.find(row.sample_id);
        if (it == by_id.end())
            throw Error("evaluate: sample '" + row.sample_id + "' not in manifest");
        const SampleRecord& rec = *it->second;
        overall.labels.push_back(rec.label);
        overall.scores.push_back(row.score);
        if (per_type) {
            auto [git, inserted] = groups.try_emplace(rec.cancer_type);
            if (inserted)
                group_order.push_back(rec.cancer_type);
            git->second.labels.push_back(rec.label);
            git->second.scores.push_back(row.score);
        }
    }
    if (overall.scores.empty())
        throw Error("evaluate: no scores");

    auto eval_group = [bins](const std::string& name, const GroupData& g) {
        GroupEval e;
        e.group = name;
        e.n = static_cast<std::int64_t>(g.scores.size());
        if (g.scores.size() >= 2) {
            e.otsu = otsu_threshold(g.scores, bins);
        } else {
            e.otsu = {0.5, true};
        }
        e.cm = confusion(g.labels, g.scores, e.otsu.threshold);
        e.metrics = summary_metrics(e.cm);
        bool both = (e.cm.tp + e.cm.fn) > 0 && (e.cm.tn + e.cm.fp) > 0;
        if (both) {
            RocResult roc = roc_curve_auc(g.labels, g.scores);
            e.auc_defined = true;
            e.roc_auc = roc.auc;
            e.roc_points = std::move(roc.points);
        }
        return e;
    };

    EvalReport report;
    if (per_type)
        for (const auto& name : group_order)
            report.groups.push_back(eval_group(name, groups[name]));
    report.groups.push_back(eval_group("overall", overall));
    return report;
}

} // namespace mitotk
