#include "mitotk/splits.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "mitotk/csv.hpp"
#include "mitotk/error.hpp"
#include "mitotk/rng.hpp"

namespace mitotk {

namespace {

std::vector<std::string> types_in_order(const Manifest& m) {
    std::vector<std::string> types;
    std::unordered_set<std::string> seen;
    for (const auto& r : m.records)
        if (seen.insert(r.cancer_type).second)
            types.push_back(r.cancer_type);
    return types;
}

SplitPlan build_plan(const Manifest& m, const std::string& holdout, int k, std::uint64_t seed) {
    if (k < 2)
        throw Error("split: k must be >= 2");
    if (m.records.empty())
        throw Error("split: empty manifest");

    SplitPlan plan;
    plan.holdout_type = holdout;
    plan.k = k;
    plan.seed = seed;

    // strata in order of first appearance; members hold manifest indices
    struct Stratum {
        std::string type;
        Label label;
        std::vector<std::size_t> members;
    };
    std::vector<Stratum> strata;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < m.records.size(); ++i) {
        const auto& r = m.records[i];
        if (r.cancer_type == holdout)
            continue;
        std::string key = r.cancer_type + "\x1f" + label_name(r.label);
        auto [it, inserted] = index.try_emplace(key, strata.size());
        if (inserted)
            strata.push_back({r.cancer_type, r.label, {}});
        strata[it->second].members.push_back(i);
    }
    if (strata.empty())
        throw Error("split: no samples left outside holdout '" + holdout + "'");

    std::vector<int> fold_of(m.records.size(), -1);
    for (auto& st : strata) {
        if (static_cast<int>(st.members.size()) < k)
            plan.warnings.push_back("stratum " + st.type + "/" + label_name(st.label) + " has " +
                                    std::to_string(st.members.size()) + " samples for k=" +
                                    std::to_string(k) + "; some folds get none");
        Rng rng(derive_seed(seed, "split:" + holdout + ":" + st.type + ":" + label_name(st.label)));
        rng.shuffle(st.members);
        for (std::size_t i = 0; i < st.members.size(); ++i)
            fold_of[st.members[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    for (std::size_t i = 0; i < m.records.size(); ++i)
        if (fold_of[i] >= 0)
            plan.assignments.emplace_back(m.records[i].sample_id, fold_of[i]);
    return plan;
}

} // namespace

std::vector<SplitPlan> make_loocv_plans(const Manifest& m, int k, std::uint64_t seed) {
    std::vector<std::string> types = types_in_order(m);
    if (types.size() < 2)
        throw Error("split: leave-one-type-out needs >= 2 cancer types");
    std::vector<SplitPlan> plans;
    plans.reserve(types.size());
    for (const auto& t : types)
        plans.push_back(build_plan(m, t, k, seed));
    return plans;
}

SplitPlan make_single_holdout_plan(const Manifest& m, const std::string& holdout_type, int k,
                                   std::uint64_t seed) {
    std::vector<std::string> types = types_in_order(m);
    if (std::find(types.begin(), types.end(), holdout_type) == types.end())
        throw Error("split: holdout type '" + holdout_type + "' not present in manifest");
    if (types.size() < 2)
        throw Error("split: leave-one-type-out needs >= 2 cancer types");
    return build_plan(m, holdout_type, k, seed);
}

SplitPlan make_all_data_plan(const Manifest& m, int k, std::uint64_t seed) {
    for (const auto& r : m.records)
        if (r.cancer_type == "none")
            throw Error("split: cancer type 'none' collides with the all-data sentinel");
    return build_plan(m, "none", k, seed);
}

std::pair<std::vector<std::string>, std::vector<std::string>>
fold_membership(const SplitPlan& plan, int fold) {
    if (fold < 0 || fold >= plan.k)
        throw Error("fold " + std::to_string(fold) + " out of range for k=" +
                    std::to_string(plan.k));
    std::vector<std::string> train, val;
    for (const auto& [id, f] : plan.assignments)
        (f == fold ? val : train).push_back(id);
    return {std::move(train), std::move(val)};
}

SampleWeightTable sampling_weights(const Manifest& m, const std::vector<std::string>& train_ids) {
    if (train_ids.empty())
        throw Error("sampling_weights: empty training set");
    std::unordered_map<std::string, Label> label_of;
    label_of.reserve(m.records.size());
    for (const auto& r : m.records)
        label_of.emplace(r.sample_id, r.label);

    std::int64_t n_amf = 0, n_nmf = 0;
    for (const auto& id : train_ids) {
        auto it = label_of.find(id);
        if (it == label_of.end())
            throw Error("sampling_weights: unknown sample '" + id + "'");
        ++(it->second == Label::AMF ? n_amf : n_nmf);
    }
    if (n_amf == 0 || n_nmf == 0)
        throw Error("sampling_weights: a class is absent from the training set");

    SampleWeightTable t;
    t.weights.reserve(train_ids.size());
    for (const auto& id : train_ids) {
        double w = label_of.at(id) == Label::AMF ? static_cast<double>(n_nmf)
                                                 : static_cast<double>(n_amf);
        t.weights.emplace_back(id, w);
    }
    return t;
}

void write_plan(const std::string& path, const SplitPlan& plan) {
    CsvTable t;
    t.header = {"sample_id", "holdout_type", "fold"};
    t.rows.reserve(plan.assignments.size());
    for (const auto& [id, fold] : plan.assignments)
        t.rows.push_back({id, plan.holdout_type, std::to_string(fold)});
    write_csv(path, t);
}

SplitPlan read_plan(const std::string& path) {
    CsvTable t = read_csv(path);
    std::size_t id_col = t.col("sample_id");
    std::size_t holdout_col = t.col("holdout_type");
    std::size_t fold_col = t.col("fold");
    SplitPlan plan;
    plan.k = 0;
    std::unordered_set<std::string> seen;
    for (const auto& row : t.rows) {
        if (!seen.insert(row[id_col]).second)
            throw Error(path + ": duplicate sample_id '" + row[id_col] + "'");
        int fold = 0;
        try {
            fold = std::stoi(row[fold_col]);
        } catch (const std::exception&) {
            throw Error(path + ": bad fold value '" + row[fold_col] + "'");
        }
        if (fold < 0)
            throw Error(path + ": negative fold");
        if (plan.assignments.empty())
            plan.holdout_type = row[holdout_col];
        else if (plan.holdout_type != row[holdout_col])
            throw Error(path + ": inconsistent holdout_type");
        plan.assignments.emplace_back(row[id_col], fold);
        plan.k = std::max(plan.k, fold + 1);
    }
    if (plan.assignments.empty())
        throw Error(path + ": empty plan");
    return plan;
}

} // namespace mitotk
