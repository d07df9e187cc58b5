#include "mitotk/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <unordered_set>

#include "mitotk/error.hpp"
#include "mitotk/numfmt.hpp"
#include "mitotk/report.hpp"
#include "mitotk/splits.hpp"

namespace mitotk {

namespace {

std::string utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::map<std::string, std::string> config_echo(const PipelineConfig& cfg) {
    std::map<std::string, std::string> e;
    e["manifest"] = cfg.manifest_path;
    e["mode"] = cfg.all_data ? "all" : "holdout";
    e["holdout"] = cfg.all_data ? "none" : cfg.holdout;
    e["k"] = std::to_string(cfg.k);
    e["seed"] = std::to_string(cfg.seed);
    e["bins"] = std::to_string(cfg.bins);
    e["epochs"] = std::to_string(cfg.train.epochs);
    e["augment"] = cfg.train.augment ? "on" : "off";
    e["sigma_alpha"] = format_full(cfg.train.sigma_alpha);
    e["sigma_beta"] = format_full(cfg.train.sigma_beta);
    e["focal_gamma"] = format_full(cfg.train.focal.gamma);
    e["focal_alpha"] = format_full(cfg.train.focal.alpha);
    e["learning_rate"] = format_full(cfg.train.opt.learning_rate);
    e["beta1"] = format_full(cfg.train.opt.beta1);
    e["beta2"] = format_full(cfg.train.opt.beta2);
    e["epsilon"] = format_full(cfg.train.opt.epsilon);
    e["weight_decay"] = format_full(cfg.train.opt.weight_decay);
    std::string matrix;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (!matrix.empty())
                matrix += " ";
            matrix += format_full(cfg.train.matrix.row(i, j));
        }
    e["stain_matrix"] = matrix;
    return e;
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    if (cfg.all_data == !cfg.holdout.empty())
        throw Error("pipeline: pass exactly one of a holdout type or all-data mode");

    Manifest manifest = load_manifest(cfg.manifest_path, true).manifest;
    std::string base_dir = std::filesystem::path(cfg.manifest_path).parent_path().string();
    std::filesystem::path out(cfg.out_dir);
    std::filesystem::create_directories(out);

    SplitPlan plan = cfg.all_data ? make_all_data_plan(manifest, cfg.k, cfg.seed)
                                  : make_single_holdout_plan(manifest, cfg.holdout, cfg.k,
                                                             cfg.seed);
    write_plan((out / "plan.csv").string(), plan);

    // eval targets: held-out samples, or everyone (scored out of fold)
    std::vector<std::string> eval_ids;
    if (cfg.all_data) {
        for (const auto& [id, fold] : plan.assignments)
            eval_ids.push_back(id);
    } else {
        for (const auto& r : manifest.records)
            if (r.cancer_type == cfg.holdout)
                eval_ids.push_back(r.sample_id);
    }

    std::vector<std::string> needed;
    std::unordered_set<std::string> seen;
    for (const auto& [id, fold] : plan.assignments)
        if (seen.insert(id).second)
            needed.push_back(id);
    for (const auto& id : eval_ids)
        if (seen.insert(id).second)
            needed.push_back(id);
    DataCache cache = load_data(manifest, needed, cfg.train.matrix, base_dir);

    std::vector<std::string> extra_files = {"plan.csv"};
    ScoreTable scores;
    for (int fold = 0; fold < cfg.k; ++fold) {
        TrainResult tr = train_fold(manifest, plan, fold, cfg.train, cfg.seed, cache);
        std::string params_name = "params_fold" + std::to_string(fold) + ".json";
        write_params((out / params_name).string(), tr.params);
        extra_files.push_back(params_name);

        if (cfg.all_data) {
            auto [train_ids, val_ids] = fold_membership(plan, fold);
            for (const auto& id : val_ids)
                scores.rows.push_back(
                    {id, tr.params.model_id, predict_proba(tr.params, cache.at(id).base)});
        } else {
            for (const auto& id : eval_ids)
                scores.rows.push_back(
                    {id, tr.params.model_id, predict_proba(tr.params, cache.at(id).base)});
        }
    }
    write_scores((out / "scores.csv").string(), scores);
    extra_files.push_back("scores.csv");

    ScoreTable means = ensemble_mean(scores, cfg.all_data ? 1 : cfg.k);
    write_scores((out / "ensemble.csv").string(), means);
    extra_files.push_back("ensemble.csv");

    RunReport run;
    run.seed = cfg.seed;
    run.config = config_echo(cfg);
    if (cfg.stamp)
        run.timestamp = utc_now();
    run.has_stats = true;
    run.stats = class_stats(manifest);
    run.has_eval = true;
    run.eval = evaluate_scores(manifest, means, true, cfg.bins);
    run.extra_artifacts = extra_files;

    PipelineResult result;
    result.eval = run.eval;
    result.artifacts = emit_run_report(run, cfg.out_dir);
    return result;
}

} // namespace mitotk
