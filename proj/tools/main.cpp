#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "mitotk/dataset.hpp"
#include "mitotk/error.hpp"
#include "mitotk/evaluation.hpp"
#include "mitotk/image.hpp"
#include "mitotk/numfmt.hpp"
#include "mitotk/pipeline.hpp"
#include "mitotk/report.hpp"
#include "mitotk/splits.hpp"
#include "mitotk/stainaug.hpp"
#include "mitotk/synth.hpp"
#include "mitotk/trainer.hpp"

namespace fs = std::filesystem;
using namespace mitotk;

namespace {

// --out, falling back to MITOTK_OUT; `required` demands one of the two
std::string resolve_out(const std::string& flag, bool required, const std::string& fallback = ".") {
    if (!flag.empty())
        return flag;
    if (const char* env = std::getenv("MITOTK_OUT"); env && *env)
        return env;
    if (required)
        throw CLI::ValidationError("--out", "output directory required (flag or MITOTK_OUT)");
    return fallback;
}

std::string default_base(const std::string& flag, const std::string& manifest_path) {
    return flag.empty() ? fs::path(manifest_path).parent_path().string() : flag;
}

StainMatrix load_matrix(const std::string& path) {
    return path.empty() ? StainMatrix::default_he() : read_stain_matrix(path);
}

std::vector<std::string> read_id_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos)
            continue;
        ids.push_back(line.substr(b));
    }
    return ids;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    out << content;
    if (!out)
        throw Error("write failed: " + path);
}

std::string sanitize(const std::string& name) {
    std::string s = name;
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)))
            c = '_';
    return s;
}

struct TrainFlags {
    int epochs = 30;
    double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8, weight_decay = 0.01;
    double gamma = 2.0, alpha = 0.25;
    double sigma_alpha = 0.05, sigma_beta = 0.05;
    std::string matrix_path;

    void add_to(CLI::App* sub) {
        sub->add_option("--epochs", epochs, "training epochs")->capture_default_str();
        sub->add_option("--lr", lr, "learning rate")->capture_default_str();
        sub->add_option("--beta1", beta1, "first-moment decay")->capture_default_str();
        sub->add_option("--beta2", beta2, "second-moment decay")->capture_default_str();
        sub->add_option("--epsilon", epsilon, "adaptive-step epsilon")->capture_default_str();
        sub->add_option("--weight-decay", weight_decay, "decoupled weight decay")
            ->capture_default_str();
        sub->add_option("--gamma", gamma, "focal focusing exponent")->capture_default_str();
        sub->add_option("--alpha", alpha, "focal positive-class balance")->capture_default_str();
        sub->add_option("--sigma-alpha", sigma_alpha, "stain scale half-range")
            ->capture_default_str();
        sub->add_option("--sigma-beta", sigma_beta, "stain shift half-range")
            ->capture_default_str();
        sub->add_option("--matrix", matrix_path, "stain matrix file (3 lines x 3 reals)");
    }

    TrainConfig to_config(bool augment) const {
        TrainConfig cfg;
        cfg.epochs = epochs;
        cfg.opt = {lr, beta1, beta2, epsilon, weight_decay};
        cfg.focal = {gamma, alpha};
        cfg.augment = augment;
        cfg.sigma_alpha = sigma_alpha;
        cfg.sigma_beta = sigma_beta;
        cfg.matrix = load_matrix(matrix_path);
        return cfg;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"atypical-vs-normal mitosis classification protocol toolkit"};
    app.require_subcommand(1);

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "class-distribution statistics per cancer type");
    std::string stats_manifest, stats_out;
    bool stats_lenient = false;
    stats_cmd->add_option("--manifest", stats_manifest, "manifest CSV")->required();
    stats_cmd->add_option("--out", stats_out, "output directory");
    stats_cmd->add_flag("--no-strict", stats_lenient, "drop duplicate sample_ids instead of failing");
    stats_cmd->callback([&] {
        std::string dir = resolve_out(stats_out, false);
        LoadResult lr = load_manifest(stats_manifest, !stats_lenient);
        if (lr.dropped_duplicate_ids > 0)
            std::cerr << "warning: dropped " << lr.dropped_duplicate_ids
                      << " duplicate sample_ids\n";
        ClassStats s = class_stats(lr.manifest);
        fs::create_directories(dir);
        write_file((fs::path(dir) / "stats.csv").string(), stats_csv(s));
        write_file((fs::path(dir) / "stats.json").string(), stats_json(s));
        std::cout << stats_text(s);
    });

    // dedup
    auto* dedup_cmd = app.add_subcommand("dedup", "remove exact pixel-level duplicates");
    std::string dedup_manifest_path, dedup_out, dedup_base;
    dedup_cmd->add_option("--manifest", dedup_manifest_path, "manifest CSV")->required();
    dedup_cmd->add_option("--out-manifest", dedup_out, "deduplicated manifest path")->required();
    dedup_cmd->add_option("--images-base", dedup_base,
                          "base directory for relative image paths (default: manifest directory)");
    dedup_cmd->callback([&] {
        Manifest m = load_manifest(dedup_manifest_path, true).manifest;
        DedupResult r = dedup_manifest(m, default_base(dedup_base, dedup_manifest_path));
        write_manifest(dedup_out, r.manifest);
        std::cout << "removed " << r.removed << " duplicates, kept " << r.manifest.records.size()
                  << "\n";
    });

    // split
    auto* split_cmd = app.add_subcommand("split", "stratified fold assignment");
    std::string split_manifest, split_holdout, split_out;
    bool split_loocv = false, split_all = false;
    int split_k = 5;
    std::uint64_t split_seed = 0;
    split_cmd->add_option("--manifest", split_manifest, "manifest CSV")->required();
    split_cmd->add_option("--k", split_k, "fold count")->capture_default_str();
    split_cmd->add_option("--seed", split_seed, "root seed")->capture_default_str();
    auto* opt_holdout = split_cmd->add_option("--holdout", split_holdout,
                                              "hold out one cancer type");
    auto* opt_loocv = split_cmd->add_flag("--loocv", split_loocv,
                                          "one plan per cancer type (leave-one-type-out)");
    auto* opt_all = split_cmd->add_flag("--all", split_all, "single all-data plan");
    opt_holdout->excludes(opt_loocv)->excludes(opt_all);
    opt_loocv->excludes(opt_all);
    split_cmd->add_option("--out", split_out, "output directory");
    split_cmd->callback([&] {
        if (split_holdout.empty() && !split_loocv && !split_all)
            throw CLI::ValidationError("split", "pass one of --holdout TYPE, --loocv, --all");
        std::string dir = resolve_out(split_out, false);
        fs::create_directories(dir);
        Manifest m = load_manifest(split_manifest, true).manifest;
        std::vector<SplitPlan> plans;
        if (split_all)
            plans.push_back(make_all_data_plan(m, split_k, split_seed));
        else if (split_loocv)
            plans = make_loocv_plans(m, split_k, split_seed);
        else
            plans.push_back(make_single_holdout_plan(m, split_holdout, split_k, split_seed));
        for (const auto& plan : plans) {
            for (const auto& w : plan.warnings)
                std::cerr << "warning: " << w << "\n";
            std::string name = plan.holdout_type == "none"
                                   ? "plan_all.csv"
                                   : "plan_holdout_" + sanitize(plan.holdout_type) + ".csv";
            std::string path = (fs::path(dir) / name).string();
            write_plan(path, plan);
            std::cout << path << "\n";
        }
    });

    // augment
    auto* aug_cmd = app.add_subcommand("augment", "stain-perturb a directory of PNG patches");
    std::string aug_in, aug_out, aug_matrix;
    double aug_sa = 0.05, aug_sb = 0.05;
    std::uint64_t aug_seed = 0;
    aug_cmd->add_option("--in", aug_in, "input directory of PNGs")->required();
    aug_cmd->add_option("--out", aug_out, "output directory")->required();
    aug_cmd->add_option("--sigma-alpha", aug_sa, "scale half-range")->capture_default_str();
    aug_cmd->add_option("--sigma-beta", aug_sb, "shift half-range (OD units)")
        ->capture_default_str();
    aug_cmd->add_option("--seed", aug_seed, "root seed")->capture_default_str();
    aug_cmd->add_option("--matrix", aug_matrix, "stain matrix file (3 lines x 3 reals)");
    aug_cmd->callback([&] {
        StainAugConfig cfg;
        cfg.sigma_alpha = aug_sa;
        cfg.sigma_beta = aug_sb;
        cfg.seed = aug_seed;
        cfg.matrix = load_matrix(aug_matrix);
        validate(cfg);

        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(aug_in))
            if (entry.is_regular_file() && entry.path().extension() == ".png")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw Error("no .png files in " + aug_in);
        fs::create_directories(aug_out);
        for (std::size_t i = 0; i < files.size(); ++i) {
            Patch p = read_png_rgb8(files[i].string());
            write_png_rgb8((fs::path(aug_out) / files[i].filename()).string(),
                           augment(p, cfg, i));
        }
        std::cout << "augmented " << files.size() << " patches\n";
    });

    // train
    auto* train_cmd = app.add_subcommand("train", "train one fold of the reference classifier");
    std::string train_manifest, train_plan, train_out, train_base, train_augment = "off";
    int train_fold_idx = 0;
    std::uint64_t train_seed = 0;
    TrainFlags train_flags;
    train_cmd->add_option("--manifest", train_manifest, "manifest CSV")->required();
    train_cmd->add_option("--plan", train_plan, "split plan CSV")->required();
    train_cmd->add_option("--fold", train_fold_idx, "validation fold index")->required();
    train_cmd->add_option("--augment", train_augment, "stain augmentation on|off")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    train_cmd->add_option("--seed", train_seed, "root seed")->capture_default_str();
    train_cmd->add_option("--out", train_out, "params JSON path")->required();
    train_cmd->add_option("--images-base", train_base,
                          "base directory for relative image paths (default: manifest directory)");
    train_flags.add_to(train_cmd);
    train_cmd->callback([&] {
        Manifest m = load_manifest(train_manifest, true).manifest;
        SplitPlan plan = read_plan(train_plan);
        TrainConfig cfg = train_flags.to_config(train_augment == "on");
        TrainResult r = train_fold(m, plan, train_fold_idx, cfg, train_seed,
                                   default_base(train_base, train_manifest));
        write_params(train_out, r.params);
        std::cout << "model " << r.params.model_id << ": best epoch " << r.best_epoch
                  << ", validation score " << r.best_val << "\n";
    });

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "score samples with trained params");
    std::string pred_params, pred_manifest, pred_ids, pred_out, pred_base;
    predict_cmd->add_option("--params", pred_params, "params JSON")->required();
    predict_cmd->add_option("--manifest", pred_manifest, "manifest CSV")->required();
    predict_cmd->add_option("--ids", pred_ids, "file with one sample_id per line (default: all)");
    predict_cmd->add_option("--out", pred_out, "scores CSV path")->required();
    predict_cmd->add_option("--images-base", pred_base,
                            "base directory for relative image paths (default: manifest directory)");
    predict_cmd->add_option("--matrix", train_flags.matrix_path,
                            "stain matrix file (3 lines x 3 reals)");
    predict_cmd->callback([&] {
        Manifest m = load_manifest(pred_manifest, true).manifest;
        ModelParams params = read_params(pred_params);
        std::vector<std::string> ids;
        if (pred_ids.empty())
            for (const auto& r : m.records)
                ids.push_back(r.sample_id);
        else
            ids = read_id_file(pred_ids);
        DataCache cache = load_data(m, ids, load_matrix(train_flags.matrix_path),
                                    default_base(pred_base, pred_manifest));
        ScoreTable t;
        std::string model_id = params.model_id.empty() ? "model" : params.model_id;
        for (const auto& id : ids)
            t.rows.push_back({id, model_id, predict_proba(params, cache.at(id).base)});
        write_scores(pred_out, t);
        std::cout << "scored " << ids.size() << " samples\n";
    });

    // ensemble
    auto* ens_cmd = app.add_subcommand("ensemble", "average per-sample scores across models");
    std::vector<std::string> ens_inputs;
    std::string ens_out;
    int ens_required = 5;
    bool ens_partial = false;
    ens_cmd->add_option("--scores", ens_inputs, "score CSV files")->required()->expected(-1);
    ens_cmd->add_option("--required", ens_required, "models required per sample")
        ->capture_default_str();
    ens_cmd->add_flag("--allow-partial", ens_partial, "average whatever models are present");
    ens_cmd->add_option("--out", ens_out, "output CSV path")->required();
    ens_cmd->callback([&] {
        ScoreTable all;
        for (const auto& path : ens_inputs) {
            ScoreTable t = read_scores(path);
            all.rows.insert(all.rows.end(), t.rows.begin(), t.rows.end());
        }
        ScoreTable means = ensemble_mean(all, ens_required, ens_partial);
        write_scores(ens_out, means);
        std::cout << "ensembled " << means.rows.size() << " samples\n";
    });

    // threshold
    auto* thr_cmd = app.add_subcommand("threshold", "Otsu threshold over a score table");
    std::string thr_scores, thr_out;
    int thr_bins = 256;
    thr_cmd->add_option("--scores", thr_scores, "score CSV")->required();
    thr_cmd->add_option("--bins", thr_bins, "histogram bins")->capture_default_str();
    thr_cmd->add_option("--out", thr_out, "write threshold JSON here");
    thr_cmd->callback([&] {
        ScoreTable t = read_scores(thr_scores);
        std::vector<double> scores;
        scores.reserve(t.rows.size());
        for (const auto& r : t.rows)
            scores.push_back(r.score);
        OtsuResult r = otsu_threshold(scores, thr_bins);
        std::cout << "threshold " << r.threshold << (r.degenerate ? " (degenerate)" : "") << "\n";
        if (!thr_out.empty())
            write_file(thr_out, std::string("{\n  \"bins\": ") + std::to_string(thr_bins) +
                                    ",\n  \"degenerate\": " +
                                    (r.degenerate ? "true" : "false") + ",\n  \"threshold\": " +
                                    format_full(r.threshold) + "\n}\n");
    });

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "metrics for ensembled scores");
    std::string eval_manifest, eval_scores, eval_out;
    int eval_bins = 256;
    bool eval_overall_only = false;
    eval_cmd->add_option("--manifest", eval_manifest, "manifest CSV")->required();
    eval_cmd->add_option("--scores", eval_scores, "ensembled score CSV")->required();
    eval_cmd->add_option("--out", eval_out, "output directory");
    eval_cmd->add_option("--bins", eval_bins, "Otsu histogram bins")->capture_default_str();
    eval_cmd->add_flag("--overall-only", eval_overall_only, "skip per-type groups");
    eval_cmd->callback([&] {
        std::string dir = resolve_out(eval_out, false);
        Manifest m = load_manifest(eval_manifest, true).manifest;
        ScoreTable scores = read_scores(eval_scores);
        RunReport run;
        run.has_eval = true;
        run.eval = evaluate_scores(m, scores, !eval_overall_only, eval_bins);
        emit_run_report(run, dir);
        std::cout << metrics_text(run.eval);
    });

    // report
    auto* report_cmd = app.add_subcommand("report", "stats plus full metrics report");
    std::string rep_manifest, rep_scores, rep_out;
    int rep_bins = 256;
    report_cmd->add_option("--manifest", rep_manifest, "manifest CSV")->required();
    report_cmd->add_option("--scores", rep_scores, "ensembled score CSV")->required();
    report_cmd->add_option("--out", rep_out, "output directory");
    report_cmd->add_option("--bins", rep_bins, "Otsu histogram bins")->capture_default_str();
    report_cmd->callback([&] {
        std::string dir = resolve_out(rep_out, false);
        Manifest m = load_manifest(rep_manifest, true).manifest;
        ScoreTable scores = read_scores(rep_scores);
        RunReport run;
        run.has_stats = true;
        run.stats = class_stats(m);
        run.has_eval = true;
        run.eval = evaluate_scores(m, scores, true, rep_bins);
        emit_run_report(run, dir);
        std::cout << stats_text(run.stats) << "\n" << metrics_text(run.eval);
    });

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic two-class dataset");
    std::string synth_out, synth_matrix;
    SynthConfig synth_cfg;
    synth_cmd->add_option("--out", synth_out, "output directory");
    synth_cmd->add_option("--n", synth_cfg.n, "sample count")->capture_default_str();
    synth_cmd->add_option("--types", synth_cfg.types, "pseudo cancer types")
        ->capture_default_str();
    synth_cmd->add_option("--amf-frac", synth_cfg.amf_fraction, "AMF prevalence")
        ->capture_default_str();
    synth_cmd->add_option("--patch", synth_cfg.patch, "patch side in pixels")
        ->capture_default_str();
    synth_cmd->add_option("--domain-shift", synth_cfg.domain_shift,
                          "hematoxylin baseline step between types")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth_cfg.seed, "root seed")->capture_default_str();
    synth_cmd->add_option("--matrix", synth_matrix, "stain matrix file (3 lines x 3 reals)");
    synth_cmd->callback([&] {
        std::string dir = resolve_out(synth_out, true);
        synth_cfg.matrix = load_matrix(synth_matrix);
        Manifest m = synth_dataset(synth_cfg, dir);
        std::cout << stats_text(class_stats(m));
        std::cout << (fs::path(dir) / "manifest.csv").string() << "\n";
    });

    // pipeline
    auto* pipe_cmd = app.add_subcommand("pipeline", "end-to-end: split, train, ensemble, report");
    std::string pipe_manifest, pipe_out, pipe_holdout, pipe_augment = "off";
    bool pipe_all = false, pipe_stamp = false;
    int pipe_k = 5, pipe_bins = 256;
    std::uint64_t pipe_seed = 0;
    TrainFlags pipe_flags;
    pipe_cmd->add_option("--manifest", pipe_manifest, "manifest CSV")->required();
    pipe_cmd->add_option("--out", pipe_out, "output directory");
    auto* pipe_opt_holdout =
        pipe_cmd->add_option("--holdout", pipe_holdout, "hold out one cancer type");
    pipe_cmd->add_flag("--all", pipe_all, "all-data mode (out-of-fold scoring)")
        ->excludes(pipe_opt_holdout);
    pipe_cmd->add_option("--k", pipe_k, "fold count")->capture_default_str();
    pipe_cmd->add_option("--seed", pipe_seed, "root seed")->capture_default_str();
    pipe_cmd->add_option("--augment", pipe_augment, "stain augmentation on|off")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    pipe_cmd->add_option("--bins", pipe_bins, "Otsu histogram bins")->capture_default_str();
    pipe_cmd->add_flag("--stamp", pipe_stamp, "record a wall-clock timestamp in run.json");
    pipe_flags.add_to(pipe_cmd);
    pipe_cmd->callback([&] {
        if (pipe_holdout.empty() && !pipe_all)
            throw CLI::ValidationError("pipeline", "pass --holdout TYPE or --all");
        PipelineConfig cfg;
        cfg.manifest_path = pipe_manifest;
        cfg.out_dir = resolve_out(pipe_out, true);
        cfg.holdout = pipe_holdout;
        cfg.all_data = pipe_all;
        cfg.k = pipe_k;
        cfg.seed = pipe_seed;
        cfg.train = pipe_flags.to_config(pipe_augment == "on");
        cfg.bins = pipe_bins;
        cfg.stamp = pipe_stamp;
        PipelineResult r = run_pipeline(cfg);
        std::cout << metrics_text(r.eval);
        std::cout << "wrote " << r.artifacts.size() + 1 << " files to " << cfg.out_dir << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
