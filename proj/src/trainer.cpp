#include "mitotk/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "json.hpp"

#include "mitotk/error.hpp"
#include "mitotk/rng.hpp"

namespace mitotk {

namespace {

constexpr double kBinWidth = (kHistHi - kHistLo) / kHistBins;

int bin_index(double c) {
    int b = static_cast<int>(std::floor((c - kHistLo) / kBinWidth));
    return b < 0 ? 0 : (b >= kHistBins ? kHistBins - 1 : b);
}

double clamp01_open(double p) {
    if (!(p > 0.0))
        return std::nextafter(0.0, 1.0);
    if (!(p < 1.0))
        return std::nextafter(1.0, 0.0);
    return p;
}

double sigmoid(double z) {
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

FeatureVector extract_features(const Patch& p, const StainMatrix& m) {
    RealImage conc = deconvolve(rgb_to_od(p), m);
    std::size_t n = conc.pixel_count();
    FeatureVector f{};
    for (int ch = 0; ch < 3; ++ch) {
        double sum = 0.0;
        for (std::size_t px = 0; px < n; ++px)
            sum += conc.data[px * 3 + ch];
        double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        std::array<double, kHistBins> hist{};
        for (std::size_t px = 0; px < n; ++px) {
            double c = conc.data[px * 3 + ch];
            sq += (c - mean) * (c - mean);
            hist[bin_index(c)] += 1.0;
        }
        double* out = &f[static_cast<std::size_t>(ch) * (2 + kHistBins)];
        out[0] = mean;
        out[1] = std::sqrt(sq / static_cast<double>(n));
        for (int b = 0; b < kHistBins; ++b)
            out[2 + b] = hist[b] / static_cast<double>(n);
    }
    return f;
}

double predict_proba(const ModelParams& params, const FeatureVector& f) {
    if (params.weights.size() != f.size())
        throw Error("predict_proba: weight/feature dimension mismatch");
    double z = params.bias;
    for (std::size_t i = 0; i < f.size(); ++i)
        z += params.weights[i] * f[i];
    return clamp01_open(sigmoid(z));
}

FocalResult focal_loss(double p, Label y, const FocalLossConfig& cfg) {
    p = std::clamp(p, 1e-12, 1.0 - 1e-12);
    double pt = y == Label::AMF ? p : 1.0 - p;
    double at = y == Label::AMF ? cfg.alpha : 1.0 - cfg.alpha;
    double s = y == Label::AMF ? 1.0 : -1.0;
    double one_minus = 1.0 - pt;
    double pw = std::pow(one_minus, cfg.gamma);
    FocalResult r;
    r.loss = -at * pw * std::log(pt);
    r.dloss_dlogit = s * at * pw * (cfg.gamma * pt * std::log(pt) - one_minus);
    return r;
}

void optimizer_step(ModelParams& params, const std::vector<double>& grads,
                    const OptimizerConfig& cfg, OptimizerState& state) {
    std::size_t dim = params.weights.size() + 1;
    if (grads.size() != dim || state.m.size() != dim || state.v.size() != dim)
        throw Error("optimizer_step: shape mismatch");
    for (double g : grads)
        if (!std::isfinite(g))
            throw Error("optimizer_step: non-finite gradient");

    ++state.step;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    auto update = [&](double& theta, std::size_t i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        double mhat = state.m[i] / bc1;
        double vhat = state.v[i] / bc2;
        theta -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
        theta -= cfg.learning_rate * cfg.weight_decay * theta;
    };
    for (std::size_t i = 0; i < params.weights.size(); ++i)
        update(params.weights[i], i);
    update(params.bias, dim - 1);
}

DataCache load_data(const Manifest& m, const std::vector<std::string>& ids, const StainMatrix& sm,
                    const std::string& image_base) {
    std::unordered_map<std::string, const SampleRecord*> by_id;
    by_id.reserve(m.records.size());
    for (const auto& r : m.records)
        by_id.emplace(r.sample_id, &r);

    DataCache cache;
    cache.reserve(ids.size());
    for (const auto& id : ids) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw Error("load_data: sample '" + id + "' not in manifest");
        const SampleRecord& rec = *it->second;
        if (rec.image_path.empty())
            throw Error("load_data: sample '" + id + "' has no image_path");
        std::filesystem::path path(rec.image_path);
        if (!image_base.empty() && path.is_relative())
            path = std::filesystem::path(image_base) / path;
        Patch patch = read_png_rgb8(path.string());
        RealImage conc = deconvolve(rgb_to_od(patch), sm);
        std::size_t n = conc.pixel_count();

        SampleData s;
        s.label = rec.label;
        s.base = extract_features(patch, sm);
        for (int ch = 0; ch < 3; ++ch) {
            s.mean[ch] = s.base[static_cast<std::size_t>(ch) * (2 + kHistBins)];
            s.stdev[ch] = s.base[static_cast<std::size_t>(ch) * (2 + kHistBins) + 1];
            auto& vals = s.sorted[ch];
            vals.resize(n);
            for (std::size_t px = 0; px < n; ++px)
                vals[px] = conc.data[px * 3 + ch];
            std::sort(vals.begin(), vals.end());
        }
        cache.emplace(id, std::move(s));
    }
    return cache;
}

FeatureVector perturbed_features(const SampleData& s, const Perturbation& d) {
    FeatureVector f{};
    for (int ch = 0; ch < 3; ++ch) {
        const auto& vals = s.sorted[ch];
        double n = static_cast<double>(vals.size());
        double* out = &f[static_cast<std::size_t>(ch) * (2 + kHistBins)];
        out[0] = d.alpha[ch] * s.mean[ch] + d.beta[ch];
        out[1] = d.alpha[ch] * s.stdev[ch];
        // count c' = a*c + b per bin by mapping bin edges back to c-space;
        // end bins absorb everything outside the range
        std::size_t prev = 0;
        for (int b = 1; b <= kHistBins; ++b) {
            std::size_t upto = vals.size();
            if (b < kHistBins) {
                double edge = (kHistLo + kBinWidth * b - d.beta[ch]) / d.alpha[ch];
                upto = static_cast<std::size_t>(
                    std::lower_bound(vals.begin(), vals.end(), edge) - vals.begin());
            }
            out[2 + (b - 1)] = static_cast<double>(upto - prev) / n;
            prev = upto;
        }
    }
    return f;
}

WeightedPicker::WeightedPicker(const SampleWeightTable& table) {
    if (table.weights.empty())
        throw Error("WeightedPicker: empty weight table");
    ids_.reserve(table.weights.size());
    cum_.reserve(table.weights.size());
    for (const auto& [id, w] : table.weights) {
        if (!(w >= 0.0))
            throw Error("WeightedPicker: negative weight for '" + id + "'");
        ids_.push_back(id);
        total_ += w;
        cum_.push_back(total_);
    }
    if (!(total_ > 0.0))
        throw Error("WeightedPicker: all weights are zero");
}

const std::string& WeightedPicker::pick(Rng& rng) const {
    double x = rng.uniform01() * total_;
    std::size_t idx =
        static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), x) - cum_.begin());
    if (idx >= ids_.size())
        idx = ids_.size() - 1;
    return ids_[idx];
}

namespace {

// balanced accuracy at threshold 0.5; falls back to plain accuracy when the
// validation slice has a single class
double validation_score(const ModelParams& params, const DataCache& cache,
                        const std::vector<std::string>& val_ids) {
    if (val_ids.empty())
        return 0.0;
    std::int64_t tp = 0, fn = 0, tn = 0, fp = 0;
    for (const auto& id : val_ids) {
        const SampleData& s = cache.at(id);
        bool pred_amf = predict_proba(params, s.base) >= 0.5;
        if (s.label == Label::AMF)
            ++(pred_amf ? tp : fn);
        else
            ++(pred_amf ? fp : tn);
    }
    if (tp + fn > 0 && tn + fp > 0)
        return 0.5 * (static_cast<double>(tp) / static_cast<double>(tp + fn) +
                      static_cast<double>(tn) / static_cast<double>(tn + fp));
    return static_cast<double>(tp + tn) / static_cast<double>(val_ids.size());
}

} // namespace

TrainResult train_fold(const Manifest& m, const SplitPlan& plan, int fold, const TrainConfig& cfg,
                       std::uint64_t seed, const DataCache& cache) {
    auto [train_ids, val_ids] = fold_membership(plan, fold);
    if (train_ids.empty())
        throw Error("train_fold: empty training set");
    WeightedPicker picker(sampling_weights(m, train_ids));

    StainAugConfig aug_cfg;
    aug_cfg.sigma_alpha = cfg.sigma_alpha;
    aug_cfg.sigma_beta = cfg.sigma_beta;
    aug_cfg.matrix = cfg.matrix;
    if (cfg.augment)
        validate(aug_cfg);

    TrainResult result;
    result.params.model_id = plan.holdout_type + ":fold" + std::to_string(fold);
    result.best_val = validation_score(result.params, cache, val_ids);
    result.log.push_back({0, 0.0, result.best_val});
    ModelParams params = result.params;

    OptimizerState state;
    std::vector<double> grads(static_cast<std::size_t>(kFeatureDim) + 1, 0.0);
    std::size_t steps_per_epoch = train_ids.size();

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        // separate streams so the drawn sample sequence is identical with
        // augmentation on and off
        Rng pick_rng(derive_seed(seed, "train-pick", static_cast<std::uint64_t>(epoch), fold));
        Rng aug_rng(derive_seed(seed, "train-aug", static_cast<std::uint64_t>(epoch), fold));
        double loss_sum = 0.0;
        for (std::size_t step = 0; step < steps_per_epoch; ++step) {
            const SampleData& s = cache.at(picker.pick(pick_rng));

            FeatureVector f;
            if (cfg.augment)
                f = perturbed_features(s, draw_perturbation(aug_cfg, aug_rng));
            else
                f = s.base;

            double p = predict_proba(params, f);
            FocalResult fr = focal_loss(p, s.label, cfg.focal);
            loss_sum += fr.loss;
            for (std::size_t i = 0; i < f.size(); ++i)
                grads[i] = fr.dloss_dlogit * f[i];
            grads[kFeatureDim] = fr.dloss_dlogit;
            optimizer_step(params, grads, cfg.opt, state);
        }
        double val = validation_score(params, cache, val_ids);
        result.log.push_back({epoch, loss_sum / static_cast<double>(steps_per_epoch), val});
        if (val > result.best_val) {
            result.best_val = val;
            result.params = params;
            result.best_epoch = epoch;
        }
    }
    return result;
}

TrainResult train_fold(const Manifest& m, const SplitPlan& plan, int fold, const TrainConfig& cfg,
                       std::uint64_t seed, const std::string& image_base) {
    auto [train_ids, val_ids] = fold_membership(plan, fold);
    std::vector<std::string> all = train_ids;
    all.insert(all.end(), val_ids.begin(), val_ids.end());
    DataCache cache = load_data(m, all, cfg.matrix, image_base);
    return train_fold(m, plan, fold, cfg, seed, cache);
}

void write_params(const std::string& path, const ModelParams& params) {
    nlohmann::json j;
    j["feature_spec"] = params.feature_spec;
    j["model_id"] = params.model_id;
    j["bias"] = params.bias;
    j["weights"] = params.weights;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    out << j.dump(2) << "\n";
}

ModelParams read_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(path + ": bad params JSON: " + e.what());
    }
    ModelParams p;
    try {
        p.feature_spec = j.at("feature_spec").get<std::string>();
        p.model_id = j.value("model_id", "");
        p.bias = j.at("bias").get<double>();
        p.weights = j.at("weights").get<std::vector<double>>();
    } catch (const std::exception& e) {
        throw Error(path + ": bad params JSON: " + e.what());
    }
    if (p.feature_spec != "conc-stats-v1")
        throw Error(path + ": unsupported feature_spec '" + p.feature_spec + "'");
    if (p.weights.size() != kFeatureDim)
        throw Error(path + ": expected " + std::to_string(kFeatureDim) + " weights");
    return p;
}

} // namespace mitotk
