#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mitotk/dataset.hpp"
#include "mitotk/splits.hpp"
#include "mitotk/stainaug.hpp"

namespace mitotk {

// Per stain channel: mean, std, 8-bin histogram of concentrations.
inline constexpr int kFeatureDim = 30;
inline constexpr double kHistLo = -0.5;
inline constexpr double kHistHi = 3.5;
inline constexpr int kHistBins = 8;

using FeatureVector = std::array<double, kFeatureDim>;

struct ModelParams {
    std::vector<double> weights = std::vector<double>(kFeatureDim, 0.0);
    double bias = 0.0;
    std::string feature_spec = "conc-stats-v1";
    std::string model_id;
};

struct FocalLossConfig {
    double gamma = 2.0; // >= 0
    double alpha = 0.25; // in (0,1)
};

struct FocalResult {
    double loss = 0.0;
    double dloss_dlogit = 0.0;
};

struct OptimizerConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.01;
};

struct OptimizerState {
    std::vector<double> m = std::vector<double>(kFeatureDim + 1, 0.0); // bias last
    std::vector<double> v = std::vector<double>(kFeatureDim + 1, 0.0);
    std::int64_t step = 0;
};

struct TrainConfig {
    int epochs = 30;
    OptimizerConfig opt;
    FocalLossConfig focal;
    bool augment = false;
    double sigma_alpha = 0.05;
    double sigma_beta = 0.05;
    StainMatrix matrix = StainMatrix::default_he();
};

struct TrainLogEntry {
    int epoch = 0; // 1-based; entry 0 is the untrained baseline
    double mean_loss = 0.0;
    double val_score = 0.0; // balanced accuracy at threshold 0.5
};

struct TrainResult {
    ModelParams params;
    std::vector<TrainLogEntry> log;
    int best_epoch = 0;
    double best_val = 0.0;
};

FeatureVector extract_features(const Patch& p, const StainMatrix& m);

// sigmoid(w.f + b), clamped into the open interval (0,1).
double predict_proba(const ModelParams& params, const FeatureVector& f);

// p is clamped to [1e-12, 1-1e-12]; gradient is with respect to the logit.
FocalResult focal_loss(double p, Label y, const FocalLossConfig& cfg);

// Decoupled-weight-decay adaptive step; grads laid out like OptimizerState
// (weights then bias). Non-finite gradients abort.
void optimizer_step(ModelParams& params, const std::vector<double>& grads,
                    const OptimizerConfig& cfg, OptimizerState& state);

// Everything train_fold needs per sample. The channel summaries let a stain
// perturbation be applied to the features in O(1) + a few binary searches
// instead of re-rendering pixels: mean' = a*mean + b, std' = a*std, and the
// histogram re-bins through transformed bin edges over the sorted values.
// (Training perturbs concentrations directly, skipping the 8-bit re-quantize
// the full augment() round trip would add.)
struct SampleData {
    Label label = Label::NMF;
    FeatureVector base{};
    std::array<double, 3> mean{};
    std::array<double, 3> stdev{};
    std::array<std::vector<double>, 3> sorted; // per-channel concentrations
};

using DataCache = std::unordered_map<std::string, SampleData>;

DataCache load_data(const Manifest& m, const std::vector<std::string>& ids, const StainMatrix& sm,
                    const std::string& image_base = "");

FeatureVector perturbed_features(const SampleData& s, const Perturbation& d);

// Cumulative-weight inversion sampler; the training loop draws one sample
// per step from this.
class WeightedPicker {
public:
    explicit WeightedPicker(const SampleWeightTable& table);
    const std::string& pick(Rng& rng) const;

private:
    std::vector<std::string> ids_;
    std::vector<double> cum_;
    double total_ = 0.0;
};

// Weighted-draw single-sample steps (one epoch = train-set-size draws),
// optional per-draw stain perturbation, focal loss, AdamW. Returns the
// parameters from the epoch with the best validation balanced accuracy at
// threshold 0.5 (the untrained start counts as epoch 0).
TrainResult train_fold(const Manifest& m, const SplitPlan& plan, int fold, const TrainConfig& cfg,
                       std::uint64_t seed, const DataCache& cache);

// Convenience overload that loads patches itself.
TrainResult train_fold(const Manifest& m, const SplitPlan& plan, int fold, const TrainConfig& cfg,
                       std::uint64_t seed, const std::string& image_base = "");

void write_params(const std::string& path, const ModelParams& params);
ModelParams read_params(const std::string& path);

} // namespace mitotk
