#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mitotk/dataset.hpp"

namespace mitotk {

// Fold assignment for one leave-one-type-out configuration ("none" = all-data
// mode). assignments is kept in manifest order so serialization is stable.
struct SplitPlan {
    std::string holdout_type;
    int k = 5;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, int>> assignments; // sample_id -> fold
    std::vector<std::string> warnings;
};

struct SampleWeightTable {
    std::vector<std::pair<std::string, double>> weights; // train_ids order
};

// One plan per cancer type (order of first appearance), stratified by
// (cancer_type x label): per-stratum seeded shuffle, then round-robin folds.
std::vector<SplitPlan> make_loocv_plans(const Manifest& m, int k, std::uint64_t seed);

SplitPlan make_single_holdout_plan(const Manifest& m, const std::string& holdout_type, int k,
                                   std::uint64_t seed);

SplitPlan make_all_data_plan(const Manifest& m, int k, std::uint64_t seed);

// val = samples in `fold`, train = the rest; both in assignment order.
std::pair<std::vector<std::string>, std::vector<std::string>>
fold_membership(const SplitPlan& plan, int fold);

// Inverse-class-frequency weights scaled by (n_amf * n_nmf): each sample's
// weight is the count of the opposite class. The scale leaves the sampling
// distribution unchanged and makes the class weight-sum identity exact in
// floating point (both sums are the same integer-valued product).
SampleWeightTable sampling_weights(const Manifest& m, const std::vector<std::string>& train_ids);

// CSV: sample_id, holdout_type, fold.
void write_plan(const std::string& path, const SplitPlan& plan);
SplitPlan read_plan(const std::string& path); // k inferred, seed not stored

} // namespace mitotk
