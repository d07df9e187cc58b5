#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mitotk/evaluation.hpp"
#include "mitotk/trainer.hpp"

namespace mitotk {

// split -> k x train -> predict -> ensemble -> threshold -> evaluate ->
// report, in one output directory. Holdout mode trains on the other types
// and ensembles all k fold models over the held-out samples; all-data mode
// scores each sample once, out of fold.
struct PipelineConfig {
    std::string manifest_path;
    std::string out_dir;
    std::string holdout; // empty with all_data
    bool all_data = false;
    int k = 5;
    std::uint64_t seed = 0;
    TrainConfig train;
    int bins = 256;
    bool stamp = false; // add a wall-clock timestamp to run.json
};

struct PipelineResult {
    EvalReport eval;
    std::vector<std::string> artifacts;
};

PipelineResult run_pipeline(const PipelineConfig& cfg);

} // namespace mitotk
