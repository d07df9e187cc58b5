#include "doctest.h"

#include <filesystem>
#include <set>

#include "mitotk/error.hpp"
#include "mitotk/pipeline.hpp"
#include "mitotk/synth.hpp"

#include "testutil.hpp"

using namespace mitotk;

namespace {

std::string make_dataset(const TempDir& tmp, int n) {
    SynthConfig cfg;
    cfg.n = n;
    cfg.types = 3;
    cfg.patch = 16;
    cfg.amf_fraction = 0.25;
    cfg.seed = 21;
    synth_dataset(cfg, (tmp.path / "ds").string());
    return (tmp.path / "ds" / "manifest.csv").string();
}

PipelineConfig base_config(const std::string& manifest, const std::string& out) {
    PipelineConfig cfg;
    cfg.manifest_path = manifest;
    cfg.out_dir = out;
    cfg.k = 3;
    cfg.seed = 5;
    cfg.train.epochs = 2;
    return cfg;
}

} // namespace

TEST_SUITE("pipeline") {

    TEST_CASE("holdout mode evaluates only the held-out type") {
        TempDir tmp("pipeline");
        std::string manifest = make_dataset(tmp, 36);
        PipelineConfig cfg = base_config(manifest, (tmp.path / "run").string());
        cfg.holdout = "type1";
        PipelineResult r = run_pipeline(cfg);

        REQUIRE(r.eval.groups.size() == 2);
        CHECK(r.eval.groups[0].group == "type1");
        CHECK(r.eval.groups[1].group == "overall");
        CHECK(r.eval.groups[0].n == 12);

        for (const char* name :
             {"plan.csv", "params_fold0.json", "params_fold1.json", "params_fold2.json",
              "scores.csv", "ensemble.csv", "stats.csv", "metrics.csv", "metrics.json",
              "roc_points.csv", "roc.svg", "confusion.csv", "run.json"})
            CHECK(std::filesystem::exists(tmp.path / "run" / name));

        // every fold model scores every held-out sample
        ScoreTable scores = read_scores((tmp.path / "run" / "scores.csv").string());
        CHECK(scores.rows.size() == 3 * 12);
        std::set<std::string> models;
        for (const auto& row : scores.rows)
            models.insert(row.model_id);
        CHECK(models == std::set<std::string>{"type1:fold0", "type1:fold1", "type1:fold2"});

        ScoreTable ens = read_scores((tmp.path / "run" / "ensemble.csv").string());
        CHECK(ens.rows.size() == 12);
        for (const auto& row : ens.rows)
            CHECK(row.model_id == "ensemble");
    }

    TEST_CASE("all-data mode scores each sample once, out of fold") {
        TempDir tmp("pipeline");
        std::string manifest = make_dataset(tmp, 36);
        PipelineConfig cfg = base_config(manifest, (tmp.path / "run").string());
        cfg.all_data = true;
        PipelineResult r = run_pipeline(cfg);

        REQUIRE(r.eval.groups.size() == 4);
        CHECK(r.eval.groups[3].group == "overall");
        CHECK(r.eval.groups[3].n == 36);

        ScoreTable scores = read_scores((tmp.path / "run" / "scores.csv").string());
        CHECK(scores.rows.size() == 36);
        std::set<std::string> ids;
        for (const auto& row : scores.rows)
            CHECK(ids.insert(row.sample_id).second);
    }

    TEST_CASE("reruns are byte-identical across output directories") {
        TempDir tmp("pipeline");
        std::string manifest = make_dataset(tmp, 36);
        PipelineConfig cfg = base_config(manifest, (tmp.path / "r1").string());
        cfg.holdout = "type0";
        cfg.train.augment = true;
        run_pipeline(cfg);
        cfg.out_dir = (tmp.path / "r2").string();
        run_pipeline(cfg);
        for (const char* name : {"run.json", "scores.csv", "ensemble.csv", "roc.svg"})
            CHECK(read_text((tmp.path / "r1" / name).string()) ==
                  read_text((tmp.path / "r2" / name).string()));
    }

    TEST_CASE("mode flags must be exclusive and present") {
        TempDir tmp("pipeline");
        std::string manifest = make_dataset(tmp, 24);
        PipelineConfig cfg = base_config(manifest, (tmp.path / "run").string());
        CHECK_THROWS_AS(run_pipeline(cfg), Error); // neither
        cfg.holdout = "type0";
        cfg.all_data = true;
        CHECK_THROWS_AS(run_pipeline(cfg), Error); // both
        cfg.all_data = false;
        cfg.holdout = "absent_type";
        CHECK_THROWS_AS(run_pipeline(cfg), Error);
    }
}
