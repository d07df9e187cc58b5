#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mitotk/error.hpp"
#include "mitotk/evaluation.hpp"
#include "mitotk/rng.hpp"

#include "oracles.hpp"
#include "testutil.hpp"

using namespace mitotk;

TEST_SUITE("evaluation") {

    TEST_CASE("score tables validate range and uniqueness") {
        ScoreTable t;
        t.rows = {{"a", "m1", 0.5}, {"a", "m2", 1.0}, {"b", "m1", 0.0}};
        validate_scores(t);
        t.rows.push_back({"a", "m1", 0.3});
        CHECK_THROWS_AS(validate_scores(t), Error);
        t.rows = {{"a", "m1", 1.5}};
        CHECK_THROWS_AS(validate_scores(t), Error);
        t.rows = {{"a", "m1", -0.1}};
        CHECK_THROWS_AS(validate_scores(t), Error);
    }

    TEST_CASE("score file round trip preserves doubles") {
        TempDir tmp("eval");
        ScoreTable t;
        Rng rng(2);
        for (int i = 0; i < 50; ++i)
            t.rows.push_back({"s" + std::to_string(i), "m", rng.uniform01()});
        write_scores(tmp.file("s.csv"), t);
        ScoreTable back = read_scores(tmp.file("s.csv"));
        REQUIRE(back.rows.size() == t.rows.size());
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            CHECK(back.rows[i].score == t.rows[i].score);

        write_text(tmp.file("bad.csv"), "sample_id,model_id,score\na,m,0.5x\n");
        CHECK_THROWS_AS(read_scores(tmp.file("bad.csv")), Error);
        write_text(tmp.file("bad2.csv"), "sample_id,model_id,score\na,m,\n");
        CHECK_THROWS_AS(read_scores(tmp.file("bad2.csv")), Error);
    }

    TEST_CASE("ensemble averages per sample in model order") {
        ScoreTable t;
        t.rows = {{"a", "m2", 0.4}, {"b", "m1", 0.1}, {"a", "m1", 0.8}, {"b", "m2", 0.3}};
        ScoreTable e = ensemble_mean(t, 2);
        REQUIRE(e.rows.size() == 2);
        CHECK(e.rows[0].sample_id == "a"); // first appearance
        CHECK(e.rows[0].model_id == "ensemble");
        CHECK(e.rows[0].score == doctest::Approx(0.6));
        CHECK(e.rows[1].score == doctest::Approx(0.2));

        // row order must not matter, bit for bit
        std::reverse(t.rows.begin(), t.rows.end());
        ScoreTable e2 = ensemble_mean(t, 2);
        CHECK(e2.rows[1].sample_id == "a");
        double a1 = e.rows[0].score;
        double a2 = e2.rows[1].score;
        CHECK(a1 == a2);
    }

    TEST_CASE("ensemble enforces the expected model count") {
        ScoreTable t;
        t.rows = {{"a", "m1", 0.5}, {"a", "m2", 0.7}, {"b", "m1", 0.2}};
        CHECK_THROWS_AS(ensemble_mean(t, 2), Error);
        ScoreTable e = ensemble_mean(t, 2, true);
        REQUIRE(e.rows.size() == 2);
        CHECK(e.rows[1].score == doctest::Approx(0.2));
        CHECK_THROWS_AS(ensemble_mean(t, 0), Error);
    }

    TEST_CASE("otsu hand case: two point masses pick the middle boundary") {
        std::vector<double> scores;
        for (int i = 0; i < 5; ++i)
            scores.push_back(0.15); // bin 1 of 10
        for (int i = 0; i < 5; ++i)
            scores.push_back(0.95); // bin 9 of 10
        OtsuResult r = otsu_threshold(scores, 10);
        CHECK(!r.degenerate);
        // boundaries 2..9 tie; the middle maximizer is 5
        CHECK(r.threshold == 0.5);
    }

    TEST_CASE("otsu flags a single occupied bin") {
        std::vector<double> scores(20, 0.34);
        OtsuResult r = otsu_threshold(scores, 10);
        CHECK(r.degenerate);
        CHECK(r.threshold == doctest::Approx(0.4));
    }

    TEST_CASE("otsu input validation") {
        CHECK_THROWS_AS(otsu_threshold({0.5}, 10), Error);
        CHECK_THROWS_AS(otsu_threshold({0.5, 1.5}, 10), Error);
        CHECK_THROWS_AS(otsu_threshold({0.5, 0.6}, 1), Error);
    }

    TEST_CASE("otsu agrees with the exhaustive scan") {
        Rng rng(31);
        for (int trial = 0; trial < 100; ++trial) {
            int n = 2 + static_cast<int>(rng.bounded(99));
            int bins = trial % 3 == 0 ? 16 : 256;
            std::vector<double> scores;
            double mass = rng.uniform01();
            for (int i = 0; i < n; ++i) {
                if (rng.uniform01() < 0.3)
                    scores.push_back(mass);
                else
                    scores.push_back(rng.uniform01());
            }
            OtsuResult got = otsu_threshold(scores, bins);
            oracle::OtsuRef want = oracle::otsu(scores, bins);
            CHECK(got.threshold == want.threshold);
            CHECK(got.degenerate == want.degenerate);
        }
    }

    TEST_CASE("confusion counts score >= threshold as AMF") {
        std::vector<Label> labels{Label::AMF, Label::AMF, Label::NMF, Label::NMF};
        std::vector<double> scores{0.9, 0.5, 0.5, 0.1};
        ConfusionMatrix cm = confusion(labels, scores, 0.5);
        CHECK(cm.tp == 2);
        CHECK(cm.fn == 0);
        CHECK(cm.fp == 1);
        CHECK(cm.tn == 1);
        CHECK_THROWS_AS(confusion(labels, {0.5}, 0.5), Error);
    }

    TEST_CASE("summary metrics and their undefined flags") {
        SummaryMetrics s = summary_metrics({8, 2, 15, 5});
        CHECK(s.sensitivity == doctest::Approx(0.8));
        CHECK(s.specificity == doctest::Approx(0.75));
        CHECK(s.balanced_accuracy == (s.sensitivity + s.specificity) / 2.0);
        CHECK(s.accuracy == doctest::Approx(23.0 / 30.0));
        CHECK(s.sensitivity_defined);
        CHECK(s.specificity_defined);

        SummaryMetrics nopos = summary_metrics({0, 0, 9, 1});
        CHECK(!nopos.sensitivity_defined);
        CHECK(std::isnan(nopos.sensitivity));
        CHECK(std::isnan(nopos.balanced_accuracy));
        CHECK(nopos.specificity_defined);
    }

    TEST_CASE("roc endpoints and known aucs") {
        std::vector<Label> labels{Label::NMF, Label::NMF, Label::AMF, Label::AMF};
        std::vector<double> perfect{0.1, 0.2, 0.8, 0.9};
        RocResult r = roc_curve_auc(labels, perfect);
        CHECK(r.auc == doctest::Approx(1.0));
        REQUIRE(!r.points.empty());
        CHECK(r.points.front().fpr == 0.0);
        CHECK(r.points.front().tpr == 0.0);
        CHECK(r.points.front().threshold == doctest::Approx(1.9));
        CHECK(r.points.back().fpr == 1.0);
        CHECK(r.points.back().tpr == 1.0);

        std::vector<double> tied(4, 0.5);
        RocResult t = roc_curve_auc(labels, tied);
        CHECK(t.auc == doctest::Approx(0.5));
        REQUIRE(t.points.size() == 2);
        CHECK(t.points[1].fpr == 1.0);
        CHECK(t.points[1].tpr == 1.0);

        std::vector<double> reversed{0.9, 0.8, 0.2, 0.1};
        CHECK(roc_curve_auc(labels, reversed).auc == doctest::Approx(0.0));

        CHECK_THROWS_AS(roc_curve_auc({Label::AMF, Label::AMF}, {0.1, 0.2}), Error);
    }

    TEST_CASE("roc auc agrees with the pairwise oracle") {
        Rng rng(77);
        for (int trial = 0; trial < 100; ++trial) {
            int n = 2 + static_cast<int>(rng.bounded(60));
            std::vector<Label> labels;
            std::vector<double> scores;
            int quant = 1 + static_cast<int>(rng.bounded(8));
            for (int i = 0; i < n; ++i) {
                labels.push_back(rng.uniform01() < 0.4 ? Label::AMF : Label::NMF);
                scores.push_back(std::floor(rng.uniform01() * quant) / quant);
            }
            labels[0] = Label::AMF;
            labels[n - 1] = Label::NMF;
            double got = roc_curve_auc(labels, scores).auc;
            double want = oracle::auc(labels, scores);
            CHECK(std::fabs(got - want) <= 1e-9);
        }
    }

    TEST_CASE("evaluate_scores groups by type plus overall") {
        Manifest m;
        m.records = {
            {"a1", "lung", Label::AMF, "", ""}, {"a2", "lung", Label::NMF, "", ""},
            {"a3", "lung", Label::NMF, "", ""}, {"b1", "skin", Label::AMF, "", ""},
            {"b2", "skin", Label::NMF, "", ""},
        };
        ScoreTable scores;
        scores.rows = {{"a1", "ensemble", 0.9},
                       {"a2", "ensemble", 0.2},
                       {"a3", "ensemble", 0.3},
                       {"b1", "ensemble", 0.7},
                       {"b2", "ensemble", 0.4}};
        EvalReport rep = evaluate_scores(m, scores, true, 16);
        REQUIRE(rep.groups.size() == 3);
        CHECK(rep.groups[0].group == "lung");
        CHECK(rep.groups[1].group == "skin");
        CHECK(rep.groups[2].group == "overall");
        CHECK(rep.groups[2].n == 5);
        CHECK(rep.groups[0].auc_defined);
        CHECK(rep.groups[0].roc_auc == doctest::Approx(1.0));

        EvalReport flat = evaluate_scores(m, scores, false, 16);
        REQUIRE(flat.groups.size() == 1);
        CHECK(flat.groups[0].group == "overall");

        ScoreTable unknown;
        unknown.rows = {{"zz", "ensemble", 0.5}};
        CHECK_THROWS_AS(evaluate_scores(m, unknown, true, 16), Error);
    }

    TEST_CASE("single-class groups are flagged, not fatal") {
        Manifest m;
        m.records = {{"a1", "lung", Label::NMF, "", ""},
                     {"a2", "lung", Label::NMF, "", ""},
                     {"b1", "skin", Label::AMF, "", ""},
                     {"b2", "skin", Label::NMF, "", ""}};
        ScoreTable scores;
        scores.rows = {{"a1", "ensemble", 0.2},
                       {"a2", "ensemble", 0.4},
                       {"b1", "ensemble", 0.8},
                       {"b2", "ensemble", 0.1}};
        EvalReport rep = evaluate_scores(m, scores, true, 16);
        const GroupEval& lung = rep.groups[0];
        CHECK(!lung.auc_defined);
        CHECK(!lung.metrics.sensitivity_defined);
        CHECK(lung.metrics.specificity_defined);
    }
}
