#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "mitotk/error.hpp"
#include "mitotk/splits.hpp"

#include "testutil.hpp"

using namespace mitotk;

namespace {

Manifest grid_manifest(const std::vector<std::pair<std::string, std::pair<int, int>>>& spec) {
    // spec: type -> (amf count, nmf count)
    Manifest m;
    int n = 0;
    for (const auto& [type, counts] : spec) {
        for (int i = 0; i < counts.first; ++i)
            m.records.push_back({"s" + std::to_string(n++), type, Label::AMF, "", ""});
        for (int i = 0; i < counts.second; ++i)
            m.records.push_back({"s" + std::to_string(n++), type, Label::NMF, "", ""});
    }
    return m;
}

std::map<std::string, const SampleRecord*> index_by_id(const Manifest& m) {
    std::map<std::string, const SampleRecord*> idx;
    for (const auto& r : m.records)
        idx[r.sample_id] = &r;
    return idx;
}

} // namespace

TEST_SUITE("splits") {

    TEST_CASE("loocv: one plan per type, holdout excluded, strata balanced") {
        Manifest m = grid_manifest({{"a", {7, 23}}, {"b", {4, 11}}, {"c", {9, 30}}});
        auto idx = index_by_id(m);
        std::vector<SplitPlan> plans = make_loocv_plans(m, 5, 42);
        REQUIRE(plans.size() == 3);

        for (const auto& plan : plans) {
            CHECK(plan.k == 5);
            std::set<std::string> assigned;
            std::map<std::pair<std::string, Label>, std::map<int, int>> strata;
            for (const auto& [id, fold] : plan.assignments) {
                CHECK(fold >= 0);
                CHECK(fold < 5);
                CHECK(assigned.insert(id).second);
                const SampleRecord& rec = *idx.at(id);
                CHECK(rec.cancer_type != plan.holdout_type);
                ++strata[{rec.cancer_type, rec.label}][fold];
            }
            std::size_t expect = 0;
            for (const auto& r : m.records)
                if (r.cancer_type != plan.holdout_type)
                    ++expect;
            CHECK(assigned.size() == expect);
            for (const auto& [key, folds] : strata) {
                int lo = 1 << 30, hi = 0, total = 0;
                for (int f = 0; f < 5; ++f) {
                    int c = folds.count(f) ? folds.at(f) : 0;
                    lo = std::min(lo, c);
                    hi = std::max(hi, c);
                    total += c;
                }
                CHECK(hi - lo <= 1);
                CHECK(total >= 4); // every stratum above has >= k samples
            }
        }
        CHECK(plans[0].holdout_type == "a");
        CHECK(plans[1].holdout_type == "b");
        CHECK(plans[2].holdout_type == "c");
    }

    TEST_CASE("plans are deterministic in the seed") {
        Manifest m = grid_manifest({{"a", {10, 30}}, {"b", {10, 30}}});
        auto p1 = make_loocv_plans(m, 5, 7);
        auto p2 = make_loocv_plans(m, 5, 7);
        auto p3 = make_loocv_plans(m, 5, 8);
        REQUIRE(p1.size() == 2);
        CHECK(p1[0].assignments == p2[0].assignments);
        CHECK(p1[1].assignments == p2[1].assignments);
        bool moved = false;
        for (std::size_t i = 0; i < p1[0].assignments.size(); ++i)
            moved |= p1[0].assignments[i].second != p3[0].assignments[i].second;
        CHECK(moved);
    }

    TEST_CASE("single holdout validates the type") {
        Manifest m = grid_manifest({{"a", {5, 15}}, {"b", {5, 15}}});
        SplitPlan plan = make_single_holdout_plan(m, "b", 4, 1);
        CHECK(plan.holdout_type == "b");
        CHECK(plan.assignments.size() == 20);
        CHECK_THROWS_AS(make_single_holdout_plan(m, "zebra", 4, 1), Error);
    }

    TEST_CASE("loocv needs at least two types") {
        Manifest m = grid_manifest({{"a", {5, 15}}});
        CHECK_THROWS_AS(make_loocv_plans(m, 5, 1), Error);
    }

    TEST_CASE("all-data plan assigns everything under the none sentinel") {
        Manifest m = grid_manifest({{"a", {5, 15}}, {"b", {5, 15}}});
        SplitPlan plan = make_all_data_plan(m, 5, 3);
        CHECK(plan.holdout_type == "none");
        CHECK(plan.assignments.size() == m.records.size());

        Manifest clash = grid_manifest({{"none", {2, 8}}});
        CHECK_THROWS_AS(make_all_data_plan(clash, 5, 3), Error);
    }

    TEST_CASE("small strata warn instead of failing") {
        Manifest m = grid_manifest({{"a", {2, 12}}, {"b", {6, 12}}});
        SplitPlan plan = make_single_holdout_plan(m, "b", 5, 1);
        CHECK(!plan.warnings.empty()); // 2 amf across 5 folds
    }

    TEST_CASE("fold_membership partitions the assignments") {
        Manifest m = grid_manifest({{"a", {6, 14}}, {"b", {5, 15}}});
        SplitPlan plan = make_all_data_plan(m, 4, 9);
        std::set<std::string> seen;
        std::size_t val_total = 0;
        for (int f = 0; f < 4; ++f) {
            auto [train, val] = fold_membership(plan, f);
            CHECK(train.size() + val.size() == m.records.size());
            val_total += val.size();
            for (const auto& id : val) {
                CHECK(seen.insert(id).second);
                CHECK(std::find(train.begin(), train.end(), id) == train.end());
            }
        }
        CHECK(val_total == m.records.size());
        CHECK_THROWS_AS(fold_membership(plan, 4), Error);
        CHECK_THROWS_AS(fold_membership(plan, -1), Error);
    }

    TEST_CASE("sampling weights are the opposite-class counts") {
        Manifest m = grid_manifest({{"a", {3, 9}}});
        std::vector<std::string> ids;
        for (const auto& r : m.records)
            ids.push_back(r.sample_id);
        SampleWeightTable t = sampling_weights(m, ids);
        REQUIRE(t.weights.size() == 12);
        double amf_sum = 0.0, nmf_sum = 0.0;
        auto idx = index_by_id(m);
        for (const auto& [id, w] : t.weights) {
            if (idx.at(id)->label == Label::AMF) {
                CHECK(w == 9.0);
                amf_sum += w;
            } else {
                CHECK(w == 3.0);
                nmf_sum += w;
            }
        }
        CHECK(amf_sum == nmf_sum); // both exactly 27
        CHECK(amf_sum == 27.0);
    }

    TEST_CASE("sampling weights require both classes") {
        Manifest m = grid_manifest({{"a", {0, 5}}});
        std::vector<std::string> ids{"s0", "s1", "s2", "s3", "s4"};
        CHECK_THROWS_AS(sampling_weights(m, ids), Error);
        CHECK_THROWS_AS(sampling_weights(m, {"missing"}), Error);
        CHECK_THROWS_AS(sampling_weights(m, {}), Error);
    }

    TEST_CASE("plan file round trip") {
        TempDir tmp("splits");
        Manifest m = grid_manifest({{"a", {4, 12}}, {"b", {4, 12}}});
        SplitPlan plan = make_single_holdout_plan(m, "a", 5, 6);
        write_plan(tmp.file("plan.csv"), plan);
        SplitPlan back = read_plan(tmp.file("plan.csv"));
        CHECK(back.holdout_type == "a");
        CHECK(back.k == 5);
        CHECK(back.assignments == plan.assignments);
    }
}
