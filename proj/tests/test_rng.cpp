#include "doctest.h"

#include <algorithm>
#include <set>
#include <vector>

#include "mitotk/rng.hpp"

using namespace mitotk;

TEST_SUITE("rng") {

    TEST_CASE("same seed yields the same stream") {
        Rng a(42), b(42);
        for (int i = 0; i < 100; ++i)
            CHECK(a.next_u64() == b.next_u64());
    }

    TEST_CASE("different seeds diverge") {
        Rng a(1), b(2);
        bool differ = false;
        for (int i = 0; i < 10; ++i)
            differ |= a.next_u64() != b.next_u64();
        CHECK(differ);
    }

    TEST_CASE("uniform01 stays in [0,1)") {
        Rng r(7);
        for (int i = 0; i < 20000; ++i) {
            double x = r.uniform01();
            CHECK(x >= 0.0);
            CHECK(x < 1.0);
        }
    }

    TEST_CASE("uniform respects bounds") {
        Rng r(3);
        for (int i = 0; i < 5000; ++i) {
            double x = r.uniform(0.95, 1.05);
            CHECK(x >= 0.95);
            CHECK(x < 1.05);
        }
        CHECK(r.uniform(2.0, 2.0) == 2.0);
        for (int i = 0; i < 5000; ++i) {
            double x = r.uniform(-0.3, 0.3);
            CHECK(x >= -0.3);
            CHECK(x < 0.3);
        }
    }

    TEST_CASE("bounded covers [0,n)") {
        Rng r(11);
        std::set<std::uint64_t> seen;
        for (int i = 0; i < 1000; ++i) {
            std::uint64_t v = r.bounded(7);
            CHECK(v < 7);
            seen.insert(v);
        }
        CHECK(seen.size() == 7);
    }

    TEST_CASE("shuffle permutes in place") {
        std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
        std::vector<int> orig = v;
        Rng r(5);
        r.shuffle(v);
        std::vector<int> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == orig);
        CHECK(v != orig); // 1/10! odds of a false failure

        std::vector<int> w = orig;
        Rng r2(5);
        r2.shuffle(w);
        CHECK(w == v);
    }

    TEST_CASE("derive_seed separates stages") {
        CHECK(derive_seed(1, "split") != derive_seed(1, "train-pick"));
        CHECK(derive_seed(1, "split") != derive_seed(2, "split"));
        CHECK(derive_seed(1, "split", 1) != derive_seed(1, "split", 2));
        CHECK(derive_seed(1, "split", 0, 1) != derive_seed(1, "split", 1, 0));
        CHECK(derive_seed(9, "aug", 3, 4) == derive_seed(9, "aug", 3, 4));
    }
}
