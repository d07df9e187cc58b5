#include "doctest.h"

#include <cmath>
#include <string>

#include "mitotk/error.hpp"
#include "mitotk/numfmt.hpp"

using namespace mitotk;

TEST_SUITE("numfmt") {

    TEST_CASE("format_full round trips") {
        for (double x : {0.0, 0.1, 1.0 / 3.0, -5.25, 1e-300, 12345.6789, 0.7824999999999999}) {
            CHECK(std::stod(format_full(x)) == x);
        }
        CHECK(format_full(0.5) == "0.5");
        CHECK(format_full(1.0) == "1");
    }

    TEST_CASE("format_fixed rounds half away from zero on exact digits") {
        CHECK(format_fixed(2.5, 0) == "3");
        CHECK(format_fixed(-2.5, 0) == "-3");
        CHECK(format_fixed(0.125, 2) == "0.13");   // 0.125 is exact in binary
        CHECK(format_fixed(-0.125, 2) == "-0.13");
        CHECK(format_fixed(1.005, 2) == "1.00");   // stored as 1.00499999...
        CHECK(format_fixed(0.8585, 3) == "0.859"); // stored as 0.85850000...04
        CHECK(format_fixed(0.9445, 3) == "0.945"); // stored as 0.944500000...006
        CHECK(format_fixed(0.0, 3) == "0.000");
        CHECK(format_fixed(7.0, 0) == "7");
    }

    TEST_CASE("format_fixed carries through nines") {
        CHECK(format_fixed(0.99951, 3) == "1.000");
        CHECK(format_fixed(9.9999, 3) == "10.000");
        CHECK(format_fixed(-0.9996, 3) == "-1.000");
    }

    TEST_CASE("format_fixed never prints negative zero") {
        CHECK(format_fixed(-0.0001, 2) == "0.00");
        CHECK(format_fixed(-0.0, 1) == "0.0");
    }

    TEST_CASE("format_fixed rejects bad input") {
        CHECK_THROWS_AS(format_fixed(1.0, -1), Error);
        CHECK_THROWS_AS(format_fixed(1.0, 21), Error);
        CHECK_THROWS_AS(format_fixed(std::nan(""), 2), Error);
        CHECK_THROWS_AS(format_fixed(HUGE_VAL, 2), Error);
    }

    TEST_CASE("format_pct1") {
        CHECK(format_pct1(0.156) == "15.6");
        CHECK(format_pct1(2176.0 / 13938.0) == "15.6");
        CHECK(format_pct1(0.08) == "8.0");
        CHECK(format_pct1(1.0) == "100.0");
    }

    TEST_CASE("format_ba_cell matches the printed-rate average") {
        CHECK(format_ba_cell(1.000, 0.781) == "0.891");
        CHECK(format_ba_cell(0.724, 0.841) == "0.783");
        CHECK(format_ba_cell(0.972, 0.854) == "0.913");
        CHECK(format_ba_cell(1.000, 0.889) == "0.944");
        CHECK(format_ba_cell(0.873, 0.844) == "0.859");
        // unrounded inputs go through their printed 3-decimal form first
        CHECK(format_ba_cell(0.7239, 0.8412) == "0.783");
    }
}
