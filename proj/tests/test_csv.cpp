#include "doctest.h"

#include <string>

#include "mitotk/csv.hpp"
#include "mitotk/error.hpp"

#include "testutil.hpp"

using namespace mitotk;

TEST_SUITE("csv") {

    TEST_CASE("parse and serialize round trip") {
        CsvTable t = parse_csv("a,b,c\n1,2,3\n4,5,6\n");
        CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
        REQUIRE(t.rows.size() == 2);
        CHECK(t.rows[1][2] == "6");
        CHECK(csv_to_string(t) == "a,b,c\n1,2,3\n4,5,6\n");
    }

    TEST_CASE("cells are trimmed, blank lines skipped") {
        CsvTable t = parse_csv("a , b\r\n\n 1\t,2 \n\n");
        CHECK(t.header == std::vector<std::string>{"a", "b"});
        REQUIRE(t.rows.size() == 1);
        CHECK(t.rows[0][0] == "1");
        CHECK(t.rows[0][1] == "2");
    }

    TEST_CASE("ragged row names the line") {
        try {
            parse_csv("a,b\n1,2,3\n", "input.csv");
            FAIL("expected Error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("input.csv:2") != std::string::npos);
        }
    }

    TEST_CASE("missing column throws") {
        CsvTable t = parse_csv("a,b\n1,2\n");
        CHECK(t.col("b") == 1);
        CHECK_THROWS_AS(t.col("score"), Error);
    }

    TEST_CASE("empty input throws") {
        CHECK_THROWS_AS(parse_csv(""), Error);
        CHECK_THROWS_AS(parse_csv("\n  \n"), Error);
    }

    TEST_CASE("file round trip") {
        TempDir tmp("csv");
        CsvTable t = parse_csv("x,y\n7,8\n");
        write_csv(tmp.file("t.csv"), t);
        CsvTable back = read_csv(tmp.file("t.csv"));
        CHECK(back.header == t.header);
        CHECK(back.rows == t.rows);
        CHECK_THROWS_AS(read_csv(tmp.file("absent.csv")), Error);
    }
}
