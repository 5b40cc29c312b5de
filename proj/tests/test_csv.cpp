#include <doctest.h>

#include <sstream>

#include "hsiband/csv.hpp"
#include "hsiband/error.hpp"
#include "test_util.hpp"

using namespace hsiband;

TEST_CASE("split_line trims fields and keeps empties") {
    auto f = split_line("a, b ,c");
    REQUIRE(f.size() == 3);
    CHECK(f[0] == "a");
    CHECK(f[1] == "b");
    CHECK(f[2] == "c");

    auto g = split_line("x,,z,");
    REQUIRE(g.size() == 4);
    CHECK(g[1] == "");
    CHECK(g[3] == "");
}

TEST_CASE("read_rows skips blank lines and tolerates CRLF") {
    std::istringstream in("a,b\r\n\n1,2\n   \n3,4\n");
    auto rows = read_rows(in);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "a");
    CHECK(rows[2][1] == "4");
}

TEST_CASE("format_double keeps short decimals short") {
    CHECK(format_double(0.3) == "0.3");
    CHECK(format_double(17.07) == "17.07");
    CHECK(format_double(1e6) == "1000000");
    CHECK(format_double(0.0) == "0");
}

TEST_CASE("join is the inverse of split for plain fields") {
    std::vector<std::string> fields{"pair", "1.5", "x"};
    CHECK(split_line(join(fields)) == fields);
}

TEST_CASE("read_numeric_matrix handles header row and header column") {
    testutil::TempDir tmp("csv_matrix");
    auto p = tmp.file("m.csv");
    testutil::write_text(p, "name,c0,c1\nrow0,1,2\nrow1,3,4\n");
    auto m = read_numeric_matrix(p);
    REQUIRE(m.size() == 2);
    REQUIRE(m[0].size() == 2);
    CHECK(m[0][0] == 1.0);
    CHECK(m[1][1] == 4.0);
}

TEST_CASE("read_numeric_matrix accepts bare numbers") {
    testutil::TempDir tmp("csv_bare");
    auto p = tmp.file("m.csv");
    testutil::write_text(p, "1,2,3\n4,5,6\n");
    auto m = read_numeric_matrix(p);
    REQUIRE(m.size() == 2);
    CHECK(m[1][2] == 6.0);
}

TEST_CASE("read_numeric_matrix rejects ragged and non-numeric input") {
    testutil::TempDir tmp("csv_bad");
    auto ragged = tmp.file("r.csv");
    testutil::write_text(ragged, "1,2,3\n4,5\n");
    CHECK_THROWS_AS(read_numeric_matrix(ragged), ValidationError);

    auto nonnum = tmp.file("n.csv");
    testutil::write_text(nonnum, "1,2\n3,oops\n");
    CHECK_THROWS_AS(read_numeric_matrix(nonnum), ValidationError);

    CHECK_THROWS_AS(read_numeric_matrix(tmp.file("missing.csv")), ValidationError);
}
