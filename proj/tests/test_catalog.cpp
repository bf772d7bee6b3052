#include "helpers.hpp"

#include <sstream>

#include "craterid/catalog.hpp"

using namespace craterid;

namespace {

CatalogLoad parse(const std::string& s) {
    std::istringstream in(s);
    return parse_catalog(in);
}

}  // namespace

TEST_CASE("native rows") {
    auto c = parse(std::string(kCatalogHeader) + "\nC1, 10.0, 20.0, 5.0, 4.0, 30.0, 0.95\n");
    REQUIRE(c.records.size() == 1);
    CHECK(c.errors.empty());
    const auto& r = c.records[0];
    CHECK(r.id == "C1");
    CHECK(r.lat == doctest::Approx(10 * M_PI / 180));
    CHECK(r.lon == doctest::Approx(20 * M_PI / 180));
    CHECK(r.a == 5.0);
    CHECK(r.b == 4.0);
    CHECK(r.psi == doctest::Approx(30 * M_PI / 180));
    CHECK(r.arc_fraction == 0.95);

    // header is optional; comments and blanks skipped
    c = parse("# comment\n\nC2,0,0,3,3,0,1\n");
    CHECK(c.records.size() == 1);
    CHECK(parse("").records.empty());
    CHECK(parse("").errors.empty());
}

TEST_CASE("row errors are collected with line numbers") {
    auto c = parse(std::string(kCatalogHeader) +
                   "\nA,0,0,4,5,0,1\nB,0,0,x,1,0,1\nC,0,0,1\nD,1,1,2,1,0,1\nE,89.999,0,2,1,0,1\n");
    REQUIRE(c.records.size() == 1);
    CHECK(c.records[0].id == "D");
    REQUIRE(c.errors.size() == 4);
    CHECK(c.errors[0].line == 2);
    CHECK(c.errors[0].code == ErrorCode::invalid_axes);
    CHECK(c.errors[1].line == 3);
    CHECK(c.errors[1].code == ErrorCode::schema_error);
    CHECK(c.errors[2].code == ErrorCode::schema_error);
    CHECK(c.errors[3].code == ErrorCode::polar_singularity);
    CHECK_THROWS_AS(parse("id,lat,lon\n"), Error);
    try {
        load_catalog("/nonexistent/catalog.csv");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::io_error);
    }
}

TEST_CASE("Robbins schema") {
    const std::string h =
        "CRATER_ID,LAT_CIRC_IMG,LON_CIRC_IMG,DIAM_CIRC_IMG,LAT_ELLI_IMG,LON_ELLI_IMG,DIAM_ELLI_MAJOR_IMG,"
        "DIAM_ELLI_MINOR_IMG,DIAM_ELLI_ANGLE_IMG,ARC_IMG\n";
    auto c = parse(h + "00-1-000001,10,20,12,10.1,20.2,14,10,45,0.95\n00-1-000002,5,6,8,,,,,,0.8\n00-1-3,1,2,,,,,,,0.9\n");
    REQUIRE(c.records.size() == 2);
    CHECK(c.records[0].id == "00-1-000001");
    CHECK(c.records[0].lat == doctest::Approx(10.1 * M_PI / 180));
    CHECK(c.records[0].a == 7.0);
    CHECK(c.records[0].b == 5.0);
    CHECK(c.records[0].psi == doctest::Approx(M_PI / 4));
    // circle fit fallback
    CHECK(c.records[1].a == 4.0);
    CHECK(c.records[1].b == 4.0);
    CHECK(c.records[1].arc_fraction == 0.8);
    REQUIRE(c.errors.size() == 1);
    CHECK(c.errors[0].line == 4);
}

TEST_CASE("write and read back") {
    Rng r(3);
    std::vector<CraterRecord> v;
    for (int i = 0; i < 500; ++i) {
        CraterRecord c;
        c.id = "X" + std::to_string(i);
        c.lat = r.uniform(-1.5, 1.5);
        c.lon = r.uniform(-M_PI, M_PI);
        c.a = r.uniform(1, 100);
        c.b = c.a * r.uniform(0.5, 1);
        c.psi = r.uniform(0, M_PI);
        c.arc_fraction = r.uniform(0.5, 1);
        v.push_back(c);
    }
    std::stringstream ss;
    write_catalog(ss, v);
    const auto back = parse_catalog(ss);
    REQUIRE(back.errors.empty());
    REQUIRE(back.records.size() == v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        REQUIRE(back.records[i].id == v[i].id);
        REQUIRE(back.records[i].lat == doctest::Approx(v[i].lat).epsilon(1e-14));
        REQUIRE(back.records[i].lon == doctest::Approx(v[i].lon).epsilon(1e-14));
        REQUIRE(back.records[i].a == v[i].a);
        REQUIRE(back.records[i].b == v[i].b);
        REQUIRE(back.records[i].psi == doctest::Approx(v[i].psi).epsilon(1e-14));
        REQUIRE(back.records[i].arc_fraction == v[i].arc_fraction);
    }
}

TEST_CASE("csv helpers") {
    CHECK(split_csv_line("a, b,,c,") == std::vector<std::string>{"a", "b", "", "c", ""});
    CHECK(trim("  x y \t") == "x y");
}
