#include <filesystem>

#include "doctest.h"
#include "loewner_lab/io.hpp"

using namespace llab;

TEST_CASE("SHA-1 test vectors") {
    CHECK(io::sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
    CHECK(io::sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
}

TEST_CASE("malformed JSON reports line and column") {
    try {
        io::parse_json("{\"a\": 1,\n  \"b\": ]\n}", "cfg.json");
        FAIL("no throw");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()) == "cfg.json:2:8: malformed JSON");
    }
    CHECK(io::parse_json("[1, 2]").size() == 2);
}

TEST_CASE("curve, driver and multichord round trips") {
    Curve c;
    c.points = {{0.0, 0.0}, {0.1, 0.5}, {0.3, 1.0 / 3.0}};
    CHECK(io::curve_from_json(io::parse_json(io::curve_to_json(c).dump())).points == c.points);
    loewner::DrivingFunction w({0.0, 0.5, 1.0}, {0.0, 0.25, -0.1});
    auto w2 = io::driver_from_json(io::driver_to_json(w));
    CHECK(w2.values() == w.values());

    auto mc = multichord::geodesic_multichord({-3.0, -1.0, 1.0, 3.0}, multichord::LinkPattern::parse("14|23"));
    auto back = io::multichord_from_json(io::parse_json(io::multichord_to_json(mc).dump()));
    CHECK(back.pattern == mc.pattern);
    CHECK(back.chords[1].points == mc.chords[1].points);
    CHECK_THROWS_AS(io::multichord_from_json(io::parse_json(R"({"x": [0, 1, 2, 3], "pattern": [[1, 3], [2, 4]]})")), InputError);
    CHECK_THROWS_AS(io::curve_from_json(io::parse_json(R"({"points": [[0, 0]]})")), InputError);

    auto svg = io::svg_multichord(mc, "note");
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("<!-- note -->") != std::string::npos);
}

TEST_CASE("CSV formatting") {
    io::CsvTable t({"nu", "k", "lambda"});
    t.add({0.0, 1.0, 0.1});
    t.add({1.0, 1.0, 1e-20});
    CHECK(t.str() == "nu,k,lambda\n0,1,0.1\n1,1,1e-20\n");
    CHECK(t.str("manifest sha1 x").rfind("# manifest sha1 x\nnu,k,lambda\n", 0) == 0);
    CHECK_THROWS(t.add({1.0}));
    CHECK(io::fmt(0.1 + 0.2) == "0.30000000000000004");
}
