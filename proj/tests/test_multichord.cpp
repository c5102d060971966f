#include <random>

#include "doctest.h"
#include "loewner_lab/multichord.hpp"

using namespace llab;
using namespace llab::multichord;

namespace {

const std::vector<double> kX4{-3.0, -1.0, 1.0, 3.0};

// reflection z -> -conj(z), distance of the mirrored multichord to itself
double mirror_asymmetry(const Multichord& mc) {
    double worst = 0.0;
    for (const auto& c : mc.chords)
        for (cplx z : c.points) {
            double d = 1e300;
            for (const auto& other : mc.chords) d = std::min(d, distance_to_polyline({-z.real(), z.imag()}, other.points));
            worst = std::max(worst, d);
        }
    return worst;
}

double min_gap(const Curve& a, const Curve& b) {
    double d = 1e300;
    for (std::size_t i = 1; i + 1 < a.size(); ++i) d = std::min(d, distance_to_polyline(a.points[i], b.points));
    return d;
}

}  // namespace

TEST_CASE("Catalan counts of link patterns") {
    const std::size_t catalan[] = {1, 2, 5, 14, 42};
    for (int n = 1; n <= 5; ++n) {
        auto all = enumerate_link_patterns(n);
        CHECK(all.size() == catalan[n - 1]);
        for (const auto& p : all) CHECK(p.planar());
    }
    auto two = enumerate_link_patterns(2);
    CHECK(two[0].to_string() == "12|34");
    CHECK(two[1].to_string() == "14|23");
    CHECK_THROWS_AS(enumerate_link_patterns(9), InputError);
    CHECK_THROWS_AS(enumerate_link_patterns(0), InputError);
}

TEST_CASE("link pattern parsing") {
    CHECK(LinkPattern::parse("23|14").to_string() == "14|23");
    CHECK(LinkPattern::parse("1,2|3,4") == LinkPattern::parse("12|34"));
    CHECK_THROWS_AS(LinkPattern::parse("13|24"), InputError);
    CHECK_THROWS_AS(LinkPattern::parse("12|23"), InputError);
    CHECK_THROWS_AS(LinkPattern::parse("1x"), InputError);
    CHECK_THROWS_AS(validate_points({0.0, 0.0}, LinkPattern::parse("12")), InputError);
}

TEST_CASE("single chord is the semicircle") {
    auto mc = geodesic_multichord({-1.0, 1.0}, LinkPattern::parse("12"));
    double worst = 0.0;
    for (cplx z : mc.chords[0].points) worst = std::max(worst, std::abs(std::abs(z) - 1.0));
    CHECK(worst <= 1e-3);
}

TEST_CASE("side-by-side pair is mirror symmetric") {
    auto mc = geodesic_multichord(kX4, LinkPattern::parse("12|34"));
    CHECK(mirror_asymmetry(mc) <= 2e-3);
    CHECK(geodesic_defect(mc) <= 1e-2);
    CHECK(classify_link_pattern(mc.chords, kX4) == mc.pattern);
    // the neighbour pushes each chord below the free semicircle
    double top = 0.0;
    for (cplx z : mc.chords[0].points) top = std::max(top, z.imag());
    CHECK(top < 1.0);
}

TEST_CASE("nested pair") {
    auto mc = geodesic_multichord(kX4, LinkPattern::parse("14|23"));
    for (const auto& c : mc.chords) {
        Multichord single{kX4, mc.pattern, {c}};
        CHECK(mirror_asymmetry(single) <= 2e-3);
    }
    CHECK(min_gap(mc.chords[1], mc.chords[0]) > 0.1);
    CHECK(geodesic_defect(mc) <= 1e-2);
    CHECK(classify_link_pattern(mc.chords, kX4) == mc.pattern);
}

TEST_CASE("fixed point does not depend on the starting multichord") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> squash(0.6, 1.0);
    GeodesicOptions opts;
    for (const auto& alpha : enumerate_link_patterns(2)) {
        auto ref = geodesic_multichord(kX4, alpha, opts);
        for (int run = 0; run < 5; ++run) {
            Multichord start{kX4, alpha, {}};
            for (const auto& [a, b] : alpha.pairs) {
                // outer chords stretched, inner ones squashed, so the start stays disjoint
                double f = b - a == 1 ? squash(rng) : 1.0 / squash(rng);
                Curve c = semicircle(kX4[a - 1], kX4[b - 1], opts.samples);
                for (auto& z : c.points) z = {z.real(), f * z.imag()};
                start.chords.push_back(c);
            }
            CHECK(multichord_distance(geodesic_multichord_from(start, opts), ref) <= 10 * opts.tol);
        }
    }
}

TEST_CASE("three chords converge for every pattern") {
    std::vector<double> x{-5.0, -3.0, -1.0, 1.0, 3.0, 5.0};
    GeodesicOptions opts;
    opts.samples = 200;
    for (const auto& alpha : enumerate_link_patterns(3)) {
        auto mc = geodesic_multichord(x, alpha, opts);
        CHECK(geodesic_defect(mc) <= 1e-2);
        CHECK(classify_link_pattern(mc.chords, x) == alpha);
    }
}

TEST_CASE("classification of hand-made chords") {
    CHECK(classify_link_pattern({semicircle(-3, -1, 20), semicircle(1, 3, 20)}, kX4).to_string() == "12|34");
    CHECK(classify_link_pattern({semicircle(-3, 3, 20), semicircle(-1, 1, 20)}, kX4).to_string() == "14|23");
    CHECK_THROWS_AS(classify_link_pattern({semicircle(-2, 3, 20)}, kX4), InputError);
}

TEST_CASE("sweep failures are reported") {
    GeodesicOptions opts;
    opts.max_sweeps = 1;
    CHECK_THROWS_AS(geodesic_multichord(kX4, LinkPattern::parse("12|34"), opts), NumericalError);
}
