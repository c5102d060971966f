#include "doctest.h"
#include "loewner_lab/rational.hpp"

using namespace llab;
using namespace llab::multichord;

namespace {

RationalFn square_ratio(double x1, double x2) {
    return {poly_mul({-x1, 1.0}, {-x1, 1.0}), poly_mul({-x2, 1.0}, {-x2, 1.0}), "none"};
}

double max_root_error(const RationalFn& f, const std::vector<double>& x) {
    auto r = poly_roots(wronskian(f));
    if (r.size() != x.size()) return 1e300;
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(r[i] - x[i]));
    return worst;
}

}  // namespace

TEST_CASE("Wronskian of a squared ratio") {
    auto w = wronskian(square_ratio(0.5, 2.0));
    // 2 (x1 - x2) (x - x1) (x - x2)
    Poly expect = poly_mul({2.0 * (0.5 - 2.0)}, poly_mul({-0.5, 1.0}, {-2.0, 1.0}));
    REQUIRE(w.size() == expect.size());
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("critical points do not see Mobius post-composition") {
    RationalFn f{{1.0, -2.0, 0.5, 1.0}, {-3.0, 0.0, 1.0, 0.0}, "none"};
    auto r0 = poly_roots(wronskian(f));
    CHECK(r0.size() == 4);  // degree 2n for a generic degree-3 function
    RationalFn g{poly_add(poly_mul(f.p, {2.0}), f.q, 3.0), poly_add(f.p, poly_mul(f.q, {-1.0})), "none"};
    auto r1 = poly_roots(wronskian(g));
    REQUIRE(r1.size() == r0.size());
    for (std::size_t i = 0; i < r0.size(); ++i) CHECK(std::abs(r0[i] - r1[i]) <= 1e-8);
    CHECK(equivalent(f, g, -5.0, 5.0));
}

TEST_CASE("one chord: explicit solution") {
    auto sols = rational_solutions({0.0, 2.0});
    REQUIRE(sols.size() == 1);
    RationalFn ref = square_ratio(0.0, 2.0);
    for (cplx z : {cplx(0.3, 0.4), cplx(-1.0, 2.0), cplx(5.0, 0.1)}) CHECK(std::abs(sols[0](z) - ref(z)) <= 1e-12);
    CHECK(max_root_error(sols[0], {0.0, 2.0}) <= 1e-8);

    auto loc = real_locus(square_ratio(-1.0, 1.0), {-1.0, 1.0});
    double dev = 0.0;
    for (cplx z : loc.chords[0].points) dev = std::max(dev, std::abs(std::abs(z) - 1.0));
    CHECK(dev <= 1e-3);
    CHECK(loc.pattern.to_string() == "12");
}

TEST_CASE("real rational functions are real on the line") {
    auto sols = rational_solutions({-3.0, -1.0, 1.0, 3.0});
    for (const auto& f : sols)
        for (double t = -10.0; t <= 10.0; t += 0.37) {
            cplx v = f(t);
            if (!is_infinite(v)) CHECK(std::abs(v.imag()) <= 1e-12 * (1.0 + std::abs(v)));
        }
}

TEST_CASE("two chords: two classes, one per pattern, matching the geodesics") {
    std::vector<double> x{-3.0, -1.0, 1.0, 3.0};
    auto sols = rational_solutions(x);
    REQUIRE(sols.size() == 2);
    CHECK_FALSE(equivalent(sols[0], sols[1], x.front(), x.back()));
    auto patterns = enumerate_link_patterns(2);
    for (std::size_t k = 0; k < sols.size(); ++k) {
        CHECK(sols[k].normalization == "endpoints");
        CHECK(max_root_error(sols[k], x) <= 1e-6);
        auto loc = real_locus(sols[k], x);
        CHECK(loc.pattern == patterns[k]);
        auto geo = geodesic_multichord(x, patterns[k]);
        CHECK(multichord_distance(loc, geo) <= 5e-3);
    }
}

TEST_CASE("three chords: every class and the cross-check") {
    std::vector<double> x{-2.0, -1.2, 0.1, 1.0, 2.5, 4.0};
    auto sols = rational_solutions(x);
    GeodesicOptions fine;
    fine.samples = 1600;  // nested chords need the finer geodesic to reach the tolerance
    auto patterns = enumerate_link_patterns(3);
    REQUIRE(sols.size() == patterns.size());
    for (std::size_t k = 0; k < sols.size(); ++k) {
        CHECK(max_root_error(sols[k], x) <= 1e-6);
        auto loc = real_locus(sols[k], x);
        CHECK(loc.pattern == patterns[k]);
        CHECK(multichord_distance(loc, geodesic_multichord(x, patterns[k], fine)) <= 5e-3);
        for (std::size_t l = 0; l < k; ++l) CHECK_FALSE(equivalent(sols[k], sols[l], x.front(), x.back()));
    }
}

TEST_CASE("input checks") {
    CHECK_THROWS_AS(rational_solutions({0.0, 1.0, 2.0}), InputError);
    CHECK_THROWS_AS(real_locus(square_ratio(-1.0, 1.0), {-1.0, 1.0}, Window{0.0, 2.0, 1.0}, 0.01), InputError);
    CHECK_THROWS_AS(real_locus(square_ratio(-1.0, 1.0), {-1.0, 1.0}, Window{-2.0, 2.0, 0.5}, 0.01), NumericalError);
}
