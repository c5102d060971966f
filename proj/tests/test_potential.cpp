#include <cmath>

#include "doctest.h"
#include "loewner_lab/potential.hpp"

using namespace llab;
using namespace llab::potential;

namespace {

const std::vector<double> kX4{-3.0, -1.0, 1.0, 3.0};

Multichord semicircles(const std::vector<double>& x, const std::string& pattern, int samples = 400) {
    Multichord mc;
    mc.x = x;
    mc.pattern = LinkPattern::parse(pattern);
    for (const auto& [a, b] : mc.pattern.pairs)
        mc.chords.push_back(multichord::semicircle(x[static_cast<std::size_t>(a - 1)], x[static_cast<std::size_t>(b - 1)], samples));
    return mc;
}

Multichord scaled(Multichord mc, double s) {
    for (double& v : mc.x) v *= s;
    for (auto& c : mc.chords)
        for (auto& p : c.points) p *= s;
    return mc;
}

// bump of relative height amp on every chord
Multichord bumped(Multichord mc, double amp) {
    for (auto& c : mc.chords) {
        const std::size_t n = c.size();
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double s = static_cast<double>(i) / static_cast<double>(n - 1);
            c.points[i] = {c.points[i].real(), c.points[i].imag() * (1.0 + amp * std::exp(-std::pow((s - 0.4) / 0.15, 2.0)))};
        }
    }
    return mc;
}

}  // namespace

TEST_CASE("single chord: no loop term, explicit potential") {
    auto mc = semicircles({0.0, 1.0}, "12");
    CHECK(loop_term_deterministic(mc) == 0.0);
    auto r = loewner_potential(mc);
    CHECK(r.loop_term == 0.0);
    CHECK(std::abs(r.H) < 1e-3);
    CHECK(minimal_potential({0.0, std::exp(1.0)}, LinkPattern::parse("12")) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(minimal_potential({0.0, 1.0}, LinkPattern::parse("12")) == doctest::Approx(0.0));
    auto mcr = loop_term_mc(mc, {});
    CHECK(mcr.value == 0.0);
    CHECK(mcr.stderr_ == 0.0);
}

TEST_CASE("report terms add up") {
    auto mc = multichord::geodesic_multichord(kX4, LinkPattern::parse("14|23"));
    auto r = loewner_potential(mc);
    double sum = r.loop_term;
    for (double v : r.energy_terms) sum += v;
    for (double v : r.poisson_terms) sum += v;
    CHECK(r.H == doctest::Approx(sum).epsilon(1e-15));
    CHECK(r.loop_term >= 0.0);
    for (double v : r.energy_terms) CHECK(v >= 0.0);
    auto j = r.to_json();
    CHECK(j["method"] == "deterministic");
    CHECK(j["terms"]["energy"].size() == 2);
}

TEST_CASE("far apart chords barely interact") {
    auto mc = semicircles({-100.0, -99.0, 99.0, 100.0}, "12|34");
    double m = loop_term_deterministic(mc);
    CHECK(m >= -1e-6);
    CHECK(m <= 1e-3);
}

TEST_CASE("loop term shrinks as a chord moves away") {
    double prev = 1e300;
    for (double s : {0.0, 1.0, 2.0, 4.0}) {
        double m = loop_term_deterministic(semicircles({-3.0, -1.0, 1.0 + s, 3.0 + s}, "12|34"));
        CHECK(m < prev);
        CHECK(m > 0.0);
        prev = m;
    }
}

TEST_CASE("peeling order and cascade") {
    for (const char* p : {"12|34", "14|23"}) {
        auto mc = multichord::geodesic_multichord(kX4, LinkPattern::parse(p));
        CHECK(peeling_spread(mc) <= 1e-2);
        for (std::size_t j = 0; j < 2; ++j) CHECK(cascade_defect(mc, j) <= 2e-2);
    }
    auto mc3 = multichord::geodesic_multichord({-2.0, -1.2, 0.1, 1.0, 2.5, 4.0}, LinkPattern::parse("16|25|34"));
    CHECK(peeling_spread(mc3) <= 1e-2);
    for (std::size_t j = 0; j < 3; ++j) CHECK(cascade_defect(mc3, j) <= 2e-2);
}

TEST_CASE("covariance under scaling") {
    for (const char* p : {"12|34", "14|23"}) {
        auto mc = semicircles(kX4, p);
        double h1 = loewner_potential(mc).H, h2 = loewner_potential(scaled(mc, 2.0)).H;
        CHECK(h2 - h1 == doctest::Approx(std::log(2.0)).epsilon(1e-2));
    }
}

TEST_CASE("minimal potential: reflection symmetry and cascade lower bound") {
    std::vector<double> x{-2.5, -1.0, 0.5, 3.0};
    std::vector<double> mirrored;
    for (auto it = x.rbegin(); it != x.rend(); ++it) mirrored.push_back(-*it);
    // a pair (a, b) becomes (5 - b, 5 - a)
    CHECK(minimal_potential(x, LinkPattern::parse("12|34")) ==
          doctest::Approx(minimal_potential(mirrored, LinkPattern::parse("12|34"))).epsilon(1e-6));
    CHECK(minimal_potential(x, LinkPattern::parse("14|23")) ==
          doctest::Approx(minimal_potential(mirrored, LinkPattern::parse("14|23"))).epsilon(1e-6));
    for (const char* p : {"12|34", "14|23"}) {
        auto a = LinkPattern::parse(p);
        double single = 0.0;
        for (const auto& [i, j] : a.pairs) single += 0.5 * std::log(kX4[static_cast<std::size_t>(j - 1)] - kX4[static_cast<std::size_t>(i - 1)]);
        CHECK(minimal_potential(kX4, a) >= single);
    }
}

TEST_CASE("multichord energy") {
    auto geo = multichord::geodesic_multichord(kX4, LinkPattern::parse("12|34"));
    CHECK(std::abs(multichord_energy(geo)) <= 5e-2);
    double prev = multichord_energy(geo);
    for (double amp : {0.1, 0.2, 0.4}) {
        double e = multichord_energy(bumped(geo, amp));
        CHECK(e > prev);
        prev = e;
    }
    CHECK(minimality_margin(kX4, LinkPattern::parse("14|23")) > 0.0);

    // one chord: I = chord energy
    Curve c = multichord::semicircle(-1.0, 1.0, 400);
    for (std::size_t i = 1; i + 1 < c.size(); ++i) c.points[i] = {c.points[i].real() * 1.2, c.points[i].imag()};
    Multichord one{{-1.0, 1.0}, LinkPattern::parse("12"), {c}};
    double direct = conformal::chord_energy(c, conformal::DomainSpec::half_plane(), -1.0, 1.0).energy;
    CHECK(multichord_energy(one) == doctest::Approx(direct).epsilon(5e-2));
}

TEST_CASE("null-state residuals") {
    // n = 1 with U = 6 log|x2 - x1| substituted exactly
    std::vector<double> x{-0.7, 2.3};
    double d = x[1] - x[0];
    std::vector<double> g{-6.0 / d, 6.0 / d};
    CHECK(std::abs(null_state_residual(x, 1, g)) < 1e-14);
    CHECK(std::abs(null_state_residual(x, 2, g)) < 1e-14);
    CHECK(std::abs(pde_residual(x, LinkPattern::parse("12"), 1, 1e-3)) < 1e-5);

    auto a = LinkPattern::parse("12|34");
    auto grad = potential_gradient(kX4, a, 0.2);
    CHECK(grad[0] == doctest::Approx(-grad[3]).epsilon(1e-6));
    CHECK(null_state_residual(kX4, 1, grad) == doctest::Approx(null_state_residual(kX4, 4, grad)).epsilon(1e-4));
    CHECK(std::abs(null_state_residual(kX4, 2, grad)) < 0.1);

    CHECK_THROWS_AS(pde_residual(kX4, a, 1, 1.0), InputError);
    CHECK_THROWS_AS(pde_residual(kX4, a, 5, 0.1), InputError);
}

TEST_CASE("minimizer flow, one chord") {
    auto r = minimizer_flow({-1.0, 1.0}, LinkPattern::parse("12"), 1, 0.01);
    REQUIRE(r.lifetime_reached);
    CHECK(r.lifetime == doctest::Approx(0.5).epsilon(2e-3));
    for (const auto& s : r.states)
        if (s.t < 0.49) CHECK(std::abs((s.V[0] - s.W) * (s.V[0] - s.W) - (4.0 - 8.0 * s.t)) < 1e-4);
    CHECK(hausdorff_distance(r.trace, multichord::semicircle(-1.0, 1.0, 2000)) <= 5e-3);
    CHECK_THROWS_AS(minimizer_flow({-1.0, 1.0}, LinkPattern::parse("12"), 2, 0.01), InputError);
}

TEST_CASE("loop Monte Carlo agrees with the deterministic loop term") {
    auto mc = multichord::geodesic_multichord(kX4, LinkPattern::parse("14|23"));
    LoopMcOptions o;
    o.n_samples = 40000;
    o.seed = 11;
    auto e = loop_term_mc(mc, o);
    CHECK(e.stderr_ > 0.0);
    CHECK(std::abs(e.value - loop_term_deterministic(mc)) <= 3.0 * e.stderr_);
    // reproducible for any thread count
    o.n_samples = 2000;
    o.threads = 1;
    auto a = loop_term_mc(mc, o);
    o.threads = 3;
    auto b = loop_term_mc(mc, o);
    CHECK(a.value == b.value);
}

TEST_CASE("loop mass along a Loewner chain matches the deterministic loop term") {
    auto mc = multichord::geodesic_multichord(kX4, LinkPattern::parse("12|34"));
    auto phi = conformal::mobius_to_reference(-3.0, -1.0);
    Curve g;
    g.points.emplace_back(0.0, 0.0);
    for (std::size_t k = 1; k < mc.chords[0].size(); ++k) {
        cplx w = phi(mc.chords[0].points[k]);
        if (std::abs(w) > 1e9) break;
        g.points.push_back(w);
    }
    Curve o;
    for (cplx p : mc.chords[1].points) {
        cplx w = phi(p);
        o.points.push_back(p.imag() == 0.0 ? cplx(w.real(), 0.0) : w);
    }
    auto z = loewner::unzip(g);
    CHECK(loop_mass_along_chain(z.maps, {o}) == doctest::Approx(loop_term_deterministic(mc)).epsilon(1e-2));
}

TEST_CASE("partition probe, one chord") {
    const double kappas[] = {1.0, 0.5};
    auto rows = partition_limit_probe({0.0, 2.0}, LinkPattern::parse("12"), kappas, 4, 1);
    for (const auto& r : rows) {
        CHECK(r.klogZ == doctest::Approx(-(6.0 - r.kappa) * std::log(2.0)).epsilon(1e-12));
        CHECK(r.accepted == 4);
    }
}
