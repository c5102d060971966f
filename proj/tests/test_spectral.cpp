#include <cmath>

#include "doctest.h"
#include "loewner_lab/spectral.hpp"

using namespace llab;
using namespace llab::spectral;

namespace {

const SpectralDomain kDisc = SpectralDomain::make(Shape::disc);
const SpectralDomain kHalf = SpectralDomain::make(Shape::half_disc);

}  // namespace

TEST_CASE("Dirichlet spectra from Bessel zeros") {
    auto d = dirichlet_spectrum(kDisc, 3);
    CHECK(d[0] == doctest::Approx(5.7832).epsilon(2e-5));
    CHECK(d[1] == d[2]);  // cos and sin modes
    auto h = dirichlet_spectrum(kHalf, 2);
    CHECK(h[0] == doctest::Approx(14.6820).epsilon(1e-5));
    CHECK(h[0] == doctest::Approx(d[1]).epsilon(1e-14));
    // quarter disc: even orders only
    auto q = dirichlet_modes(SpectralDomain::make(Shape::quarter_disc), 5);
    for (const auto& m : q) CHECK(m.nu % 2 == 0);

    auto many = dirichlet_spectrum(kDisc, 500);
    CHECK(many.size() == 500);
    for (std::size_t i = 1; i < many.size(); ++i) CHECK(many[i] >= many[i - 1]);
    double weyl = 500.0 / many.back();
    CHECK(std::abs(weyl / (kDisc.area / (4.0 * kPi)) - 1.0) <= 0.05);
    double two_term = kDisc.area / (4.0 * kPi) * many.back() - kDisc.perimeter / (4.0 * kPi) * std::sqrt(many.back());
    CHECK(std::abs(two_term / 500.0 - 1.0) <= 0.05);

    auto scaled = dirichlet_spectrum(SpectralDomain::make(Shape::disc, 2.0), 1);
    CHECK(scaled[0] == doctest::Approx(d[0] / 4.0).epsilon(1e-14));
    CHECK_THROWS_AS(dirichlet_spectrum(kDisc, 0), InputError);
    auto warped = kDisc;
    warped.sigma = [](double x, double) { return x; };
    CHECK_THROWS_AS(dirichlet_spectrum(warped, 3), InputError);
    CHECK_THROWS_AS(parse_shape("square"), InputError);
}

TEST_CASE("heat-trace coefficients") {
    auto c = heat_trace_coefficients(kDisc);
    CHECK(c.a0 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(c.a1 == doctest::Approx(-std::sqrt(kPi) / 4.0).epsilon(1e-12));
    CHECK(c.a2 == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(heat_trace_coefficients(kHalf).a2 == doctest::Approx(5.0 / 24.0).epsilon(1e-12));
    CHECK(heat_trace_coefficients(SpectralDomain::make(Shape::quarter_disc)).a2 == doctest::Approx(11.0 / 48.0).epsilon(1e-12));

    // chi / 6 + (1/24) sum (1/beta - 2 + beta): chi = 1 for every shape here
    for (Shape s : {Shape::disc, Shape::half_disc, Shape::quarter_disc}) {
        auto d = SpectralDomain::make(s);
        double gb = 1.0 / 6.0;
        for (const auto& k : d.corners) gb += (1.0 / k.beta - 2.0 + k.beta) / 24.0;
        CHECK(heat_trace_coefficients(d).a2 == doctest::Approx(gb).epsilon(1e-12));
    }

    // a conformal change keeps a2 and rescales the area
    auto warped = kHalf;
    warped.sigma = [](double x, double y) { return 0.3 * x + 0.1 * std::sin(2.0 * y); };
    auto w = heat_trace_coefficients(warped);
    CHECK(w.a2 == doctest::Approx(5.0 / 24.0).epsilon(1e-6));
    CHECK(w.a0 != doctest::Approx(kHalf.area / (4.0 * kPi)));

    // a constant weight scales every coefficient
    auto two = heat_trace_coefficients(kHalf, [](double, double) { return 2.0; });
    CHECK(two.a2 == doctest::Approx(2.0 * 5.0 / 24.0).epsilon(1e-12));
    CHECK_THROWS_AS(heat_trace_coefficients(kHalf, [](double x, double) { return 1.0 / (1.0 - x); }), InputError);
}

TEST_CASE("small-time heat trace and zeta(0)") {
    for (const auto& d : {kDisc, kHalf})
        CHECK(zeta_at_zero(d) == doctest::Approx(heat_trace_coefficients(d).a2).epsilon(1e-3 / 0.2));
}

TEST_CASE("zeta-regularized determinants") {
    auto disc = zeta_determinant(kDisc);
    CHECK(disc.logdet == doctest::Approx(-0.7737).epsilon(1e-3 / 0.77));
    CHECK(std::abs(disc.logdet - logdet_closed_form(Shape::disc)) <= 1e-3);
    CHECK(disc.uncertainty <= 1e-3);
    auto half = zeta_determinant(kHalf);
    CHECK(std::abs(half.logdet - logdet_closed_form(Shape::half_disc)) <= 1e-3);
    CHECK(half.logdet == doctest::Approx(-0.8463).epsilon(1e-3 / 0.84));

    double shifted = zeta_determinant(SpectralDomain::make(Shape::disc, 2.0)).logdet;
    CHECK(std::abs(shifted - disc.logdet + std::log(2.0) / 3.0) <= 1e-3);

    auto j = half.to_json();
    CHECK(j["shape"] == "half_disc");
    CHECK(j["count"].get<long>() == half.count);
    CHECK_THROWS_AS(zeta_determinant(kDisc, 1e-12), NumericalError);
}

TEST_CASE("Polyakov-Alvarez anomaly") {
    const double s = -std::log(2.0);
    auto cst = [s](double, double) { return s; };
    CHECK(std::abs(polyakov_alvarez(kDisc, cst, 0.0) - (-2.0 * s / 6.0)) <= 1e-6);
    CHECK(std::abs(polyakov_alvarez(kHalf, cst, 0.0) - (-2.0 * s * 5.0 / 24.0)) <= 1e-6);
    CHECK(polyakov_alvarez(kHalf, [](double, double) { return 0.0; }, -0.8) == -0.8);
    CHECK(polyakov_alvarez(kHalf, {}, -0.8) == -0.8);

    PaOptions no_corners;
    no_corners.corner_terms = false;
    CHECK(std::abs(polyakov_alvarez(kHalf, cst, 0.0, no_corners) - (-2.0 * s * 5.0 / 24.0)) >= 1e-2);

    // sigma then -sigma in the new metric
    auto sg = [](double x, double y) { return 0.3 * x + 0.2 * x * y + 0.1 * std::sin(2.0 * y); };
    double once = polyakov_alvarez(kHalf, sg, -0.8463);
    auto warped = kHalf;
    warped.sigma = sg;
    CHECK(std::abs(polyakov_alvarez(warped, [&](double x, double y) { return -sg(x, y); }, once) + 0.8463) <= 1e-6);

    auto rough = [](double x, double y) { return std::sin(60.0 * x) * std::cos(50.0 * y); };
    CHECK_THROWS_AS(polyakov_alvarez(kDisc, rough, 0.0), NumericalError);
}

TEST_CASE("potential from determinants") {
    auto r = potential_via_determinants();
    CHECK(r.H_tilde == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(kPi)).epsilon(2e-3 / 0.92));
    CHECK(r.lambda == doctest::Approx(0.5724).epsilon(2e-3 / 0.57));
    CHECK(std::abs(r.H_loewner - 0.5 * std::log(2.0)) <= 2e-3);
}

TEST_CASE("loop mass with a time cutoff") {
    auto r = loop_mass_cutoff(kDisc, 0.01);
    CHECK(std::abs(r.mass - r.expansion) <= 5e-2);
    CHECK(r.tail <= 1e-4);
    double prev_gap = 0.0, prev_mass = 0.0;
    for (double delta : {0.04, 0.01, 0.0025}) {
        auto c = loop_mass_cutoff(kDisc, delta);
        double gap = std::abs(c.mass - c.expansion);
        if (prev_gap > 0.0) {
            double rate = std::sqrt(0.25) * std::log(delta) / std::log(4.0 * delta);
            CHECK(gap / prev_gap <= rate);
            CHECK(c.mass > prev_mass);
        }
        prev_gap = gap;
        prev_mass = c.mass;
    }
    CHECK(loop_mass_cutoff(kDisc, 0.25).mass < r.mass);
    auto h = loop_mass_cutoff(kHalf, 0.01);
    CHECK(std::abs(h.mass - h.expansion) <= 5e-2);
    CHECK_THROWS_AS(loop_mass_cutoff(kDisc, 0.7), InputError);
    CHECK_THROWS_AS(loop_mass_cutoff(kDisc, 0.0), InputError);
}
