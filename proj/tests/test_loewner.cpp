#include <cmath>
#include <random>

#include "doctest.h"
#include "loewner_lab/loewner.hpp"

using namespace llab;
using namespace llab::loewner;

namespace {

DrivingFunction random_driver(std::mt19937_64& rng, int segments, double total, double amp) {
    std::normal_distribution<double> n01;
    std::vector<double> t{0.0}, w{0.0};
    double h = total / segments;
    for (int i = 1; i <= segments; ++i) {
        t.push_back(i * h);
        w.push_back(w.back() + amp * std::sqrt(h) * n01(rng));
    }
    return {t, w};
}

double sup_error(const DrivingFunction& a, const DrivingFunction& b, double until) {
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        double t = until * i / 2000.0;
        worst = std::max(worst, std::abs(a(t) - b(t)));
    }
    return worst;
}

}  // namespace

TEST_CASE("zero driver gives the vertical segment") {
    DrivingFunction w({0.0, 1.0}, {0.0, 0.0});
    Curve c = evolve_forward(w, 1000);
    CHECK(std::abs(c.tip() - cplx(0.0, 2.0)) <= 1e-3);
    CHECK(half_plane_capacity(c) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(c.capacity_times.size() == c.points.size());
}

TEST_CASE("Loewner scaling with lambda = 2") {
    std::mt19937_64 rng(7);
    DrivingFunction w = random_driver(rng, 10, 1.0, 1.0);
    const double lam = 2.0;
    std::vector<double> ts, vs;
    for (std::size_t i = 0; i < w.size(); ++i) {
        ts.push_back(lam * lam * w.times()[i]);
        vs.push_back(lam * w.values()[i]);
    }
    Curve a = evolve_forward(w, 400);
    Curve b = evolve_forward(DrivingFunction(ts, vs), 100);
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(lam * a.points[k] - b.points[k]));
    CHECK(worst <= 1e-9);
}

TEST_CASE("roundtrip of random drivers through the zipper") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        DrivingFunction w = random_driver(rng, 10, 1.0, 1.0);
        Curve c = evolve_forward(w, 500);
        DrivingFunction r = compute_driving(c);
        CHECK(r.final_time() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sup_error(w, r, 1.0) <= 1e-2);
    }
}

TEST_CASE("roundtrip error decreases with the mesh") {
    std::mt19937_64 rng(3);
    DrivingFunction w = random_driver(rng, 10, 1.0, 1.5);
    double prev = 1e9;
    for (int spu : {50, 100, 200}) {
        double e = sup_error(w, compute_driving(evolve_forward(w, spu)), 1.0);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("capacity bookkeeping along the trace") {
    std::mt19937_64 rng(5);
    DrivingFunction w = random_driver(rng, 10, 1.0, 1.0);
    Curve c = evolve_forward(w, 300);
    for (std::size_t k : {50ul, 150ul, 300ul}) {
        Curve part;
        part.points.assign(c.points.begin(), c.points.begin() + static_cast<long>(k) + 1);
        double h = 2.0 * compute_driving(part).final_time();
        CHECK(h == doctest::Approx(2.0 * c.capacity_times[k]).epsilon(1e-6));
    }
}

TEST_CASE("vertical segment has zero driver") {
    Curve c;
    for (int k = 0; k <= 200; ++k) c.points.emplace_back(0.0, 2.0 * k / 200.0);
    DrivingFunction w = compute_driving(c);
    CHECK(w.final_time() == doctest::Approx(1.0).epsilon(1e-9));
    for (double v : w.values()) CHECK(std::abs(v) <= 1e-9);
    CHECK(half_plane_capacity(c) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("half-disc hull has capacity r^2") {
    Curve c;
    const int n = 2000;
    for (int k = 0; k <= n; ++k) c.points.push_back(-std::polar(1.0, -kPi * k / n));
    for (int k = 1; k < 50; ++k) c.points.emplace_back(1.0 - 2.0 * k / 50.0, 0.0);
    CHECK(half_plane_capacity(c) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("capacity is monotone for nested hulls") {
    std::mt19937_64 rng(9);
    DrivingFunction w = random_driver(rng, 10, 1.0, 1.0);
    Curve c = evolve_forward(w, 200);
    c.capacity_times.clear();
    Curve part;
    part.points.assign(c.points.begin(), c.points.begin() + 101);
    CHECK(half_plane_capacity(part) <= half_plane_capacity(c));
}

TEST_CASE("Dirichlet energy of simple drivers") {
    CHECK(dirichlet_energy(DrivingFunction({0.0, 1.0}, {0.0, 0.0})) == 0.0);
    CHECK(dirichlet_energy(DrivingFunction({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0})) == doctest::Approx(0.5));
    CHECK(dirichlet_energy(DrivingFunction({0.0, 1.0}, {0.0, 1.0}), 0.5) == doctest::Approx(0.25));
}

TEST_CASE("Brownian energy blows up under refinement") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n01;
    const int fine = 4096;
    std::vector<double> path{0.0};
    for (int i = 1; i <= fine; ++i) path.push_back(path.back() + std::sqrt(2.0 / fine) * n01(rng));
    double prev = 0.0;
    for (int stride : {4, 2, 1}) {
        std::vector<double> t, w;
        for (int i = 0; i <= fine; i += stride) {
            t.push_back(static_cast<double>(i) / fine);
            w.push_back(path[static_cast<std::size_t>(i)]);
        }
        double e = dirichlet_energy(DrivingFunction(t, w));
        if (prev > 0.0) CHECK(e / prev > 1.5);
        prev = e;
    }
}

TEST_CASE("curves leaving a cone pay the cone energy") {
    // a driver that drifts pushes the trace towards the real line
    DrivingFunction w({0.0, 0.25, 1.0}, {0.0, 1.2, 1.2});
    Curve c = evolve_forward(w, 2000);
    REQUIRE(exits_cone(c, kPi / 4));
    double e = dirichlet_energy(compute_driving(c));
    CHECK(e >= -8.0 * std::log(std::sin(kPi / 4)) - 1e-2);
}

TEST_CASE("degenerate input is rejected") {
    CHECK_THROWS_AS(DrivingFunction({0.0, 0.0}, {0.0, 1.0}), InputError);
    CHECK_THROWS_AS(evolve_forward(DrivingFunction({0.0, 1.0}, {0.0, 0.0}), 0), InputError);
}

TEST_CASE("self-touching polyline is reported") {
    Curve c;
    c.points = {{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.5}, {-0.5, 0.5}};
    CHECK_THROWS_AS(compute_driving(c), NumericalError);
}
