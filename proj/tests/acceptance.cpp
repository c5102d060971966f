// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "loewner_lab/mc_sle.hpp"
#include "loewner_lab/potential.hpp"
#include "loewner_lab/rational.hpp"
#include "loewner_lab/spectral.hpp"

using namespace llab;
using multichord::LinkPattern;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string f(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string f(const char* format, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, format);
    std::vsnprintf(buf, sizeof buf, format, ap);
    va_end(ap);
    return buf;
}

const std::vector<double> kX4{-3.0, -1.0, 1.0, 3.0};

Outcome catalan() {
    const long want[] = {1, 2, 5, 14};
    std::string d;
    bool ok = true;
    for (int n = 1; n <= 4; ++n) {
        auto c = static_cast<long>(multichord::enumerate_link_patterns(n).size());
        ok = ok && c == want[n - 1];
        d += f("%ld ", c);
    }
    return {ok, "counts " + d};
}

Outcome zero_energy() {
    auto e = conformal::chord_energy(multichord::semicircle(-1.0, 1.0, 2000), conformal::DomainSpec::half_plane(), -1.0, 1.0);
    Curve up;
    for (int k = 0; k <= 400; ++k) up.points.emplace_back(0.0, 0.01 * k);
    auto w = loewner::compute_driving(up);
    double wmax = 0.0;
    for (double v : w.values()) wmax = std::max(wmax, std::abs(v));
    return {e.energy <= 5e-3 && wmax <= 1e-9, f("I(semicircle) %.2e, max |W| on iR+ %.1e", e.energy, wmax)};
}

Outcome minimal_one() {
    double m = potential::minimal_potential({0.0, std::exp(1.0)}, LinkPattern::parse("12"));
    return {std::abs(m - 0.5) <= 1e-3, f("M = %.6f", m)};
}

Outcome cross_validation() {
    auto sols = multichord::rational_solutions(kX4);
    bool ok = sols.size() == 2;
    std::string d = f("%zu rational classes;", sols.size());
    for (const char* p : {"12|34", "14|23"}) {
        auto a = LinkPattern::parse(p);
        auto geo = multichord::geodesic_multichord(kX4, a);
        double best = INFINITY;
        for (const auto& s : sols) {
            auto locus = multichord::real_locus(s, kX4);
            if (locus.pattern == a) best = std::min(best, multichord::multichord_distance(geo, locus));
        }
        ok = ok && best <= 5e-3;
        d += f(" %s %.1e", p, best);
    }
    return {ok, d};
}

Outcome cascade() {
    double worst = 0.0;
    for (const char* p : {"12|34", "14|23"}) {
        auto mc = multichord::geodesic_multichord(kX4, LinkPattern::parse(p));
        for (std::size_t j = 0; j < 2; ++j) worst = std::max(worst, potential::cascade_defect(mc, j));
    }
    return {worst <= 2e-2, f("max defect %.2e", worst)};
}

Outcome pde() {
    std::vector<double> x{-0.7, 2.3};
    double d = x[1] - x[0];
    std::vector<double> g{-6.0 / d, 6.0 / d};
    double sym = std::max(std::abs(potential::null_state_residual(x, 1, g)), std::abs(potential::null_state_residual(x, 2, g)));
    bool ok = sym <= 1e-12;
    double worst_ratio = INFINITY, worst_final = 0.0;
    const double hs[] = {0.4, 0.2, 0.1};
    for (const char* p : {"12|34", "14|23"}) {
        auto a = LinkPattern::parse(p);
        for (int j = 1; j <= 4; ++j) {
            double prev = 0.0;
            for (std::size_t k = 0; k < 3; ++k) {
                double r = std::abs(potential::pde_residual(kX4, a, j, hs[k]));
                if (k > 0) worst_ratio = std::min(worst_ratio, prev / r);
                prev = r;
            }
            worst_final = std::max(worst_final, prev);
        }
    }
    ok = ok && worst_ratio >= 3.0 && worst_final <= 1e-2;
    return {ok, f("n=1 %.0e; n=2 min decrease %.2fx per halving, final max %.2e", sym, worst_ratio, worst_final)};
}

Outcome flow() {
    auto r = potential::minimizer_flow({-1.0, 1.0}, LinkPattern::parse("12"), 1, 0.01);
    double h = hausdorff_distance(r.trace, multichord::semicircle(-1.0, 1.0, 4000));
    return {r.lifetime_reached && std::abs(r.lifetime - 0.5) <= 1e-3 && h <= 5e-3, f("lifetime %.6f, distance %.1e", r.lifetime, h)};
}

Outcome determinants() {
    auto r = spectral::potential_via_determinants();
    bool ok = std::abs(r.logdet_disc + 0.7737) <= 1e-3 && std::abs(r.logdet_half + 0.8463) <= 1e-3 &&
              std::abs(r.lambda - 0.5 * std::log(kPi)) <= 2e-3 && std::abs(r.H_tilde - 0.9189) <= 2e-3;
    return {ok, f("disc %.5f, half %.5f, H~ %.5f, lambda %.5f", r.logdet_disc, r.logdet_half, r.H_tilde, r.lambda)};
}

Outcome anomaly() {
    const double s = -std::log(2.0);
    auto cst = [s](double, double) { return s; };
    auto disc = spectral::SpectralDomain::make(spectral::Shape::disc);
    auto half = spectral::SpectralDomain::make(spectral::Shape::half_disc);
    // zeta(0) = 1/6 and 5/24
    double ed = std::abs(spectral::polyakov_alvarez(disc, cst, 0.0) + 2.0 * s / 6.0);
    double eh = std::abs(spectral::polyakov_alvarez(half, cst, 0.0) + 2.0 * s * 5.0 / 24.0);
    spectral::PaOptions no;
    no.corner_terms = false;
    double neg = std::abs(spectral::polyakov_alvarez(half, cst, 0.0, no) + 2.0 * s * 5.0 / 24.0);
    return {ed <= 1e-6 && eh <= 1e-6 && neg >= 1e-2, f("disc %.0e, half %.0e, without corners %.3f", ed, eh, neg)};
}

Outcome uv() {
    auto disc = spectral::SpectralDomain::make(spectral::Shape::disc);
    std::vector<double> gaps;
    for (double d : {0.04, 0.01, 0.0025}) {
        auto r = spectral::loop_mass_cutoff(disc, d);
        gaps.push_back(std::abs(r.mass - r.expansion));
    }
    // gap(delta / 4) / gap(delta) against the same ratio for sqrt(delta) |log delta|
    bool ok = gaps[1] <= 5e-2;
    const double ds[] = {0.04, 0.01, 0.0025};
    std::string d = f("gaps %.2e %.2e %.2e", gaps[0], gaps[1], gaps[2]);
    for (int i = 0; i < 2; ++i) ok = ok && gaps[i + 1] / gaps[i] <= 0.5 * std::log(ds[i + 1]) / std::log(ds[i]);
    return {ok, d};
}

Outcome returns() {
    bool ok = mc_sle::c_kappa_bound(4.0) == 2.0 && std::abs(mc_sle::c_kappa_bound(8.0 / 3.0) - 4.375) <= 1e-12;
    mc_sle::McConfig cfg;
    cfg.n_samples = 10000;
    const double radii[] = {0.1, 0.2, 0.3};
    std::string d;
    for (double k : {1.0, 2.0, 4.0}) {
        auto rows = mc_sle::return_probabilities({k}, cfg, radii);
        for (const auto& r : rows) ok = ok && r.pass;
        d += f("k=%g: %.4f/%.3g %.4f/%.3g %.4f/%.3g; ", k, rows[0].p_hat, rows[0].bound, rows[1].p_hat, rows[1].bound,
               rows[2].p_hat, rows[2].bound);
    }
    return {ok, d + "p_hat/bound"};
}

Outcome ldp() {
    mc_sle::McConfig cfg;
    cfg.n_samples = 20000;
    const double ks[] = {2.0, 1.0, 0.5};
    bool trend = false;
    auto rows = mc_sle::ldp_decay_probe({}, ks, cfg, &trend);
    const double rate = mc_sle::cone_rate(kPi / 3);
    bool toward = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        toward = toward && std::abs(rows[i].klogp - rate) < std::abs(rows[i - 1].klogp - rate);
    return {trend && toward, f("k log p = %.3f(%.3f) %.3f(%.3f) %.3f(%.3f), rate %.4f", rows[0].klogp, rows[0].stderr_, rows[1].klogp,
                               rows[1].stderr_, rows[2].klogp, rows[2].stderr_, rate)};
}

Outcome gibbs() {
    auto a = LinkPattern::parse("12|34");
    auto geo = multichord::geodesic_multichord(kX4, a);
    double mean[2] = {0.0, 0.0};
    const double ks[] = {0.5, 1.5};
    const int runs = 100;
    for (int i = 0; i < 2; ++i) {
        for (int r = 0; r < runs; ++r) {
            mc_sle::McConfig cfg;
            cfg.seed = static_cast<std::uint64_t>(1000 + r);
            auto mc = mc_sle::gibbs_multichordal(kX4, a, {ks[i]}, cfg);
            mean[i] += multichord::multichord_distance(mc, geo) / runs;
        }
    }
    return {mean[0] < mean[1], f("mean distance %.3f at kappa 0.5, %.3f at kappa 1.5", mean[0], mean[1])};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"Catalan counts", catalan},
        {"zero-energy geodesic", zero_energy},
        {"minimal potential n=1", minimal_one},
        {"geodesic/rational cross-validation", cross_validation},
        {"cascade identity", cascade},
        {"null-state PDE residuals", pde},
        {"minimizer flow n=1", flow},
        {"determinants and lambda", determinants},
        {"Polyakov-Alvarez", anomaly},
        {"UV cutoff", uv},
        {"SLE return bound", returns},
        {"LDP trend", ldp},
        {"Gibbs concentration", gibbs},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("AC%02zu %s  %-36s %s [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
