#include "loewner_lab/mc_sle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>

#include "loewner_lab/parallel.hpp"

namespace llab::mc_sle {

using conformal::DomainKind;
using conformal::DomainSpec;

void McConfig::validate() const {
    if (n_samples < 1) throw InputError("n_samples must be positive");
    if (!(dt > 0.0)) throw InputError("dt must be positive");
    if (!(T > 0.0)) throw InputError("T must be positive");
    if (!(r > 0.0) || !(r < R)) throw InputError("radii must satisfy 0 < r < R");
}

namespace {

std::vector<double> step_grid(double t_end, double dt, bool geometric) {
    std::vector<double> steps;
    double t = 0.0;
    while (t < t_end * (1.0 - 1e-12)) {
        double d = geometric ? std::max(dt, 0.01 * t) : dt;
        d = std::min(d, t_end - t);
        steps.push_back(d);
        t += d;
    }
    return steps;
}

// Brownian driver sqrt(kappa) B on the grid, slit k driven at the 2/3 point of its step
SlePath brownian_path(double kappa, std::mt19937_64& rng, std::span<const double> steps) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    SlePath p;
    p.maps.reserve(steps.size());
    p.driver.reserve(steps.size());
    std::vector<double> drivers;
    drivers.reserve(steps.size());
    double w = 0.0;
    for (double d : steps) {
        double next = w + std::sqrt(kappa * d) * gauss(rng);
        double u = w + 2.0 * (next - w) / 3.0;
        drivers.push_back(u);
        p.maps.push_back({u, 2.0 * std::sqrt(d)});
        p.driver.push_back(next);
        w = next;
    }
    p.curve = loewner::evolve_slits(steps, drivers, 0.0);
    return p;
}

void check_kappa(double kappa, double hi, const char* what) {
    if (!(kappa > 0.0) || kappa > hi) throw InputError(std::string(what) + ": kappa = " + std::to_string(kappa) + " out of range");
}

}  // namespace

SlePath sample_sle_path(const SLEParams& params, const McConfig& cfg, std::uint64_t index) {
    cfg.validate();
    if (!(params.kappa >= 0.0)) throw InputError("kappa must be non-negative");
    auto rng = stream_rng(cfg.seed, index);
    auto steps = step_grid(cfg.T, cfg.dt, cfg.geometric);
    return brownian_path(params.kappa, rng, steps);
}

Curve sample_sle(const SLEParams& params, const McConfig& cfg) { return sample_sle_path(params, cfg, 0).curve; }

Curve chord_image(const Curve& path, double a, double b) {
    if (!(a != b)) throw InputError("chord ends must differ");
    // z -> (b z + a) / (z + 1): 0 -> a, infinity -> b, orientation kept when a < b
    double s = a < b ? 1.0 : -1.0;
    Curve out;
    out.points.reserve(path.size() + 1);
    for (cplx z : path.points) {
        cplx w = (b * z + a * s) / (z + s);
        if (z.imag() == 0.0) w = cplx(w.real(), 0.0);
        out.points.push_back(w);
    }
    if (std::abs(out.tip() - b) > 0.0) out.points.emplace_back(b, 0.0);
    return out;
}

multichord::Multichord gibbs_multichordal(const std::vector<double>& x, const multichord::LinkPattern& alpha,
                                          const SLEParams& params, const McConfig& cfg, const GibbsOptions& opts) {
    cfg.validate();
    if (!(params.kappa > 0.0) || !(params.kappa < 8.0 / 3.0)) throw InputError("Gibbs sampler needs kappa in (0, 8/3)");
    if (opts.sweeps < 0 || opts.max_rejections < 1 || !(opts.horizon > 0.0)) throw InputError("invalid Gibbs options");
    multichord::Multichord mc = multichord::geodesic_multichord(x, alpha);
    const auto steps = step_grid(opts.horizon, cfg.dt, true);
    std::uint64_t draw = 0;
    for (int s = 0; s < opts.sweeps; ++s) {
        for (std::size_t j = 0; j < mc.chords.size(); ++j) {
            double xa = x[static_cast<std::size_t>(alpha.pairs[j].first - 1)];
            double xb = x[static_cast<std::size_t>(alpha.pairs[j].second - 1)];
            auto phi = conformal::uniformize_component(multichord::complement_of(mc, j), xa, xb);
            bool placed = false;
            for (int attempt = 0; attempt < opts.max_rejections && !placed; ++attempt) {
                auto rng = stream_rng(cfg.seed, draw++);
                SlePath p = brownian_path(params.kappa, rng, steps);
                Curve c;
                c.points.reserve(p.curve.size() + 1);
                c.points.emplace_back(xa, 0.0);
                bool ok = true;
                for (std::size_t k = 1; k < p.curve.size() && ok; ++k) {
                    cplx z = phi.inverse(p.curve.points[k]);
                    ok = std::isfinite(z.real()) && std::isfinite(z.imag()) && z.imag() > 0.0;
                    c.points.push_back(z);
                }
                if (!ok) continue;
                c.points.emplace_back(xb, 0.0);
                for (std::size_t i = 0; i < mc.chords.size() && ok; ++i)
                    if (i != j) ok = !polylines_intersect(c.points, mc.chords[i].points);
                if (!ok) continue;
                mc.chords[j] = std::move(c);
                placed = true;
            }
            if (!placed)
                throw NumericalError("chord " + std::to_string(j + 1) + " was rejected " + std::to_string(opts.max_rejections) +
                                     " times in a row; try a smaller kappa");
        }
    }
    return mc;
}

double c_kappa_bound(double kappa) {
    check_kappa(kappa, 4.0, "c_kappa_bound");
    if (12.0 / kappa < 150.0) return std::tgamma(12.0 / kappa) / (std::tgamma(8.0 / kappa) * std::tgamma(4.0 / kappa + 1.0));
    return std::exp(std::lgamma(12.0 / kappa) - std::lgamma(8.0 / kappa) - std::lgamma(4.0 / kappa + 1.0));
}

std::vector<ReturnResult> return_probabilities(const SLEParams& params, const McConfig& cfg, std::span<const double> radii) {
    cfg.validate();
    check_kappa(params.kappa, 4.0, "return_probability");
    for (double r : radii)
        if (!(r > 0.0) || !(r / cfg.R < 1.0 / 3.0)) throw InputError("return radius must satisfy 0 < r/R < 1/3");
    const double horizon = 20.0 * cfg.R * cfg.R;
    const auto steps = step_grid(horizon, cfg.dt * cfg.R * cfg.R, cfg.geometric);
    // per sample: the closest approach to 0 after the first visit to radius R
    std::vector<double> closest(static_cast<std::size_t>(cfg.n_samples), 1e300);
    parallel_for(cfg.n_samples, cfg.threads, [&](long i) {
        auto rng = stream_rng(cfg.seed, static_cast<std::uint64_t>(i));
        SlePath p = brownian_path(params.kappa, rng, steps);
        const auto& pts = p.curve.points;
        std::size_t k = 0;
        while (k < pts.size() && std::abs(pts[k]) < cfg.R) ++k;
        if (k + 1 >= pts.size()) return;
        std::vector<cplx> tail(pts.begin() + static_cast<long>(k), pts.end());
        closest[static_cast<std::size_t>(i)] = distance_to_polyline(cplx(0.0, 0.0), tail);
    });
    std::vector<ReturnResult> out;
    for (double r : radii) {
        ReturnResult res;
        res.samples = cfg.n_samples;
        res.horizon = horizon;
        for (double d : closest) res.hits += d < r;
        res.p_hat = static_cast<double>(res.hits) / static_cast<double>(res.samples);
        res.stderr_ = std::sqrt(res.p_hat * (1.0 - res.p_hat) / static_cast<double>(res.samples));
        res.bound = c_kappa_bound(params.kappa) * std::pow(r / cfg.R, 8.0 / params.kappa - 1.0);
        res.vacuous = res.hits == 0 && res.bound < 10.0 / static_cast<double>(res.samples);
        res.pass = res.vacuous || res.p_hat <= res.bound + 3.0 * res.stderr_;
        out.push_back(res);
    }
    return out;
}

ReturnResult return_probability(const SLEParams& params, const McConfig& cfg) {
    double r = cfg.r;
    return return_probabilities(params, cfg, std::span<const double>(&r, 1)).front();
}

double excursion_measure(const DomainSpec& domain, Arc a1, Arc a2, double tol) {
    if (!(a1.lo < a1.hi) || !(a2.lo < a2.hi)) throw InputError("arcs need lo < hi");
    double scale = std::max({std::abs(a1.lo), std::abs(a1.hi), std::abs(a2.lo), std::abs(a2.hi), 1.0});
    if (std::min(a1.hi, a2.hi) > std::max(a1.lo, a2.lo) - 1e-9 * scale) throw InputError("arcs overlap or touch");
    if (domain.kind == DomainKind::disc) throw InputError("excursion_measure takes arcs of the real line");
    std::function<double(double, double)> kernel = [](double x, double y) { return 1.0 / ((y - x) * (y - x)); };
    conformal::MapChain chain;
    if (domain.kind == DomainKind::slit_complement && !domain.slits.empty()) {
        for (const auto& s : domain.slits)
            for (cplx e : {s.base(), s.tip()})
                if (e.imag() == 0.0 && ((e.real() >= a1.lo && e.real() <= a1.hi) || (e.real() >= a2.lo && e.real() <= a2.hi)))
                    throw InputError("an arc contains a slit end");
        chain = conformal::component_chain(domain);
        kernel = [&chain](double x, double y) {
            double dx = conformal::boundary_derivative(chain, x), dy = conformal::boundary_derivative(chain, y);
            return dx * dy / std::norm(chain(cplx(x, 0.0)) - chain(cplx(y, 0.0)));
        };
    }
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto inner = [&](double x) { return GK::integrate([&](double y) { return kernel(x, y); }, a2.lo, a2.hi, 15, tol); };
    return GK::integrate(inner, a1.lo, a1.hi, 15, tol);
}

double cone_rate(double theta) {
    if (!(theta > 0.0) || !(theta < kPi / 2)) throw InputError("cone angle must be in (0, pi/2)");
    return 8.0 * std::log(std::sin(theta));
}

std::vector<LdpRow> ldp_decay_probe(const LdpEvent& event, std::span<const double> kappas, const McConfig& cfg, bool* trend_ok) {
    cfg.validate();
    if (kappas.empty()) throw InputError("no kappas given");
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        check_kappa(kappas[i], 8.0 / 3.0, "ldp_decay_probe");
        if (kappas[i] >= 8.0 / 3.0) throw InputError("ldp_decay_probe needs kappa < 8/3");
        if (i > 0 && !(kappas[i] < kappas[i - 1])) throw InputError("kappas must be decreasing");
    }
    const bool cone = event.kind == LdpEvent::Kind::exit_cone;
    if (cone) (void)cone_rate(event.theta);
    if (cone && !(event.t0 >= 0.0 && event.t0 < cfg.T)) throw InputError("cone window start must lie in [0, T)");
    if (!cone && !(event.radius > 0.0)) throw InputError("ball radius must be positive");
    const auto steps = step_grid(cfg.T, cfg.dt, cfg.geometric);
    std::vector<LdpRow> rows;
    for (double kappa : kappas) {
        std::vector<char> hit(static_cast<std::size_t>(cfg.n_samples), 0);
        // the same Brownian streams for every kappa
        parallel_for(cfg.n_samples, cfg.threads, [&](long i) {
            auto rng = stream_rng(cfg.seed, static_cast<std::uint64_t>(i));
            SlePath p = brownian_path(kappa, rng, steps);
            bool h = cone ? loewner::exits_cone(p.curve, event.theta, event.t0, cfg.T)
                          : distance_to_polyline(event.center, p.curve.points) <= event.radius;
            hit[static_cast<std::size_t>(i)] = h;
        });
        LdpRow row;
        row.kappa = kappa;
        for (char h : hit) row.hits += h;
        row.p_hat = static_cast<double>(row.hits) / static_cast<double>(cfg.n_samples);
        row.zero_hits = row.hits == 0;
        if (row.zero_hits) {
            row.log_p = row.klogp = -std::numeric_limits<double>::infinity();
            row.stderr_ = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.log_p = std::log(row.p_hat);
            row.klogp = kappa * row.log_p;
            row.stderr_ = kappa * std::sqrt((1.0 - row.p_hat) / (static_cast<double>(cfg.n_samples) * row.p_hat));
        }
        rows.push_back(row);
    }
    if (trend_ok) {
        bool ok = true;
        const LdpRow* prev = nullptr;
        int used = 0;
        for (const auto& r : rows) {
            if (r.zero_hits) continue;
            ++used;
            if (prev) {
                double sep = 2.0 * std::hypot(prev->stderr_, r.stderr_);
                ok = ok && prev->klogp - r.klogp > sep;
                if (cone) ok = ok && std::abs(r.klogp - cone_rate(event.theta)) < std::abs(prev->klogp - cone_rate(event.theta));
            }
            prev = &r;
        }
        *trend_ok = ok && used >= 2;
    }
    return rows;
}

}  // namespace llab::mc_sle
