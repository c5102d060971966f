#include "loewner_lab/potential.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numeric>

#include "loewner_lab/mc_sle.hpp"
#include "loewner_lab/parallel.hpp"

namespace llab::potential {

using conformal::DomainSpec;

namespace {

double end_a(const Multichord& mc, std::size_t j) { return mc.x[static_cast<std::size_t>(mc.pattern.pairs[j].first - 1)]; }
double end_b(const Multichord& mc, std::size_t j) { return mc.x[static_cast<std::size_t>(mc.pattern.pairs[j].second - 1)]; }

void check_multichord(const Multichord& mc) {
    multichord::validate_points(mc.x, mc.pattern);
    if (mc.chords.size() != mc.pattern.n()) throw InputError("multichord has " + std::to_string(mc.chords.size()) + " chords for a pattern of size " + std::to_string(mc.pattern.n()));
    for (std::size_t j = 0; j < mc.chords.size(); ++j) {
        const Curve& c = mc.chords[j];
        if (c.size() < 3) throw InputError("chord " + std::to_string(j + 1) + " needs at least three vertices");
        bool fwd = std::abs(c.base() - end_a(mc, j)) < 1e-6 && std::abs(c.tip() - end_b(mc, j)) < 1e-6;
        if (!fwd) throw InputError("chord " + std::to_string(j + 1) + " does not run from x_a to x_b of its pair");
    }
}

// component of H minus the chords in `others` that contains chord j
DomainSpec domain_without(const Multichord& mc, std::size_t j, const std::vector<std::size_t>& others) {
    if (others.empty()) return DomainSpec::half_plane();
    std::vector<Curve> slits;
    for (std::size_t i : others) slits.push_back(mc.chords[i]);
    const Curve& c = mc.chords[j];
    return DomainSpec::slit_complement(std::move(slits), c.points[c.size() / 2]);
}

// I_D(gamma_j) / 12 - log(P_D) / 4
double single_potential(const Multichord& mc, std::size_t j, const DomainSpec& dom) {
    double xa = end_a(mc, j), xb = end_b(mc, j);
    double e = conformal::chord_energy(mc.chords[j], dom, xa, xb).energy;
    return e / 12.0 - 0.25 * std::log(conformal::poisson_kernel(dom, xa, xb));
}

// each chord redrawn as the geodesic of its complement at a finer sampling; the energy
// evaluation error is first order in vertex spacing, the fixed point is not the bottleneck
Multichord refined(const Multichord& mc, int samples, double log_span) {
    Multichord out = mc;
    for (std::size_t j = 0; j < mc.chords.size(); ++j)
        out.chords[j] = conformal::hyperbolic_geodesic(multichord::complement_of(mc, j), end_a(mc, j), end_b(mc, j), samples, log_span);
    return out;
}

std::vector<std::size_t> default_order(std::size_t n) {
    std::vector<std::size_t> o(n);
    std::iota(o.begin(), o.end(), 0);
    return o;
}

// H by peeling: chord order[k] measured in the component left by order[k+1..]
double peel_H(const Multichord& mc, std::span<const std::size_t> order) {
    double h = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        std::vector<std::size_t> rest(order.begin() + static_cast<long>(k) + 1, order.end());
        h += single_potential(mc, order[k], domain_without(mc, order[k], rest));
    }
    return h;
}

double free_sum(const Multichord& mc) {
    double s = 0.0;
    for (std::size_t j = 0; j < mc.chords.size(); ++j) s += single_potential(mc, j, DomainSpec::half_plane());
    return s;
}

// Schwarzian of a chain at a real point, from Taylor coefficients on a circle of radius rho
// (lower half by reflection)
double schwarzian_at(const conformal::MapChain& phi, double u, double rho) {
    constexpr int M = 32;
    cplx c[4] = {};
    for (int k = 0; k < M; ++k) {
        double th = 2.0 * kPi * k / M;
        cplx e = std::polar(1.0, th);
        cplx z = cplx(u, 0.0) + rho * e;
        cplx f;
        if (k == 0 || 2 * k == M) f = cplx(phi(cplx(z.real(), 0.0)).real(), 0.0);
        else if (2 * k < M) f = phi(z);
        else f = std::conj(phi(std::conj(z)));
        for (int m = 1; m <= 3; ++m) c[m] += f * std::pow(std::conj(e), m);
    }
    for (int m = 1; m <= 3; ++m) c[m] /= M * std::pow(rho, m);
    cplx r2 = c[2] / c[1];
    return (6.0 * c[3] / c[1] - 6.0 * r2 * r2).real();
}

}  // namespace

nlohmann::json PotentialReport::to_json() const {
    nlohmann::json j;
    j["H"] = H;
    j["terms"] = {{"energy", energy_terms}, {"loop", loop_term}, {"poisson", poisson_terms}};
    j["method"] = method == LoopMethod::deterministic ? "deterministic" : "monte_carlo";
    if (stderr_) j["stderr"] = *stderr_;
    return j;
}

double loop_term_deterministic(const Multichord& mc, std::span<const std::size_t> order) {
    check_multichord(mc);
    const std::size_t n = mc.chords.size();
    if (n == 1) return 0.0;
    std::vector<std::size_t> o = order.empty() ? default_order(n) : std::vector<std::size_t>(order.begin(), order.end());
    std::vector<std::size_t> sorted = o;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != default_order(n)) throw InputError("peeling order must be a permutation of the chords");
    return peel_H(mc, o) - free_sum(mc);
}

double peeling_spread(const Multichord& mc) {
    check_multichord(mc);
    auto o = default_order(mc.chords.size());
    double lo = 1e300, hi = -1e300;
    double base = free_sum(mc);
    do {
        double m = peel_H(mc, o) - base;
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    } while (std::next_permutation(o.begin(), o.end()));
    return hi - lo;
}

double loop_mass_along_chain(std::span<const loewner::SlitMap> chain, const std::vector<Curve>& obstacles) {
    std::vector<Curve> k = obstacles;
    for (auto& c : k) c.capacity_times.clear();
    // Schwarzian of the uniformizer of the current complement at u
    auto s_at = [&k](double u) {
        double dist = 1e300;
        for (const auto& c : k) dist = std::min(dist, distance_to_polyline(cplx(u, 0.0), c.points));
        if (!(dist > 0.0)) throw NumericalError("curve touched an obstacle");
        DomainSpec dom = DomainSpec::slit_complement(k, cplx(u, 1e6 + 1e3 * dist));
        return schwarzian_at(conformal::component_chain(dom), u, 0.5 * dist);
    };
    double total = 0.0;
    for (const auto& m : chain) {
        double before = s_at(m.u);
        for (auto& c : k)
            for (auto& p : c.points) {
                bool real = p.imag() == 0.0;
                p = m.forward(p);
                if (real) p = cplx(p.real(), 0.0);
            }
        total += 0.5 * (before + s_at(m.u)) * m.dt();
    }
    return -total / 3.0;
}

McEstimate loop_term_mc(const Multichord& mc, const LoopMcOptions& opts) {
    check_multichord(mc);
    if (!(opts.mesh > 0.0) || !(opts.t_cutoff > 0.0) || opts.n_samples < 2) throw InputError("loop MC needs mesh, cutoff > 0 and at least two samples");
    const std::size_t n = mc.chords.size();
    if (n == 1) return {0.0, 0.0};
    if (n > 16) throw InputError("loop MC supports at most 16 chords");
    const double span = mc.x.back() - mc.x.front();
    const double re0 = mc.x.front() - span, re1 = mc.x.back() + span, im1 = 1.5 * span;
    const double t_max = 4.0 * span * span;
    if (opts.t_cutoff >= t_max) throw InputError("loop cutoff exceeds the largest loop duration");
    const double log_range = std::log(t_max / opts.t_cutoff);
    const double area = (re1 - re0) * im1;

    // segment grid over the chords
    double gx0 = 1e300, gx1 = -1e300, gy1 = 0.0;
    for (const auto& c : mc.chords)
        for (cplx p : c.points) {
            gx0 = std::min(gx0, p.real());
            gx1 = std::max(gx1, p.real());
            gy1 = std::max(gy1, p.imag());
        }
    const double cell = std::max(opts.mesh, span / 256.0);
    const int nx = static_cast<int>((gx1 - gx0) / cell) + 1, ny = static_cast<int>(gy1 / cell) + 1;
    std::vector<std::vector<std::pair<int, int>>> grid(static_cast<std::size_t>(nx * ny));
    auto cells = [&](cplx a, cplx b, auto&& visit) {
        int i0 = std::max(0, static_cast<int>((std::min(a.real(), b.real()) - gx0) / cell));
        int i1 = std::min(nx - 1, static_cast<int>((std::max(a.real(), b.real()) - gx0) / cell));
        int j0 = std::max(0, static_cast<int>(std::min(a.imag(), b.imag()) / cell));
        int j1 = std::min(ny - 1, static_cast<int>(std::max(a.imag(), b.imag()) / cell));
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j) visit(i * ny + j);
    };
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t s = 0; s + 1 < mc.chords[c].size(); ++s)
            cells(mc.chords[c].points[s], mc.chords[c].points[s + 1],
                  [&](int id) { grid[static_cast<std::size_t>(id)].emplace_back(static_cast<int>(c), static_cast<int>(s)); });
    auto crosses = [](cplx a, cplx b, cplx c, cplx d) {
        auto orient = [](cplx p, cplx q, cplx r) { return (q.real() - p.real()) * (r.imag() - p.imag()) - (q.imag() - p.imag()) * (r.real() - p.real()); };
        double d1 = orient(c, d, a), d2 = orient(c, d, b), d3 = orient(a, b, c), d4 = orient(a, b, d);
        return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
    };

    std::vector<double> contrib(static_cast<std::size_t>(opts.n_samples), 0.0);
    parallel_for(opts.n_samples, opts.threads, [&](long idx) {
        auto rng = stream_rng(opts.seed, static_cast<std::uint64_t>(idx));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        cplx root(re0 + (re1 - re0) * uni(rng), im1 * uni(rng));
        double t = opts.t_cutoff * std::exp(log_range * uni(rng));
        const long steps = std::clamp(static_cast<long>(std::ceil(4.0 * t / (opts.mesh * opts.mesh))), 8L, 4000L);
        const double var = 2.0 * t / static_cast<double>(steps);  // per coordinate per step, speed 2
        // Brownian bridge back to the root, generated step by step so exits stop early
        cplx z = root, prev = root;
        std::uint32_t hit = 0;
        for (long k = 0; k < steps; ++k) {
            long left = steps - k;
            cplx next;
            if (left == 1) {
                next = root;
            } else {
                double s = std::sqrt(var * static_cast<double>(left - 1) / static_cast<double>(left));
                next = z + (root - z) / static_cast<double>(left) + cplx(s * gauss(rng), s * gauss(rng));
            }
            if (next.imag() <= 0.0) return;
            prev = z;
            z = next;
            cells(prev, z, [&](int id) {
                for (auto [c, s] : grid[static_cast<std::size_t>(id)]) {
                    if (hit >> c & 1u) continue;
                    const auto& p = mc.chords[static_cast<std::size_t>(c)].points;
                    if (crosses(prev, z, p[static_cast<std::size_t>(s)], p[static_cast<std::size_t>(s) + 1])) hit |= 1u << c;
                }
            });
        }
        int count = std::popcount(hit);
        if (count >= 2) contrib[static_cast<std::size_t>(idx)] = area * log_range / (4.0 * kPi * t) * (count - 1);
    });
    double mean = 0.0, sq = 0.0;
    for (double v : contrib) mean += v;
    mean /= static_cast<double>(contrib.size());
    for (double v : contrib) sq += (v - mean) * (v - mean);
    double var = sq / static_cast<double>(contrib.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(contrib.size()))};
}

PotentialReport loewner_potential(const Multichord& mc, LoopMethod method, const LoopMcOptions& mc_opts) {
    check_multichord(mc);
    PotentialReport r;
    r.method = method;
    for (std::size_t j = 0; j < mc.chords.size(); ++j) {
        double xa = end_a(mc, j), xb = end_b(mc, j);
        r.energy_terms.push_back(conformal::chord_energy(mc.chords[j], DomainSpec::half_plane(), xa, xb).energy / 12.0);
        r.poisson_terms.push_back(0.5 * std::log(std::abs(xb - xa)));
    }
    if (method == LoopMethod::deterministic) {
        r.loop_term = loop_term_deterministic(mc);
    } else {
        McEstimate e = loop_term_mc(mc, mc_opts);
        r.loop_term = e.value;
        r.stderr_ = e.stderr_;
    }
    r.H = r.loop_term;
    for (double v : r.energy_terms) r.H += v;
    for (double v : r.poisson_terms) r.H += v;
    return r;
}

double minimal_potential(const std::vector<double>& x, const LinkPattern& alpha, const GeodesicOptions& opts) {
    multichord::validate_points(x, alpha);
    if (alpha.n() == 1) return 0.5 * std::log(x[1] - x[0]);
    Multichord mc = multichord::geodesic_multichord(x, alpha, opts);
    if (opts.eval_refine > 1) mc = refined(mc, opts.eval_refine * opts.samples, opts.log_span);
    return peel_H(mc, default_order(mc.chords.size()));
}

double minimality_margin(const std::vector<double>& x, const LinkPattern& alpha, int count, std::uint64_t seed,
                         double amplitude) {
    Multichord geo = multichord::geodesic_multichord(x, alpha);
    double m = peel_H(geo, default_order(geo.chords.size()));
    double margin = 1e300;
    for (int k = 0; k < count; ++k) {
        auto rng = stream_rng(seed, static_cast<std::uint64_t>(k));
        std::uniform_real_distribution<double> amp(-amplitude, amplitude), where(0.2, 0.8);
        Multichord p = geo;
        for (auto& c : p.chords) {
            double a = amp(rng), centre = where(rng);
            const std::size_t N = c.size();
            for (std::size_t i = 1; i + 1 < N; ++i) {
                double s = static_cast<double>(i) / static_cast<double>(N - 1);
                double bump = std::exp(-std::pow((s - centre) / 0.15, 2.0));
                c.points[i] = cplx(c.points[i].real(), c.points[i].imag() * (1.0 + a * bump));
            }
        }
        for (std::size_t i = 0; i < p.chords.size(); ++i)
            for (std::size_t l = i + 1; l < p.chords.size(); ++l)
                if (polylines_intersect(p.chords[i].points, p.chords[l].points)) throw NumericalError("perturbation made chords collide; lower the amplitude");
        margin = std::min(margin, loewner_potential(p).H - m);
    }
    return margin;
}

double cascade_defect(const Multichord& mc, std::size_t j) {
    check_multichord(mc);
    const std::size_t n = mc.chords.size();
    if (j >= n) throw InputError("chord index out of range");
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < n; ++i)
        if (i != j) others.push_back(i);
    double whole = loewner_potential(mc).H;
    double own = single_potential(mc, j, domain_without(mc, j, others));
    if (n == 1) return std::abs(whole - own);
    // the remaining chords as a multichord of their own 2n - 2 points
    Multichord rest;
    int ia = mc.pattern.pairs[j].first, ib = mc.pattern.pairs[j].second;
    auto shift = [&](int k) { return k - (k > ia) - (k > ib); };
    for (std::size_t k = 0; k < mc.x.size(); ++k)
        if (static_cast<int>(k) + 1 != ia && static_cast<int>(k) + 1 != ib) rest.x.push_back(mc.x[k]);
    for (std::size_t i : others) {
        rest.pattern.pairs.emplace_back(shift(mc.pattern.pairs[i].first), shift(mc.pattern.pairs[i].second));
        rest.chords.push_back(mc.chords[i]);
    }
    return std::abs(whole - own - loewner_potential(rest).H);
}

double multichord_energy(const Multichord& mc) {
    return 12.0 * (loewner_potential(mc).H - minimal_potential(mc.x, mc.pattern));
}

double null_state_residual(const std::vector<double>& x, int j, std::span<const double> grad) {
    if (j < 1 || j > static_cast<int>(x.size())) throw InputError("index j out of range");
    const std::size_t jj = static_cast<std::size_t>(j - 1);
    double r = 0.5 * grad[jj] * grad[jj];
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i == jj) continue;
        double d = x[i] - x[jj];
        r -= 2.0 / d * grad[i] + 6.0 / (d * d);
    }
    return r;
}

std::vector<double> potential_gradient(const std::vector<double>& x, const LinkPattern& alpha, double h,
                                       const GeodesicOptions& opts) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = 12.0 * (minimal_potential(xp, alpha, opts) - minimal_potential(xm, alpha, opts)) / (2.0 * h);
    }
    return g;
}

double pde_residual(const std::vector<double>& x, const LinkPattern& alpha, int j, double h_fd, const GeodesicOptions& opts) {
    multichord::validate_points(x, alpha);
    double gap = 1e300;
    for (std::size_t i = 1; i < x.size(); ++i) gap = std::min(gap, x[i] - x[i - 1]);
    if (!(h_fd > 0.0) || h_fd >= 0.5 * gap) throw InputError("h_fd must be positive and below half the smallest gap");
    auto g = potential_gradient(x, alpha, h_fd, opts);
    return null_state_residual(x, j, g);
}

FlowResult minimizer_flow(const std::vector<double>& x, const LinkPattern& alpha, int j, double dt, const FlowOptions& opts) {
    multichord::validate_points(x, alpha);
    if (j < 1 || j > static_cast<int>(alpha.n())) throw InputError("chord index out of range");
    if (!(dt > 0.0)) throw InputError("dt must be positive");
    const std::size_t a = static_cast<std::size_t>(alpha.pairs[static_cast<std::size_t>(j - 1)].first - 1);
    double gap0 = 1e300;
    for (std::size_t i = 1; i < x.size(); ++i) gap0 = std::min(gap0, x[i] - x[i - 1]);
    const double h = 1e-3 * gap0;

    using State = std::vector<double>;  // marked points with x_a replaced by W
    auto rhs = [&](const State& y, State& dy, double) {
        dy.assign(y.size(), 0.0);
        double w = y[a];
        double room = 1e300;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (i != a) room = std::min(room, std::abs(y[i] - w));
        bool ordered = true;
        for (std::size_t i = 1; i < y.size(); ++i) ordered = ordered && y[i] > y[i - 1];
        if (!ordered) {
            // trial stage past a collision: a huge error estimate makes the stepper shrink the step
            dy.assign(y.size(), 1e12);
            return;
        }
        const double hh = std::min(h, 0.25 * room);
        auto yp = y, ym = y;
        yp[a] += hh;
        ym[a] -= hh;
        dy[a] = -12.0 * (minimal_potential(yp, alpha, opts.geodesic) - minimal_potential(ym, alpha, opts.geodesic)) / (2.0 * hh);
        for (std::size_t i = 0; i < y.size(); ++i)
            if (i != a) dy[i] = 2.0 / (y[i] - w);
    };
    auto min_gap_to_w = [&](const State& y) {
        double g = 1e300;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (i != a) g = std::min(g, std::abs(y[i] - y[a]));
        return g;
    };
    auto to_flow = [&](const State& y, double t) {
        FlowState s;
        s.t = t;
        s.W = y[a];
        for (std::size_t i = 0; i < y.size(); ++i)
            if (i != a) s.V.push_back(y[i]);
        return s;
    };

    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled(1e-12, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
    State y = x;
    double t = 0.0, step = std::min(dt, 1e-3);
    FlowResult out;
    out.states.push_back(to_flow(y, 0.0));
    double next_out = dt;
    const double stop_gap = opts.gap_stop * min_gap_to_w(y);
    std::vector<double> times{0.0}, drive{y[a]};
    double prev_gap = min_gap_to_w(y), t_prev = 0.0;
    auto ordered = [](const State& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] > v[i - 1])) return false;
        return true;
    };
    while (t < opts.t_max) {
        double target = std::min(next_out, opts.t_max);
        double h_try = std::min(step, target - t);
        State trial = y;
        double t_trial = t, h_used = h_try;
        if (stepper.try_step(rhs, trial, t_trial, h_used) == odeint::fail) {
            step = h_used;
            continue;
        }
        if (!ordered(trial) || min_gap_to_w(trial) < 0.5 * stop_gap) {
            // crossed or overshot the stopping gap: retry shorter
            step = 0.5 * h_try;
            if (step < 1e-15) throw NumericalError("minimizer flow step underflow");
            continue;
        }
        prev_gap = min_gap_to_w(y);
        t_prev = t;
        y = trial;
        t = t_trial;
        step = h_used;
        times.push_back(t);
        drive.push_back(y[a]);
        if (std::abs(t - next_out) < 1e-12 * std::max(1.0, t)) {
            out.states.push_back(to_flow(y, t));
            next_out += dt;
        }
        if (min_gap_to_w(y) <= stop_gap) {
            // (V - W)^2 is nearly linear in t close to a collision
            double g1 = std::pow(min_gap_to_w(y), 2.0);
            double g0 = prev_gap * prev_gap;
            double rate = (g0 - g1) / (t - t_prev);
            out.lifetime = rate > 0.0 ? t + g1 / rate : t;
            out.lifetime_reached = true;
            out.states.push_back(to_flow(y, t));
            break;
        }
    }
    // the trace from the accepted steps plus the dense samples
    std::vector<std::pair<double, double>> tw;
    for (std::size_t i = 0; i < times.size(); ++i) tw.emplace_back(times[i], drive[i]);
    for (const auto& s : out.states) tw.emplace_back(s.t, s.W);
    std::sort(tw.begin(), tw.end());
    tw.erase(std::unique(tw.begin(), tw.end(), [](auto& p, auto& q) { return q.first - p.first < 1e-14; }), tw.end());
    std::vector<double> tt, ww;
    for (auto [t, w] : tw) {
        tt.push_back(t);
        ww.push_back(w);
    }
    // slit steps with T - t ~ (1 - s)^4: near a collision the trace height goes like (T - t)^(1/4)
    const double T_end = tt.back();
    // W is interpolated linearly in -sqrt(T_life - t), which follows the square-root profile
    const double T_life = out.lifetime_reached ? std::max(out.lifetime, T_end) : std::numeric_limits<double>::infinity();
    auto warp = [&](double t) { return std::isfinite(T_life) ? std::sqrt(T_life) - std::sqrt(T_life - t) : t; };
    std::vector<double> tw_warped;
    for (double t : tt) tw_warped.push_back(warp(t));
    loewner::DrivingFunction drv_w(tw_warped, ww);
    auto drv = [&](double t) { return drv_w(warp(t)); };
    const int N = 4000;
    std::vector<double> steps, drivers;
    double t_prev_step = 0.0;
    for (int k = 1; k <= N; ++k) {
        double tk = T_end * (1.0 - std::pow(1.0 - static_cast<double>(k) / N, 4.0));
        double d = tk - t_prev_step;
        if (d <= 0.0) continue;
        steps.push_back(d);
        drivers.push_back(drv(t_prev_step + 2.0 * d / 3.0));
        t_prev_step = tk;
    }
    out.trace = loewner::evolve_slits(steps, drivers, ww.front());
    return out;
}

namespace {

// polyline resampled to `count` vertices evenly in arc length, ends kept
Curve resample(const Curve& c, int count) {
    std::vector<double> len{0.0};
    for (std::size_t i = 1; i < c.size(); ++i) len.push_back(len.back() + std::abs(c.points[i] - c.points[i - 1]));
    Curve out;
    std::size_t seg = 1;
    for (int k = 0; k < count; ++k) {
        double s = len.back() * k / (count - 1);
        while (seg + 1 < c.size() && len[seg] < s) ++seg;
        double d = len[seg] - len[seg - 1];
        double f = d > 0.0 ? (s - len[seg - 1]) / d : 0.0;
        out.points.push_back(c.points[seg - 1] + f * (c.points[seg] - c.points[seg - 1]));
    }
    out.points.front() = c.points.front();
    out.points.back() = c.points.back();
    return out;
}

}  // namespace

std::vector<ProbeRow> partition_limit_probe(const std::vector<double>& x, const LinkPattern& alpha,
                                            std::span<const double> kappas, long n_samples, std::uint64_t seed, int threads) {
    multichord::validate_points(x, alpha);
    if (n_samples < 2) throw InputError("probe needs at least two samples");
    const std::size_t n = alpha.n();
    double sum_log_p = 0.0;
    for (const auto& pr : alpha.pairs) sum_log_p += -2.0 * std::log(x[static_cast<std::size_t>(pr.second - 1)] - x[static_cast<std::size_t>(pr.first - 1)]);
    std::vector<ProbeRow> rows;
    for (double kappa : kappas) {
        if (!(kappa > 0.0) || !(kappa < 8.0 / 3.0)) throw InputError("probe needs kappa in (0, 8/3)");
        const double c = loewner::SLEParams{kappa}.central_charge();
        mc_sle::McConfig cfg;
        cfg.seed = seed;
        cfg.T = 2500.0;
        std::vector<double> weight(static_cast<std::size_t>(n_samples), 0.0);
        parallel_for(n_samples, threads, [&](long i) {
            std::vector<mc_sle::SlePath> paths;
            std::vector<Curve> chords;
            for (std::size_t j = 0; j < n; ++j) {
                paths.push_back(mc_sle::sample_sle_path({kappa}, cfg, static_cast<std::uint64_t>(i) * n + j));
                double a = x[static_cast<std::size_t>(alpha.pairs[j].first - 1)], b = x[static_cast<std::size_t>(alpha.pairs[j].second - 1)];
                chords.push_back(mc_sle::chord_image(paths.back().curve, a, b));
            }
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t l = j + 1; l < n; ++l)
                    if (polylines_intersect(chords[j].points, chords[l].points)) return;
            // m = sum_k mass of loops hitting chord k and some later chord
            double m = 0.0;
            try {
                for (std::size_t k = 0; k + 1 < n; ++k) {
                    double a = x[static_cast<std::size_t>(alpha.pairs[k].first - 1)], b = x[static_cast<std::size_t>(alpha.pairs[k].second - 1)];
                    std::vector<Curve> later;
                    for (std::size_t l = k + 1; l < n; ++l) {
                        Curve o = resample(chords[l], 80);
                        for (auto& p : o.points) {
                            bool real = p.imag() == 0.0;
                            p = (p - a) / (b - p);
                            if (real) p = cplx(p.real(), 0.0);
                        }
                        later.push_back(std::move(o));
                    }
                    m += loop_mass_along_chain(paths[k].maps, later);
                }
            } catch (const NumericalError&) {
                return;
            }
            weight[static_cast<std::size_t>(i)] = std::exp(0.5 * c * m);
        });
        ProbeRow row;
        row.kappa = kappa;
        row.samples = n_samples;
        double mean = 0.0, sq = 0.0;
        for (double w : weight) {
            mean += w;
            row.accepted += w > 0.0;
        }
        mean /= static_cast<double>(n_samples);
        for (double w : weight) sq += (w - mean) * (w - mean);
        double sd = std::sqrt(sq / static_cast<double>(n_samples - 1));
        row.klogZ = 0.5 * (6.0 - kappa) * sum_log_p + kappa * std::log(mean);
        row.stderr_ = mean > 0.0 ? kappa * sd / (std::sqrt(static_cast<double>(n_samples)) * mean) : std::numeric_limits<double>::infinity();
        rows.push_back(row);
    }
    return rows;
}

}  // namespace llab::potential
