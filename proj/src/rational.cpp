#include "loewner_lab/rational.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

namespace llab::multichord {

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly poly_add(const Poly& a, const Poly& b, double sb) {
    Poly r(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += sb * b[i];
    return r;
}

Poly poly_derivative(const Poly& a) {
    if (a.size() <= 1) return {0.0};
    Poly r(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = static_cast<double>(i) * a[i];
    return r;
}

cplx poly_eval(const Poly& a, cplx z) {
    cplx r = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) r = r * z + *it;
    return r;
}

Poly poly_trim(Poly a, double rel) {
    double big = 0.0;
    for (double c : a) big = std::max(big, std::abs(c));
    while (a.size() > 1 && std::abs(a.back()) <= rel * big) a.pop_back();
    return a;
}

std::vector<cplx> poly_roots(const Poly& a0) {
    Poly a = poly_trim(a0);
    const std::size_t d = a.size() - 1;
    if (d == 0) return {};
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) comp(0, static_cast<Eigen::Index>(i)) = -a[d - 1 - i] / a[d];
    for (std::size_t i = 1; i < d; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<cplx> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()[i]);
    std::sort(out.begin(), out.end(), [](cplx u, cplx v) { return u.real() < v.real(); });
    return out;
}

cplx RationalFn::operator()(cplx z) const {
    cplx den = poly_eval(q, z);
    if (den == cplx(0.0)) return complex_infinity();
    return poly_eval(p, z) / den;
}

int RationalFn::degree() const {
    return static_cast<int>(std::max(poly_trim(p).size(), poly_trim(q).size())) - 1;
}

Poly wronskian(const RationalFn& f) {
    return poly_trim(poly_add(poly_mul(poly_derivative(f.p), f.q), poly_mul(f.p, poly_derivative(f.q)), -1.0));
}

RationalFn normalize_endpoints(const RationalFn& f, double x1, double x2n) {
    // h -> [l_A(P, Q) : l_B(P, Q)] with l_A killing the value at x1, l_B the value at x2n
    double pa = poly_eval(f.p, x1).real(), qa = poly_eval(f.q, x1).real();
    double pb = poly_eval(f.p, x2n).real(), qb = poly_eval(f.q, x2n).real();
    std::size_t d = std::max(f.p.size(), f.q.size());
    double lp = d <= f.p.size() ? f.p[d - 1] : 0.0;
    double lq = d <= f.q.size() ? f.q[d - 1] : 0.0;
    double la = qa * lp - pa * lq;
    double lb = qb * lp - pb * lq;
    if (std::abs(la) <= 1e-300 || std::abs(lb) <= 1e-300)
        throw NumericalError("value at infinity coincides with a value at an end point; cannot normalize");
    RationalFn g;
    g.p = poly_trim(poly_add(poly_mul(f.p, {qa / la}), poly_mul(f.q, {-pa / la})));
    g.q = poly_trim(poly_add(poly_mul(f.p, {qb / lb}), poly_mul(f.q, {-pb / lb})));
    g.normalization = "endpoints";
    return g;
}

bool equivalent(const RationalFn& f, const RationalFn& g, double x1, double x2n, double tol) {
    RationalFn a = normalize_endpoints(f, x1, x2n), b = normalize_endpoints(g, x1, x2n);
    if (a.p.size() != b.p.size() || a.q.size() != b.q.size()) return false;
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < a.p.size(); ++i) {
        scale = std::max({scale, std::abs(a.p[i]), std::abs(a.q[i])});
        diff = std::max({diff, std::abs(a.p[i] - b.p[i]), std::abs(a.q[i] - b.q[i])});
    }
    return diff <= tol * (1.0 + scale);
}

namespace {

// Works in s = (z - c) / r where the end points sit at -1 and 1.
struct Frame {
    double c, r;
    std::vector<double> s;  // scaled marked points
    explicit Frame(const std::vector<double>& x)
        : c(0.5 * (x.front() + x.back())), r(0.5 * (x.back() - x.front())) {
        for (double v : x) s.push_back((v - c) / r);
    }
};

// P(alpha + beta t) as a polynomial in t
Poly compose_affine(const Poly& p, double alpha, double beta) {
    Poly out{0.0}, lin{alpha, beta};
    for (auto it = p.rbegin(); it != p.rend(); ++it) out = poly_add(poly_mul(out, lin), Poly{*it});
    out.resize(p.size());  // the seed zero raised the degree by one
    return out;
}

// monic tails: P = (s + 1)^2 (s^{n-1} + sum u_i s^i), Q = (s - 1)^2 (s^{n-1} + sum v_i s^i)
struct Tails {
    Poly p, q;
};

Tails build(const Eigen::VectorXd& u, std::size_t n) {
    Poly pt(n, 0.0), qt(n, 0.0);
    pt[n - 1] = qt[n - 1] = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        pt[i] = u[static_cast<Eigen::Index>(i)];
        qt[i] = u[static_cast<Eigen::Index>(n - 1 + i)];
    }
    return {poly_mul({1.0, 2.0, 1.0}, pt), poly_mul({1.0, -2.0, 1.0}, qt)};
}

RationalFn to_z(const Tails& t, const Frame& fr) {
    // h(z) = P_s((z - c) / r) / Q_s((z - c) / r); rescale so that Q stays monic in z
    std::size_t d = t.p.size() - 1;
    double k = std::pow(fr.r, -static_cast<double>(d));
    RationalFn f;
    f.p = poly_mul(compose_affine(t.p, -fr.c / fr.r, 1.0 / fr.r), {1.0 / k});
    f.q = poly_mul(compose_affine(t.q, -fr.c / fr.r, 1.0 / fr.r), {1.0 / k});
    f.normalization = "endpoints";
    return f;
}

// divide by (s - root)^2, dropping the remainder
Poly deflate2(Poly a, double root) {
    for (int rep = 0; rep < 2; ++rep) {
        Poly q(a.size() - 1);
        double carry = 0.0;
        for (std::size_t i = a.size() - 1; i >= 1; --i) {
            carry = a[i] + carry * root;
            q[i - 1] = carry;
            if (i == 1) break;
        }
        a = q;
    }
    return a;
}

Eigen::VectorXd to_unknowns(const RationalFn& f, const Frame& fr, std::size_t n) {
    RationalFn g = normalize_endpoints(f, fr.c - fr.r, fr.c + fr.r);
    Poly ps = compose_affine(g.p, fr.c, fr.r), qs = compose_affine(g.q, fr.c, fr.r);
    ps.resize(n + 2, 0.0);
    qs.resize(n + 2, 0.0);
    double lead = qs[n + 1];
    if (std::abs(lead) < 1e-300) throw NumericalError("rational seed has the wrong degree");
    for (auto& v : ps) v /= lead;
    for (auto& v : qs) v /= lead;
    Poly pt = deflate2(ps, -1.0), qt = deflate2(qs, 1.0);
    Eigen::VectorXd u(static_cast<Eigen::Index>(2 * (n - 1)));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        u[static_cast<Eigen::Index>(i)] = pt[i];
        u[static_cast<Eigen::Index>(n - 1 + i)] = qt[i];
    }
    return u;
}

Eigen::VectorXd residual(const Eigen::VectorXd& u, const Frame& fr, std::size_t n) {
    Tails t = build(u, n);
    Poly w = poly_add(poly_mul(poly_derivative(t.p), t.q), poly_mul(t.p, poly_derivative(t.q)), -1.0);
    Eigen::VectorXd res(u.size());
    for (std::size_t j = 1; j + 1 < 2 * n; ++j) res[static_cast<Eigen::Index>(j - 1)] = poly_eval(w, fr.s[j]).real();
    return res;
}

Eigen::MatrixXd jacobian(const Eigen::VectorXd& u, const Frame& fr, std::size_t n) {
    Tails t = build(u, n);
    Poly dp = poly_derivative(t.p), dq = poly_derivative(t.q);
    const auto m = u.size();
    Eigen::MatrixXd jac(m, m);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        Poly mono(i + 1, 0.0);
        mono[i] = 1.0;
        Poly b = poly_mul({1.0, 2.0, 1.0}, mono), c = poly_mul({1.0, -2.0, 1.0}, mono);
        Poly db = poly_derivative(b), dc = poly_derivative(c);
        for (std::size_t j = 1; j + 1 < 2 * n; ++j) {
            double s = fr.s[j];
            auto row = static_cast<Eigen::Index>(j - 1);
            jac(row, static_cast<Eigen::Index>(i)) =
                (poly_eval(db, s) * poly_eval(t.q, s) - poly_eval(b, s) * poly_eval(dq, s)).real();
            jac(row, static_cast<Eigen::Index>(n - 1 + i)) =
                (poly_eval(dp, s) * poly_eval(c, s) - poly_eval(t.p, s) * poly_eval(dc, s)).real();
        }
    }
    return jac;
}

bool newton(Eigen::VectorXd& u, const Frame& fr, std::size_t n, const RationalOptions& opts) {
    Eigen::VectorXd f = residual(u, fr, n);
    for (int it = 0; it < opts.max_newton; ++it) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jacobian(u, fr, n));
        if (!lu.isInvertible()) return false;
        Eigen::VectorXd du = lu.solve(-f);
        double lam = 1.0;
        Eigen::VectorXd trial;
        Eigen::VectorXd ft;
        for (int back = 0; back < 30; ++back, lam *= 0.5) {
            trial = u + lam * du;
            ft = residual(trial, fr, n);
            if (ft.allFinite() && ft.norm() < (1.0 - 1e-4 * lam) * f.norm()) break;
        }
        if (!ft.allFinite()) return false;
        u = trial;
        f = ft;
        if (lam * du.lpNorm<Eigen::Infinity>() <= opts.tol * (1.0 + u.lpNorm<Eigen::Infinity>())) return true;
        if (f.lpNorm<Eigen::Infinity>() == 0.0) return true;
    }
    return false;
}

// critical points of the solution must be exactly the marked points
bool critical_points_match(const RationalFn& f, const std::vector<double>& x, double tol) {
    auto roots = poly_roots(wronskian(f));
    if (roots.size() != x.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(roots[i] - x[i]) > tol * (1.0 + std::abs(x[i]))) return false;
    return true;
}

}  // namespace

RationalFn solve_rational(const std::vector<double>& x, RationalFn seed, const RationalOptions& opts) {
    const std::size_t n = x.size() / 2;
    if (x.size() < 2 || x.size() % 2) throw InputError("rational solve needs an even number of marked points");
    Frame fr(x);
    if (n == 1) return to_z({{1.0, 2.0, 1.0}, {1.0, -2.0, 1.0}}, fr);
    Eigen::VectorXd u = to_unknowns(seed, fr, n);
    if (!newton(u, fr, n, opts)) throw NumericalError("Newton iteration for the rational function did not converge");
    RationalFn f = to_z(build(u, n), fr);
    if (!critical_points_match(f, x, 1e-6)) throw NumericalError("rational solution has spurious critical points");
    return f;
}

RationalFn seed_from_multichord(const Multichord& mc) {
    const auto& x = mc.x;
    const std::size_t n = mc.pattern.n();
    Frame fr(x);
    if (n == 1) return to_z({{1.0, 2.0, 1.0}, {1.0, -2.0, 1.0}}, fr);
    const double span = x.back() - x.front();
    auto dom = conformal::DomainSpec::slit_complement(mc.chords, cplx(fr.c, 4.0 * span));
    conformal::MapChain phi = conformal::component_chain(dom);
    // a little off the critical end points: h is quadratic there, and the slit images are poor right at a base
    double a0 = phi(cplx(x.front() - 1e-3 * span, 0.0)).real();
    double b0 = phi(cplx(x.back() + 1e-3 * span, 0.0)).real();
    double c0 = phi(complex_infinity()).real();
    auto h = [&](cplx z) {
        cplx w = phi(z);
        return (w - a0) / (w - b0) * ((c0 - b0) / (c0 - a0));
    };
    std::vector<cplx> samples;
    for (int k = 0; k < 10; ++k) {
        double g = 0.02 * std::pow(2500.0, k / 9.0);
        samples.emplace_back(x.front() - g * span, 0.0);
        samples.emplace_back(x.back() + g * span, 0.0);
    }
    for (double rad : {1.0, 2.0, 4.0})
        for (int k = 0; k < 10; ++k) samples.push_back(cplx(fr.c, 0.0) + std::polar(rad * span, kPi * (0.05 + 0.9 * k / 9.0)));

    // P(s) - h Q(s) = 0 is linear in the tails
    const auto m = static_cast<Eigen::Index>(2 * (n - 1));
    Eigen::MatrixXd A(static_cast<Eigen::Index>(2 * samples.size()), m);
    Eigen::VectorXd rhs(A.rows());
    Eigen::Index row = 0;
    for (cplx z : samples) {
        cplx w = h(z), s = (z - fr.c) / fr.r;
        cplx fp = (s + 1.0) * (s + 1.0), fq = (s - 1.0) * (s - 1.0);
        cplx top = std::pow(s, static_cast<double>(n - 1));
        double wt = 1.0 / std::max({std::abs(fp * top), std::abs(w * fq * top), 1e-300});
        cplx b = -(fp * top - w * fq * top);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            cplx si = std::pow(s, static_cast<double>(i));
            cplx cp = fp * si, cq = -w * fq * si;
            A(row, static_cast<Eigen::Index>(i)) = wt * cp.real();
            A(row + 1, static_cast<Eigen::Index>(i)) = wt * cp.imag();
            A(row, static_cast<Eigen::Index>(n - 1 + i)) = wt * cq.real();
            A(row + 1, static_cast<Eigen::Index>(n - 1 + i)) = wt * cq.imag();
        }
        rhs[row] = wt * b.real();
        rhs[row + 1] = wt * b.imag();
        row += 2;
    }
    Eigen::VectorXd u = A.colPivHouseholderQr().solve(rhs);
    if (!u.allFinite()) throw NumericalError("rational seed fit failed");
    return to_z(build(u, n), fr);
}

namespace {

std::optional<LinkPattern> traced_pattern(const RationalFn& f, const std::vector<double>& x) {
    try {
        return real_locus(f, x).pattern;
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

// random monic tail in s with roots in [-4, 4] or conjugate pairs
Poly random_tail(std::mt19937_64& rng, std::size_t deg) {
    std::uniform_real_distribution<double> re(-4.0, 4.0), im(0.1, 3.0), coin(0.0, 1.0);
    Poly t{1.0};
    std::size_t left = deg;
    while (left > 0) {
        if (left >= 2 && coin(rng) < 0.4) {
            double a = re(rng), b = im(rng);
            t = poly_mul(t, {a * a + b * b, -2.0 * a, 1.0});
            left -= 2;
        } else {
            t = poly_mul(t, {-re(rng), 1.0});
            left -= 1;
        }
    }
    return t;
}

}  // namespace

std::vector<RationalFn> rational_solutions(const std::vector<double>& x, const RationalOptions& opts) {
    if (x.size() < 2 || x.size() % 2) throw InputError("rational_solutions needs 2n marked points");
    const int n = static_cast<int>(x.size() / 2);
    if (n > 4) throw InputError("rational_solutions is limited to n <= 4");
    const auto patterns = enumerate_link_patterns(n);
    std::vector<std::optional<RationalFn>> found(patterns.size());
    auto slot = [&](const LinkPattern& p) {
        return static_cast<std::size_t>(std::find(patterns.begin(), patterns.end(), p) - patterns.begin());
    };
    for (std::size_t k = 0; k < patterns.size(); ++k) {
        validate_points(x, patterns[k]);
        try {
            RationalFn f = solve_rational(x, seed_from_multichord(geodesic_multichord(x, patterns[k], opts.geodesic)), opts);
            if (auto p = traced_pattern(f, x); p && slot(*p) < found.size() && !found[slot(*p)]) found[slot(*p)] = f;
        } catch (const NumericalError&) {
        }
    }
    // classes the geodesic seeds missed: Newton from random tails
    const Frame fr(x);
    std::mt19937_64 rng(opts.multistart_seed);
    for (int attempt = 0; attempt < opts.multistart; ++attempt) {
        if (std::all_of(found.begin(), found.end(), [](const auto& f) { return f.has_value(); })) break;
        Tails t{poly_mul({1.0, 2.0, 1.0}, random_tail(rng, static_cast<std::size_t>(n - 1))),
                poly_mul({1.0, -2.0, 1.0}, random_tail(rng, static_cast<std::size_t>(n - 1)))};
        try {
            RationalFn f = solve_rational(x, to_z(t, fr), opts);
            if (auto p = traced_pattern(f, x); p && slot(*p) < found.size() && !found[slot(*p)]) found[slot(*p)] = f;
        } catch (const NumericalError&) {
        }
    }
    std::vector<RationalFn> out;
    std::string missing;
    for (std::size_t k = 0; k < patterns.size(); ++k) {
        if (found[k]) out.push_back(*found[k]);
        else missing += " " + patterns[k].to_string();
    }
    if (!missing.empty()) throw NumericalError("rational classes missing for patterns:" + missing);
    return out;
}

namespace {

struct LocusEval {
    double re_log;  // Re log((P - iQ) / (P + iQ)), zero exactly on h^{-1}(R)
    cplx deriv;     // derivative of the log
};

LocusEval locus_eval(const RationalFn& f, const Poly& w, cplx z) {
    const cplx I(0.0, 1.0);
    cplx p = poly_eval(f.p, z), q = poly_eval(f.q, z);
    return {std::log(std::abs(p - I * q)) - std::log(std::abs(p + I * q)), 2.0 * I * poly_eval(w, z) / (p * p + q * q)};
}

}  // namespace

Multichord real_locus(const RationalFn& f, const std::vector<double>& x, const Window& window, double step) {
    if (!(step > 0.0)) throw InputError("real_locus step must be positive");
    for (double v : x)
        if (v <= window.re_min || v >= window.re_max) throw InputError("critical point outside the tracing window");
    const Poly w = wronskian(f);
    const double min_step = 1e-6;
    std::vector<bool> used(x.size(), false);
    Multichord mc;
    mc.x = x;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (used[j]) continue;
        Curve c;
        c.points.emplace_back(x[j], 0.0);
        cplx dir(0.0, 1.0);
        cplx z(x[j], 0.0);
        double h = step;
        bool done = false;
        for (long iter = 0; iter < 10000000 && !done; ++iter) {
            LocusEval e = locus_eval(f, w, z);
            cplx t = std::abs(e.deriv) > 0.0 ? cplx(0.0, 1.0) * std::conj(e.deriv) / std::abs(e.deriv) : dir;
            if (c.size() == 1) t = dir;  // the branch leaves the critical point vertically
            if ((t * std::conj(dir)).real() < 0.0) t = -t;
            cplx zn = z + h * t;
            bool ok = false;
            for (int k = 0; k < 12; ++k) {
                LocusEval en = locus_eval(f, w, zn);
                if (!std::isfinite(en.re_log) || std::abs(en.deriv) == 0.0) break;
                cplx d = -en.re_log / en.deriv;
                zn += d;
                if (std::abs(d) <= 1e-13 * (1.0 + std::abs(zn))) {
                    ok = true;
                    break;
                }
            }
            cplx move = zn - z;
            if (ok) ok = std::abs(move) < 2.0 * h && (move * std::conj(dir)).real() > 0.8 * std::abs(move);
            if (!ok) {
                h *= 0.5;
                if (h < min_step)
                    throw NumericalError("real locus tracer stalled at (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
                continue;
            }
            if (zn.imag() <= 0.0 || zn.real() <= window.re_min || zn.real() >= window.re_max || zn.imag() >= window.im_max)
                throw NumericalError("real locus left the window near (" + std::to_string(zn.real()) + ", " + std::to_string(zn.imag()) + ")");
            dir = move / std::abs(move);
            z = zn;
            c.points.push_back(z);
            h = std::min(step, 1.5 * h);
            for (std::size_t k = 0; k < x.size(); ++k) {
                if (k == j || std::abs(z - x[k]) > 1.5 * step || c.size() < 3) continue;
                if (used[k]) throw NumericalError("real locus reached an already paired critical point");
                c.points.emplace_back(x[k], 0.0);
                used[j] = used[k] = true;
                done = true;
                break;
            }
        }
        if (!done) throw NumericalError("real locus trace did not close");
        mc.chords.push_back(std::move(c));
    }
    mc.pattern = classify_link_pattern(mc.chords, x);
    // keep chords aligned with the sorted pairs
    std::vector<Curve> sorted;
    for (const auto& [a, b] : mc.pattern.pairs)
        for (const auto& c : mc.chords)
            if (std::abs(c.base().real() - x[static_cast<std::size_t>(a - 1)]) < 1e-12) sorted.push_back(c);
    mc.chords = std::move(sorted);
    return mc;
}

Multichord real_locus(const RationalFn& f, const std::vector<double>& x) {
    if (x.empty()) throw InputError("real_locus needs marked points");
    double span = x.back() - x.front();
    double gap = span;
    for (std::size_t i = 1; i < x.size(); ++i) gap = std::min(gap, x[i] - x[i - 1]);
    Window win{x.front() - span, x.back() + span, 2.0 * span};
    return real_locus(f, x, win, std::min(5e-3 * span, 0.05 * gap));
}

}  // namespace llab::multichord
