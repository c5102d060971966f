#include "loewner_lab/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace llab::conformal {

namespace {

using loewner::SlitMap;

cplx mobius_eval(cplx a, cplx b, cplx c, cplx d, cplx z) {
    if (is_infinite(z)) return c == cplx(0.0) ? complex_infinity() : a / c;
    cplx den = c * z + d;
    if (den == cplx(0.0)) return complex_infinity();
    return (a * z + b) / den;
}

cplx arc_forward(double t1, double t2, int side, cplx z) {
    if (is_infinite(z)) return {0.0, 0.0};
    cplx den = t2 - z;
    if (den == cplx(0.0)) return complex_infinity();
    double sg = static_cast<double>(side) * (t2 > t1 ? 1.0 : -1.0);
    return sg * (2.0 * z - t1 - t2) / (den * den);
}

cplx arc_inverse(double t1, double t2, int side, cplx w) {
    if (is_infinite(w)) return {t2, 0.0};
    const double sigma = t2 > t1 ? 1.0 : -1.0;
    const double s = static_cast<double>(side);
    cplx v = s * std::abs(t2 - t1) * w;  // M^2 = 1 + v
    cplx one_plus_sm;                    // 1 + sigma * M
    if (w.imag() == 0.0 && 1.0 + v.real() < 0.0) {
        cplx m(0.0, std::sqrt(-(1.0 + v.real())));
        one_plus_sm = 1.0 + sigma * m;
    } else {
        cplx root = (w.imag() == 0.0) ? cplx(std::sqrt(1.0 + v.real()), 0.0) : std::sqrt(1.0 + v);
        one_plus_sm = sigma * s < 0 ? -v / (1.0 + root) : 1.0 + root;
    }
    if (one_plus_sm == cplx(0.0)) return complex_infinity();
    return t2 + (t1 - t2) / one_plus_sm;
}

double tiny(cplx z) { return 1e-12 * (1.0 + std::abs(z)); }

cplx json_cplx(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

// Richardson table for central differences with steps h, h/2, h/4.
double richardson(double d1, double d2, double d3) {
    double r1 = (4.0 * d2 - d1) / 3.0;
    double r2 = (4.0 * d3 - d2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

constexpr double kDiffSteps[3] = {1e-3, 5e-4, 2.5e-4};

}  // namespace

cplx Step::apply(cplx z) const {
    if (inverted) {
        Step s = *this;
        s.inverted = false;
        return s.unapply(z);
    }
    switch (kind) {
        case Kind::mobius: return mobius_eval(a, b, c, d, z);
        case Kind::slit: return is_infinite(z) ? z : SlitMap{p, q}.forward(z);
        case Kind::arc: return arc_forward(p, q, side, z);
    }
    return z;
}

cplx Step::unapply(cplx z) const {
    if (inverted) {
        Step s = *this;
        s.inverted = false;
        return s.apply(z);
    }
    switch (kind) {
        case Kind::mobius: return mobius_eval(d, -b, -c, a, z);
        case Kind::slit: return is_infinite(z) ? z : SlitMap{p, q}.inverse(z);
        case Kind::arc: return arc_inverse(p, q, side, z);
    }
    return z;
}

cplx MapChain::operator()(cplx z) const {
    for (const auto& s : steps_) z = s.apply(z);
    return z;
}

cplx MapChain::inverse(cplx z) const {
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) z = it->unapply(z);
    return z;
}

MapChain MapChain::inverted() const {
    std::vector<Step> rev(steps_.rbegin(), steps_.rend());
    for (auto& s : rev) s.inverted = !s.inverted;
    return MapChain(std::move(rev));
}

MapChain MapChain::then(const MapChain& other) const {
    std::vector<Step> all = steps_;
    all.insert(all.end(), other.steps_.begin(), other.steps_.end());
    return MapChain(std::move(all));
}

nlohmann::json MapChain::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& s : steps_) {
        nlohmann::json j;
        switch (s.kind) {
            case Step::Kind::mobius:
                j["type"] = "mobius";
                j["a"] = {s.a.real(), s.a.imag()};
                j["b"] = {s.b.real(), s.b.imag()};
                j["c"] = {s.c.real(), s.c.imag()};
                j["d"] = {s.d.real(), s.d.imag()};
                break;
            case Step::Kind::slit:
                j["type"] = "slit";
                j["u"] = s.p;
                j["height"] = s.q;
                break;
            case Step::Kind::arc:
                j["type"] = "arc";
                j["t1"] = s.p;
                j["t2"] = s.q;
                j["side"] = s.side;
                break;
        }
        j["inverted"] = s.inverted;
        arr.push_back(j);
    }
    return arr;
}

MapChain MapChain::from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw InputError("map chain JSON must be an array of steps");
    std::vector<Step> steps;
    for (const auto& e : j) {
        std::string type = e.at("type").get<std::string>();
        Step s;
        if (type == "mobius") {
            s = Step::mobius(json_cplx(e.at("a")), json_cplx(e.at("b")), json_cplx(e.at("c")), json_cplx(e.at("d")));
        } else if (type == "slit") {
            s = Step::slit(e.at("u").get<double>(), e.at("height").get<double>());
        } else if (type == "arc") {
            s = Step::arc(e.at("t1").get<double>(), e.at("t2").get<double>(), e.at("side").get<int>());
        } else {
            throw InputError("unknown map step type '" + type + "'");
        }
        s.inverted = e.value("inverted", false);
        steps.push_back(s);
    }
    return MapChain(std::move(steps));
}

MapChain mobius_to_reference(cplx x, cplx y, std::optional<double> third_point) {
    if (!is_infinite(x) && !is_infinite(y) && std::abs(x - y) == 0.0) throw InputError("mobius_to_reference needs x != y");
    Step s;
    if (is_infinite(x)) {
        if (is_infinite(y)) throw InputError("mobius_to_reference needs x != y");
        s = Step::mobius(0.0, -1.0, 1.0, -y.real());
    } else if (is_infinite(y)) {
        s = Step::mobius(1.0, -x.real(), 0.0, 1.0);
    } else if (y.real() > x.real()) {
        s = Step::mobius(1.0, -x.real(), -1.0, y.real());
    } else {
        s = Step::mobius(1.0, -x.real(), 1.0, -y.real());
    }
    if (third_point) {
        double z = *third_point;
        cplx den = s.c * z + s.d;
        double deriv = std::abs((s.a * s.d - s.b * s.c) / (den * den));
        if (!(deriv > 0.0) || !std::isfinite(deriv)) throw InputError("third normalization point is singular");
        s.a /= deriv;
        s.b /= deriv;
    }
    return MapChain({s});
}

bool is_two_ended(const Curve& slit) {
    return slit.size() >= 2 && std::abs(slit.tip().imag()) <= 1e-9 * (1.0 + std::abs(slit.tip()));
}

bool inside_chord(const Curve& chord, cplx z) {
    if (!is_two_ended(chord)) return false;
    double lo = std::min(chord.base().real(), chord.tip().real());
    double hi = std::max(chord.base().real(), chord.tip().real());
    if (std::abs(z.imag()) <= tiny(z)) {
        double eps = 1e-9 * (1.0 + hi - lo);
        return z.real() > lo + eps && z.real() < hi - eps;
    }
    int crossings = 0;
    const auto& p = chord.points;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        bool r0 = p[i].real() > z.real();
        bool r1 = p[i + 1].real() > z.real();
        if (r0 == r1) continue;
        double s = (z.real() - p[i].real()) / (p[i + 1].real() - p[i].real());
        double yy = p[i].imag() + s * (p[i + 1].imag() - p[i].imag());
        if (yy > z.imag()) ++crossings;
    }
    return crossings % 2 == 1;
}

namespace {

bool is_endpoint(const Curve& chord, cplx z) {
    double tol = 1e-9 * (1.0 + std::abs(z));
    return std::abs(chord.base() - z) <= tol || std::abs(chord.tip() - z) <= tol;
}

std::vector<std::size_t> relevant_slits(const DomainSpec& domain) {
    std::vector<std::size_t> out;
    const auto& s = domain.slits;
    for (std::size_t m = 0; m < s.size(); ++m) {
        if (s[m].size() < 2) throw InputError("slit " + std::to_string(m) + " has fewer than two vertices");
        cplx rep = s[m].points[s[m].size() / 2];
        bool separated = false;
        for (std::size_t l = 0; l < s.size() && !separated; ++l) {
            if (l == m || !is_two_ended(s[l])) continue;
            separated = inside_chord(s[l], rep) != inside_chord(s[l], domain.face_anchor);
        }
        if (!separated) out.push_back(m);
    }
    return out;
}

}  // namespace

MapChain component_chain(const DomainSpec& domain) {
    MapChain chain;
    if (domain.kind == DomainKind::disc) {
        // inverse Cayley map: zeta -> i (1 + zeta) / (1 - zeta)
        chain.push(Step::mobius({0.0, 1.0}, {0.0, 1.0}, -1.0, 1.0));
        return chain;
    }
    if (domain.kind == DomainKind::half_plane || domain.slits.empty()) return chain;

    for (std::size_t l = 0; l < domain.slits.size(); ++l) {
        if (!is_two_ended(domain.slits[l])) continue;
        for (std::size_t k = 1; k + 1 < domain.slits[l].size(); ++k)
            if (std::abs(domain.slits[l].points[k] - domain.face_anchor) < 1e-12)
                throw InputError("face anchor lies on slit " + std::to_string(l));
    }

    for (std::size_t m : relevant_slits(domain)) {
        const Curve& slit = domain.slits[m];
        std::vector<cplx> q(slit.size());
        for (std::size_t k = 0; k < slit.size(); ++k) q[k] = chain(slit.points[k]);
        bool chord = is_two_ended(slit);
        if (chord) {
            // keep the anchor on the unbounded side: the bounded side gets squeezed under the last arc
            Curve image;
            image.points = q;
            image.points.front() = q.front().real();
            image.points.back() = q.back().real();
            if (inside_chord(image, chain(domain.face_anchor))) {
                double c = 0.5 * (q.front().real() + q.back().real());
                Step flip = Step::mobius(0.0, -1.0, 1.0, -c);
                chain.push(flip);
                for (auto& v : q) v = flip.apply(v);
            }
        }
        Step shift = Step::mobius(1.0, -q.front().real(), 0.0, 1.0);
        chain.push(shift);
        std::vector<SlitMap> local;
        std::size_t last = chord ? slit.size() - 1 : slit.size();
        for (std::size_t k = 1; k < last; ++k) {
            cplx w = shift.apply(q[k]);
            for (const auto& sm : local) w = sm.forward(w);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
                throw NumericalError("slit " + std::to_string(m) + " overflowed at vertex " + std::to_string(k));
            if (w.imag() < -1e-9 * (1.0 + std::abs(w)))
                throw NumericalError("slit " + std::to_string(m) + " is not simple near vertex " + std::to_string(k));
            if (w.imag() <= tiny(w)) continue;
            local.push_back({w.real(), w.imag()});
            chain.push(Step::slit(w.real(), w.imag()));
        }
        if (chord) {
            // the short arc left between the last tip and the far end is opened like a semicircle
            double t1 = local.empty() ? 0.0 : local.back().u;
            cplx e = shift.apply(cplx(q.back().real(), 0.0));
            for (const auto& sm : local) e = sm.forward(e);
            double t2 = e.real();
            if (t1 == t2) throw NumericalError("slit " + std::to_string(m) + " collapsed while unzipping");
            chain.push(Step::arc(t1, t2, t1 < t2 ? -1 : 1));  // keep the side away from the arc
        }
    }
    return chain;
}

MapChain uniformize_component(const DomainSpec& domain, cplx x, cplx y) {
    if (domain.kind == DomainKind::slit_complement) {
        for (std::size_t l = 0; l < domain.slits.size(); ++l) {
            const Curve& s = domain.slits[l];
            if (!is_two_ended(s)) continue;
            bool anchor_in = inside_chord(s, domain.face_anchor);
            for (cplx p : {x, y}) {
                if (is_infinite(p) || is_endpoint(s, p)) continue;
                if (inside_chord(s, p) != anchor_in)
                    throw InputError("marked point " + std::to_string(p.real()) + " is cut off by slit " + std::to_string(l));
            }
        }
    }
    MapChain chain = component_chain(domain);
    cplx xi = chain(x), yi = chain(y);
    auto realish = [](cplx z) { return is_infinite(z) ? z : cplx(z.real(), 0.0); };
    if (!is_infinite(xi) && std::abs(xi.imag()) > 1e-6 * (1.0 + std::abs(xi)))
        throw NumericalError("marked point x does not map to the boundary");
    if (!is_infinite(yi) && std::abs(yi.imag()) > 1e-6 * (1.0 + std::abs(yi)))
        throw NumericalError("marked point y does not map to the boundary");
    return chain.then(mobius_to_reference(realish(xi), realish(yi)));
}

double boundary_derivative(const MapChain& chain, double x) {
    double d[3];
    for (int i = 0; i < 3; ++i) {
        double h = kDiffSteps[i];
        cplx fp = chain(cplx(x + h, 0.0)), fm = chain(cplx(x - h, 0.0));
        d[i] = std::abs(fp - fm) / (2.0 * h);
    }
    double r = richardson(d[0], d[1], d[2]);
    if (!std::isfinite(r) || !(r > 0.0)) throw NumericalError("boundary derivative undefined at x = " + std::to_string(x));
    return r;
}

double boundary_derivative_circle(const MapChain& chain, cplx zeta) {
    double d[3];
    for (int i = 0; i < 3; ++i) {
        double h = kDiffSteps[i];
        cplx e = std::polar(1.0, h);
        cplx fp = chain(zeta * e), fm = chain(zeta / e);
        d[i] = std::abs(fp - fm) / (2.0 * std::sin(h) * std::abs(zeta));
    }
    double r = richardson(d[0], d[1], d[2]);
    if (!std::isfinite(r) || !(r > 0.0)) throw NumericalError("boundary derivative undefined on the circle");
    return r;
}

double poisson_kernel(const DomainSpec& domain, cplx x, cplx y) {
    if (is_infinite(x) || is_infinite(y)) throw InputError("Poisson kernel needs finite boundary points");
    if (std::abs(x - y) == 0.0) throw InputError("Poisson kernel needs x != y");
    if (domain.kind == DomainKind::disc) return 1.0 / std::norm(x - y);
    if (domain.kind == DomainKind::half_plane || domain.slits.empty()) return 1.0 / std::norm(x - y);
    // make sure neither marked point is cut off
    (void)uniformize_component(domain, x, y);
    MapChain chain = component_chain(domain);
    double dx = boundary_derivative(chain, x.real());
    double dy = boundary_derivative(chain, y.real());
    return dx * dy / std::norm(chain(x) - chain(y));
}

Curve hyperbolic_geodesic(const DomainSpec& domain, cplx x, cplx y, int samples, double log_span) {
    if (samples < 2) throw InputError("hyperbolic_geodesic needs at least two samples");
    MapChain chain = uniformize_component(domain, x, y);
    Curve out;
    out.points.reserve(static_cast<std::size_t>(samples) + 2);
    out.points.push_back(x);
    // even in angle (u = log tan(theta / 2)) with a log-spaced tail down to -log_span at each end
    const int tail = std::max(1, samples / 10);
    const int mid = std::max(2, samples - 2 * tail);
    std::vector<double> us;
    double edge = std::log(std::tan(0.25 * kPi / mid));
    for (int k = 0; k < tail; ++k) us.push_back(-log_span + (edge + log_span) * k / tail);
    for (int k = 0; k < mid; ++k) us.push_back(std::log(std::tan(0.5 * kPi * (k + 0.5) / mid)));
    for (int k = tail - 1; k >= 0; --k) us.push_back(log_span - (edge + log_span) * k / tail);
    for (double u : us) out.points.push_back(chain.inverse(cplx(0.0, std::exp(u))));
    if (!is_infinite(y)) out.points.push_back(y);
    return out;
}

ChordEnergy chord_energy_with(const Curve& curve, const MapChain& normalized, const loewner::ZipperOptions& opts) {
    Curve mapped;
    mapped.points.reserve(curve.size());
    mapped.points.emplace_back(0.0, 0.0);
    for (std::size_t k = 1; k < curve.size(); ++k) {
        cplx w = normalized(curve.points[k]);
        if (is_infinite(w) || std::abs(w) > 1e9) break;
        mapped.points.push_back(w);
    }
    if (mapped.size() < 2) throw NumericalError("chord maps to fewer than two finite points");
    auto z = loewner::unzip(mapped, opts);
    return {loewner::dirichlet_energy(z.driver), z.truncated, z.driver};
}

ChordEnergy chord_energy(const Curve& curve, const DomainSpec& domain, cplx x, cplx y,
                         const loewner::ZipperOptions& opts) {
    if (curve.size() < 2) throw InputError("chord needs at least two vertices");
    double tol = 1e-6 * (1.0 + std::abs(x));
    if (domain.kind != DomainKind::disc) {
        if (std::abs(x.imag()) > tol || (!is_infinite(y) && std::abs(y.imag()) > 1e-6 * (1.0 + std::abs(y))))
            throw InputError("chord endpoints must lie on the real line");
    } else if (std::abs(std::abs(x) - 1.0) > tol || std::abs(std::abs(y) - 1.0) > tol) {
        throw InputError("chord endpoints must lie on the unit circle");
    }
    if (std::abs(curve.base() - x) > 1e-6 * (1.0 + std::abs(x))) throw InputError("chord does not start at x");
    return chord_energy_with(curve, uniformize_component(domain, x, y), opts);
}

}  // namespace llab::conformal
