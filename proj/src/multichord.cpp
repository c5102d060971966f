#include "loewner_lab/multichord.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace llab::multichord {

bool LinkPattern::planar() const {
    for (const auto& [a, b] : pairs)
        for (const auto& [c, d] : pairs)
            if (a < c && c < b && b < d) return false;
    return true;
}

std::string LinkPattern::to_string() const {
    bool digits = true;
    for (const auto& [a, b] : pairs) digits = digits && a < 10 && b < 10;
    std::ostringstream os;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i) os << '|';
        if (digits) os << pairs[i].first << pairs[i].second;
        else os << pairs[i].first << ',' << pairs[i].second;
    }
    return os.str();
}

LinkPattern LinkPattern::parse(const std::string& s) {
    LinkPattern p;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, '|')) {
        int a = 0, b = 0;
        auto comma = tok.find(',');
        try {
            if (comma != std::string::npos) {
                a = std::stoi(tok.substr(0, comma));
                b = std::stoi(tok.substr(comma + 1));
            } else if (tok.size() == 2 && std::isdigit(static_cast<unsigned char>(tok[0])) && std::isdigit(static_cast<unsigned char>(tok[1]))) {
                a = tok[0] - '0';
                b = tok[1] - '0';
            } else {
                throw InputError("");
            }
        } catch (const std::exception&) {
            throw InputError("cannot parse link pattern '" + s + "' (expected e.g. 12|34 or 1,2|3,4)");
        }
        if (a > b) std::swap(a, b);
        p.pairs.emplace_back(a, b);
    }
    std::sort(p.pairs.begin(), p.pairs.end());
    const int m = static_cast<int>(2 * p.pairs.size());
    std::vector<int> seen(static_cast<std::size_t>(m) + 1, 0);
    for (const auto& [a, b] : p.pairs) {
        if (a < 1 || b > m || a == b) throw InputError("link pattern '" + s + "' uses indices outside 1.." + std::to_string(m));
        if (seen[static_cast<std::size_t>(a)]++ || seen[static_cast<std::size_t>(b)]++) throw InputError("link pattern '" + s + "' repeats an index");
    }
    if (p.pairs.empty()) throw InputError("empty link pattern");
    if (!p.planar()) throw InputError("link pattern '" + s + "' is not planar");
    return p;
}

std::vector<LinkPattern> enumerate_link_patterns(int n) {
    if (n < 1) throw InputError("link patterns need n >= 1");
    if (n > 8) throw InputError("link pattern enumeration is capped at n = 8");
    // pair the first free index with a partner leaving an even block inside
    std::function<std::vector<std::vector<std::pair<int, int>>>(int, int)> rec = [&](int lo, int hi) {
        std::vector<std::vector<std::pair<int, int>>> out;
        if (lo > hi) {
            out.emplace_back();
            return out;
        }
        for (int b = lo + 1; b <= hi; b += 2)
            for (auto& inner : rec(lo + 1, b - 1))
                for (auto& outer : rec(b + 1, hi)) {
                    auto v = inner;
                    v.emplace_back(lo, b);
                    v.insert(v.end(), outer.begin(), outer.end());
                    out.push_back(std::move(v));
                }
        return out;
    };
    std::vector<LinkPattern> all;
    for (auto& v : rec(1, 2 * n)) {
        std::sort(v.begin(), v.end());
        all.push_back({v});
    }
    std::sort(all.begin(), all.end(), [](const LinkPattern& a, const LinkPattern& b) { return a.pairs < b.pairs; });
    return all;
}

void validate_points(const std::vector<double>& x, const LinkPattern& alpha) {
    if (x.size() != 2 * alpha.n()) throw InputError("expected " + std::to_string(2 * alpha.n()) + " marked points, got " + std::to_string(x.size()));
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw InputError("marked points must be strictly increasing");
    if (!alpha.planar()) throw InputError("link pattern is not planar");
}

Curve semicircle(double a, double b, int samples) {
    Curve c;
    double mid = 0.5 * (a + b), r = 0.5 * std::abs(b - a);
    double dir = a < b ? -1.0 : 1.0;
    c.points.emplace_back(a, 0.0);
    for (int k = 1; k <= samples; ++k) {
        double th = kPi * k / (samples + 1);
        c.points.emplace_back(mid + dir * r * std::cos(th), r * std::sin(th));
    }
    c.points.emplace_back(b, 0.0);
    return c;
}

conformal::DomainSpec complement_of(const Multichord& mc, std::size_t j) {
    std::vector<Curve> others;
    for (std::size_t i = 0; i < mc.chords.size(); ++i)
        if (i != j) others.push_back(mc.chords[i]);
    const Curve& c = mc.chords[j];
    return conformal::DomainSpec::slit_complement(std::move(others), c.points[c.size() / 2]);
}

Multichord geodesic_multichord_from(Multichord mc, const GeodesicOptions& opts) {
    validate_points(mc.x, mc.pattern);
    const std::size_t n = mc.pattern.n();
    double disp = 0.0;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        disp = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            auto [a, b] = mc.pattern.pairs[j];
            double xa = mc.x[static_cast<std::size_t>(a - 1)], xb = mc.x[static_cast<std::size_t>(b - 1)];
            Curve next = conformal::hyperbolic_geodesic(complement_of(mc, j), xa, xb, opts.samples, opts.log_span);
            for (std::size_t i = 0; i < n; ++i)
                if (i != j && polylines_intersect(next.points, mc.chords[i].points))
                    throw NumericalError("chord " + std::to_string(j + 1) + " collided with chord " + std::to_string(i + 1) + " during sweep " + std::to_string(sweep + 1));
            disp = std::max(disp, hausdorff_distance(next, mc.chords[j]));
            mc.chords[j] = std::move(next);
        }
        if (n == 1 && sweep == 0) return mc;
        if (disp < opts.tol) return mc;
    }
    throw NumericalError("geodesic multichord did not converge in " + std::to_string(opts.max_sweeps) + " sweeps (last displacement " + std::to_string(disp) + ")");
}

Multichord geodesic_multichord(const std::vector<double>& x, const LinkPattern& alpha, const GeodesicOptions& opts) {
    validate_points(x, alpha);
    Multichord mc{x, alpha, {}};
    for (const auto& [a, b] : alpha.pairs)
        mc.chords.push_back(semicircle(x[static_cast<std::size_t>(a - 1)], x[static_cast<std::size_t>(b - 1)], opts.samples));
    return geodesic_multichord_from(std::move(mc), opts);
}

double geodesic_defect(const Multichord& mc) {
    double worst = 0.0;
    for (std::size_t j = 0; j < mc.chords.size(); ++j) {
        auto [a, b] = mc.pattern.pairs[j];
        double xa = mc.x[static_cast<std::size_t>(a - 1)], xb = mc.x[static_cast<std::size_t>(b - 1)];
        worst = std::max(worst, conformal::chord_energy(mc.chords[j], complement_of(mc, j), xa, xb).energy);
    }
    return worst;
}

LinkPattern classify_link_pattern(const std::vector<Curve>& chords, const std::vector<double>& x, double tol) {
    auto nearest = [&](cplx z) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < x.size(); ++i)
            if (std::abs(z - x[i]) < std::abs(z - x[best])) best = i;
        if (std::abs(z - x[best]) > tol) throw InputError("chord endpoint (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ") matches no marked point");
        return static_cast<int>(best) + 1;
    };
    LinkPattern p;
    for (const auto& c : chords) {
        int a = nearest(c.base()), b = nearest(c.tip());
        if (a > b) std::swap(a, b);
        p.pairs.emplace_back(a, b);
    }
    std::sort(p.pairs.begin(), p.pairs.end());
    return p;
}

double multichord_distance(const Multichord& a, const Multichord& b) {
    if (a.chords.size() != b.chords.size()) throw InputError("multichords differ in size");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.chords.size(); ++i) {
        cplx a0 = a.chords[i].base(), a1 = a.chords[i].tip();
        bool found = false;
        for (const auto& c : b.chords) {
            bool same = std::abs(c.base() - a0) + std::abs(c.tip() - a1) < 1e-6;
            bool swapped = std::abs(c.base() - a1) + std::abs(c.tip() - a0) < 1e-6;
            if (same || swapped) {
                worst = std::max(worst, hausdorff_distance(a.chords[i], c));
                found = true;
            }
        }
        if (!found) throw InputError("multichords do not share endpoint pairs");
    }
    return worst;
}

}  // namespace llab::multichord
