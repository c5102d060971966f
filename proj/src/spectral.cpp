#include "loewner_lab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "loewner_lab/multichord.hpp"
#include "loewner_lab/parallel.hpp"
#include "loewner_lab/potential.hpp"

namespace llab::spectral {

namespace {

// angular opening, first order, order step, multiplicity of orders >= 1
struct Separation {
    double opening;
    int nu0;
    int step;
    int mult;
};

Separation separation(Shape s) {
    switch (s) {
        case Shape::disc: return {2.0 * kPi, 0, 1, 2};
        case Shape::half_disc:
        case Shape::disc_with_diameter_component: return {kPi, 1, 1, 1};
        case Shape::quarter_disc: return {0.5 * kPi, 2, 2, 1};
    }
    throw InputError("unknown shape");
}

// boundary piece: arc of the circle |z| = rho between angles, or a segment
struct Piece {
    bool arc = true;
    double th0 = 0.0, th1 = 0.0;
    cplx p0, p1;
};

std::vector<Piece> pieces(const SpectralDomain& d) {
    const double rho = d.radius;
    switch (d.shape) {
        case Shape::disc: return {{true, 0.0, 2.0 * kPi, {}, {}}};
        case Shape::half_disc:
        case Shape::disc_with_diameter_component: return {{true, 0.0, kPi, {}, {}}, {false, 0, 0, {-rho, 0.0}, {rho, 0.0}}};
        case Shape::quarter_disc:
            return {{true, 0.0, 0.5 * kPi, {}, {}}, {false, 0, 0, {0.0, 0.0}, {rho, 0.0}}, {false, 0, 0, {0.0, rho}, {0.0, 0.0}}};
    }
    return {};
}

template <int N>
double gl(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss<double, N>::integrate(f, a, b);
}

// integral over the domain of f(x, y) dA, polar coordinates
template <int N>
double area_integral(const SpectralDomain& d, const std::function<double(double, double)>& f) {
    const double open = separation(d.shape).opening;
    return gl<N>([&](double r) {
        return r * gl<N>([&](double th) { return f(r * std::cos(th), r * std::sin(th)); }, 0.0, open);
    }, 0.0, d.radius);
}

// sum over pieces of the integral of f(point, outward normal, curvature) dl
template <int N>
double boundary_integral(const SpectralDomain& d, const std::function<double(cplx, cplx, double)>& f) {
    double total = 0.0;
    for (const Piece& p : pieces(d)) {
        if (p.arc) {
            // a full circle is split so the rule sees a smooth periodic integrand on two halves
            int parts = p.th1 - p.th0 > kPi + 1e-12 ? 2 : 1;
            double h = (p.th1 - p.th0) / parts;
            for (int i = 0; i < parts; ++i)
                total += d.radius * gl<N>([&](double th) {
                    cplx n = std::polar(1.0, th);
                    return f(d.radius * n, n, 1.0 / d.radius);
                }, p.th0 + i * h, p.th0 + (i + 1) * h);
        } else {
            cplx dir = p.p1 - p.p0;
            double len = std::abs(dir);
            cplx n = dir / len * cplx(0.0, -1.0);  // pieces run with the domain on the left
            total += len * gl<N>([&](double s) { return f(p.p0 + s * dir, n, 0.0); }, 0.0, 1.0);
        }
    }
    return total;
}

double at(const Weight& w, cplx z) {
    return w ? w(z.real(), z.imag()) : 0.0;
}

double normal_derivative(const Weight& w, cplx z, cplx n, double h) {
    if (!w) return 0.0;
    return (at(w, z + h * n) - at(w, z - h * n)) / (2.0 * h);
}

double laplacian(const Weight& w, double x, double y, double h) {
    if (!w) return 0.0;
    return (w(x + h, y) + w(x - h, y) + w(x, y + h) + w(x, y - h) - 4.0 * w(x, y)) / (h * h);
}

double grad2(const Weight& w, double x, double y, double h) {
    double gx = (w(x + h, y) - w(x - h, y)) / (2.0 * h), gy = (w(x, y + h) - w(x, y - h)) / (2.0 * h);
    return gx * gx + gy * gy;
}

double e1(double x) {
    return boost::math::expint(1, x);
}

// sum_j E1(lambda_j delta)
double loop_sum(const std::vector<double>& ev, double delta) {
    double s = 0.0;
    for (double l : ev) s += e1(l * delta);
    return s;
}

double tail_bound(double delta, double lambda_max, double area) {
    // 2 (area / 4 pi) integral_{lambda_max}^inf E1(l delta) dl = (area / 2 pi delta) E2(lambda_max delta)
    return area / (2.0 * kPi * delta) * boost::math::expint(2, lambda_max * delta);
}

// least-squares intercept of y against a polynomial in s of the given degree
double intercept(const std::vector<double>& s, const std::vector<double>& y, int degree) {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(s.size()), degree + 1);
    Eigen::VectorXd b(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
        double p = 1.0;
        for (int k = 0; k <= degree; ++k, p *= s[i]) A(static_cast<Eigen::Index>(i), k) = p;
        b(static_cast<Eigen::Index>(i)) = y[i];
    }
    return A.colPivHouseholderQr().solve(b)(0);
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return g;
}

// fit window for the determinant; eigenvalues up to kCut / delta_lo
constexpr double kDeltaLo = 0.005, kDeltaHi = 0.1, kCut = 45.0;

void require_exact(const SpectralDomain& d) {
    if (d.sigma) throw InputError("exact spectra need a flat domain; use heat_trace_coefficients for weighted metrics");
}

}  // namespace

Shape parse_shape(const std::string& name) {
    if (name == "disc") return Shape::disc;
    if (name == "half_disc" || name == "half-disc") return Shape::half_disc;
    if (name == "quarter_disc" || name == "quarter-disc") return Shape::quarter_disc;
    if (name == "disc_with_diameter_component") return Shape::disc_with_diameter_component;
    throw InputError("unknown shape '" + name + "' (disc, half_disc, quarter_disc, disc_with_diameter_component)");
}

std::string shape_name(Shape s) {
    switch (s) {
        case Shape::disc: return "disc";
        case Shape::half_disc: return "half_disc";
        case Shape::quarter_disc: return "quarter_disc";
        case Shape::disc_with_diameter_component: return "disc_with_diameter_component";
    }
    return "?";
}

SpectralDomain SpectralDomain::make(Shape shape, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("radius must be positive");
    SpectralDomain d;
    d.shape = shape;
    d.radius = radius;
    const double open = separation(shape).opening;
    d.area = 0.5 * open * radius * radius;
    d.perimeter = open * radius;
    switch (shape) {
        case Shape::disc: break;
        case Shape::half_disc:
        case Shape::disc_with_diameter_component:
            d.corners = {{{radius, 0.0}, 0.5}, {{-radius, 0.0}, 0.5}};
            d.perimeter += 2.0 * radius;
            break;
        case Shape::quarter_disc:
            d.corners = {{{radius, 0.0}, 0.5}, {{0.0, radius}, 0.5}, {{0.0, 0.0}, 0.5}};
            d.perimeter += 2.0 * radius;
            break;
    }
    return d;
}

namespace {
std::vector<Mode> modes_below(const SpectralDomain& d, double lambda_max, int threads) {
    require_exact(d);
    const Separation sep = separation(d.shape);
    const double kmax = std::sqrt(lambda_max) * d.radius;  // bound on the Bessel zero
    std::vector<int> orders;
    for (int nu = sep.nu0; nu < kmax; nu += sep.step) orders.push_back(nu);
    std::vector<std::vector<Mode>> per(orders.size());
    parallel_for(static_cast<long>(orders.size()), threads, [&](long i) {
        const int nu = orders[static_cast<std::size_t>(i)];
        // McMahon: j_{nu,k} is close to (k + nu/2 - 1/4) pi, and above it for nu > 1/2
        int want = std::max(1, static_cast<int>((kmax / kPi) - 0.5 * nu + 0.25) + 2);
        std::vector<double> z;
        for (int start = 1;; start += want) {
            std::vector<double> batch;
            boost::math::cyl_bessel_j_zero(static_cast<double>(nu), start, static_cast<unsigned>(want), std::back_inserter(batch));
            z.insert(z.end(), batch.begin(), batch.end());
            if (batch.back() >= kmax) break;
        }
        auto& out = per[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < z.size() && z[k] < kmax; ++k) {
            double lam = z[k] * z[k] / (d.radius * d.radius);
            int m = nu == 0 ? 1 : sep.mult;
            for (int r = 0; r < m; ++r) out.push_back({nu, static_cast<int>(k) + 1, lam});
        }
    });
    std::vector<Mode> all;
    for (auto& v : per) all.insert(all.end(), v.begin(), v.end());
    std::stable_sort(all.begin(), all.end(), [](const Mode& a, const Mode& b) { return a.lambda < b.lambda; });
    return all;
}
}  // namespace

std::vector<Mode> dirichlet_modes(const SpectralDomain& d, long count, int threads) {
    if (count < 1) throw InputError("count must be positive");
    require_exact(d);
    // invert the two-term Weyl law, with slack
    double s = (d.perimeter + std::sqrt(d.perimeter * d.perimeter + 16.0 * kPi * d.area * count)) / (2.0 * d.area);
    double lam = 1.1 * s * s + 30.0 / (d.radius * d.radius);
    for (;;) {
        auto m = modes_below(d, lam, threads);
        if (static_cast<long>(m.size()) >= count) {
            m.resize(static_cast<std::size_t>(count));
            return m;
        }
        lam *= 1.3;
    }
}

std::vector<double> dirichlet_spectrum(const SpectralDomain& d, long count, int threads) {
    std::vector<double> out;
    for (const auto& m : dirichlet_modes(d, count, threads)) out.push_back(m.lambda);
    return out;
}

std::vector<double> spectrum_below(const SpectralDomain& d, double lambda_max, int threads) {
    std::vector<double> out;
    for (const auto& m : modes_below(d, lambda_max, threads)) out.push_back(m.lambda);
    return out;
}

HeatCoeffs heat_trace_coefficients(const SpectralDomain& d, const Weight& weight) {
    const Weight& s = d.sigma;  // metric exp(2 s)|dz|^2
    constexpr double h = 1e-4;
    auto w = [&](cplx z) { return weight ? weight(z.real(), z.imag()) : 1.0; };
    for (const Corner& c : d.corners) {
        double v = w(c.location) + at(s, c.location);
        if (!std::isfinite(v)) throw InputError("weight is not finite at a corner");
    }
    HeatCoeffs out;
    out.a0 = area_integral<30>(d, [&](double x, double y) { return w({x, y}) * std::exp(2.0 * at(s, {x, y})); }) / (4.0 * kPi);
    out.a1 = -boundary_integral<30>(d, [&](cplx z, cplx, double) { return w(z) * std::exp(at(s, z)); }) / (8.0 * std::sqrt(kPi));
    // K_g dvol_g = -lap s dA, k_g dl_g = (k + d_n s) dl, d_nu_g w dl_g = d_n w dl
    double curv = s ? area_integral<30>(d, [&](double x, double y) { return -w({x, y}) * laplacian(s, x, y, h); }) : 0.0;
    double geo = boundary_integral<30>(d, [&](cplx z, cplx n, double k) { return w(z) * (k + normal_derivative(s, z, n, h)); });
    double flux = weight ? boundary_integral<30>(d, [&](cplx z, cplx n, double) { return normal_derivative(weight, z, n, h); }) : 0.0;
    double corners = 0.0;
    for (const Corner& c : d.corners) corners += (1.0 / c.beta - c.beta) * w(c.location);
    out.a2 = curv / (12.0 * kPi) + geo / (12.0 * kPi) + flux / (8.0 * kPi) + corners / 24.0;
    return out;
}

double heat_trace(const std::vector<double>& spectrum, double t) {
    double s = 0.0;
    for (double l : spectrum) s += std::exp(-l * t);
    return s;
}

nlohmann::json Determinant::to_json() const {
    return {{"shape", shape_name(shape)}, {"count", count}, {"logdet", logdet}, {"uncertainty", uncertainty}};
}

Determinant zeta_determinant(const SpectralDomain& d, double max_uncertainty, int threads) {
    require_exact(d);
    const HeatCoeffs c = heat_trace_coefficients(d);
    const double r2 = d.radius * d.radius;
    const double lo = kDeltaLo * r2, hi = kDeltaHi * r2, lam = kCut / lo;
    auto ev = spectrum_below(d, lam, threads);
    std::vector<double> s, y;
    for (double delta : geometric_grid(lo, hi, 16)) {
        // -zeta'(0) = -M - R + a0/delta + 2 a1/sqrt(delta) - a2 (log delta + gamma), R = O(sqrt(delta))
        double m = loop_sum(ev, delta);
        s.push_back(std::sqrt(delta / r2));
        y.push_back(-m + c.a0 / delta + 2.0 * c.a1 / std::sqrt(delta) - c.a2 * (std::log(delta) + kEulerGamma));
    }
    double v3 = intercept(s, y, 3), v4 = intercept(s, y, 4);
    Determinant out;
    out.shape = d.shape;
    out.count = static_cast<long>(ev.size());
    out.logdet = v4;
    out.uncertainty = std::abs(v4 - v3) + tail_bound(lo, lam, d.area);
    if (out.uncertainty > max_uncertainty)
        throw NumericalError("log det uncertainty " + std::to_string(out.uncertainty) + " above tolerance; increase the eigenvalue count");
    return out;
}

double zeta_at_zero(const SpectralDomain& d, int threads) {
    require_exact(d);
    const HeatCoeffs c = heat_trace_coefficients(d);
    const double r2 = d.radius * d.radius, lo = 1e-3 * r2;
    auto ev = spectrum_below(d, kCut / lo, threads);
    std::vector<double> s, y;
    for (double t : geometric_grid(lo, 0.1 * r2, 24)) {
        s.push_back(std::sqrt(t / r2));
        y.push_back(heat_trace(ev, t) - c.a0 / t - c.a1 / std::sqrt(t));
    }
    return intercept(s, y, 4);
}

double logdet_closed_form(Shape shape) {
    const double lp = 0.5 * std::log(kPi), l2 = std::log(2.0);
    switch (shape) {
        case Shape::disc: return -l2 / 6.0 - lp - 2.0 * kZetaPrimeMinusOne - 5.0 / 12.0;
        case Shape::half_disc:
        case Shape::disc_with_diameter_component: return -5.0 / 24.0 - kZetaPrimeMinusOne - l2 / 3.0 - lp;
        case Shape::quarter_disc: break;
    }
    throw InputError("no closed form for " + shape_name(shape));
}

namespace {

// change of log det from the metric exp(2 s0)|dz|^2 (s0 = domain.sigma) to exp(2 (s0 + sigma))|dz|^2
template <int N>
double anomaly(const SpectralDomain& d, const Weight& sigma, const PaOptions& o) {
    const double h = o.fd_step;
    const Weight& s0 = d.sigma;
    // the Dirichlet integral is conformally invariant; K dvol = -lap s0 dA, k dl = (k0 + d_n s0) dl
    double bulk = area_integral<N>(d, [&](double x, double y) {
        return 0.5 * grad2(sigma, x, y, h) - laplacian(s0, x, y, 1e-3) * sigma(x, y);
    });
    double geo = boundary_integral<N>(d, [&](cplx z, cplx n, double k) { return (k + normal_derivative(s0, z, n, h)) * at(sigma, z); });
    double flux = boundary_integral<N>(d, [&](cplx z, cplx n, double) { return normal_derivative(sigma, z, n, h); });
    double corners = 0.0;
    if (o.corner_terms)
        for (const Corner& c : d.corners) corners += (1.0 / c.beta - c.beta) * at(sigma, c.location);
    return (bulk + geo) / (6.0 * kPi) + flux / (4.0 * kPi) + corners / 12.0;
}

}  // namespace

double polyakov_alvarez(const SpectralDomain& d, const Weight& sigma, double logdet_reference, const PaOptions& opts) {
    if (!sigma) return logdet_reference;
    for (const Corner& c : d.corners)
        if (!std::isfinite(at(sigma, c.location))) throw InputError("sigma is not finite at a corner");
    double coarse = anomaly<20>(d, sigma, opts), fine = anomaly<40>(d, sigma, opts);
    if (!std::isfinite(fine) || std::abs(fine - coarse) > opts.tol)
        throw NumericalError("anomaly quadrature did not settle (" + std::to_string(std::abs(fine - coarse)) + ")");
    return logdet_reference - fine;
}

DetPotential potential_via_determinants(int threads) {
    DetPotential r;
    r.logdet_disc = zeta_determinant(SpectralDomain::make(Shape::disc), 1e-3, threads).logdet;
    r.logdet_half = zeta_determinant(SpectralDomain::make(Shape::disc_with_diameter_component), 1e-3, threads).logdet;
    r.H_tilde = r.logdet_disc - 2.0 * r.logdet_half;
    // phi(z) = i (1 + iz) / (1 - iz) sends the disc to H and the diameter [-1, 1] to the unit semicircle
    multichord::Multichord mc;
    mc.x = {-1.0, 1.0};
    mc.pattern = multichord::LinkPattern::parse("12");
    mc.chords = {multichord::semicircle(-1.0, 1.0, 2000)};
    auto dphi = [](double x) { return 2.0 / std::norm(cplx(1.0, 0.0) - cplx(0.0, x)); };
    r.H_loewner = potential::loewner_potential(mc).H - 0.25 * (std::log(dphi(1.0)) + std::log(dphi(-1.0)));
    r.lambda = r.H_tilde - r.H_loewner;
    return r;
}

CutoffResult loop_mass_cutoff(const SpectralDomain& d, double delta, int threads) {
    require_exact(d);
    const double r2 = d.radius * d.radius;
    if (!(delta > 0.0) || delta >= 0.5 * r2) throw InputError("delta must lie in (0, 0.5)");
    const double lam = kCut / delta;
    auto ev = spectrum_below(d, lam, threads);
    CutoffResult r;
    r.delta = delta;
    r.mass = loop_sum(ev, delta);
    r.tail = tail_bound(delta, lam, d.area);
    if (r.tail > 1e-4) throw NumericalError("truncation tail above 1e-4");
    const HeatCoeffs c = heat_trace_coefficients(d);
    double logdet = zeta_determinant(d, 1e-3, threads).logdet;
    r.expansion = d.area / (4.0 * kPi * delta) - d.perimeter / (4.0 * std::sqrt(kPi * delta)) - logdet -
                  c.a2 * (std::log(delta) + kEulerGamma);
    return r;
}

}  // namespace llab::spectral
