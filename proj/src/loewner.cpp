#include "loewner_lab/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace llab::loewner {

DrivingFunction::DrivingFunction(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.empty() || times_.size() != values_.size())
        throw InputError("driving function needs equally long, non-empty times and values");
    if (times_[0] != 0.0) throw InputError("driving function times must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1])) throw InputError("driving function times must increase strictly (index " + std::to_string(i) + ")");
}

double DrivingFunction::operator()(double t) const {
    if (t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    double s = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return values_[i - 1] + s * (values_[i] - values_[i - 1]);
}

namespace {

// sqrt(w^2 + s) with the branch whose imaginary part has the sign of Im w (w off the real line)
inline cplx branch_sqrt(double x, double y, double s) {
    double cr = x * x - y * y + s, ci = 2.0 * x * y;
    double m = std::sqrt(cr * cr + ci * ci);
    double re, im;
    if (cr >= 0.0) {
        re = std::sqrt(0.5 * (m + cr));
        im = re > 0.0 ? 0.5 * ci / re : 0.0;
    } else {
        im = std::sqrt(0.5 * (m - cr));
        re = 0.5 * ci / im;
    }
    if ((im < 0.0) != (y < 0.0)) return {-re, -im};
    return {re, im};
}

}  // namespace

cplx SlitMap::forward(cplx z) const {
    double x = z.real() - u, y = z.imag();
    if (y == 0.0) {
        double r = std::sqrt(x * x + a * a);
        return {u + (x > 0 ? r : -r), 0.0};
    }
    cplx s = branch_sqrt(x, y, a * a);
    return {u + s.real(), s.imag()};
}

cplx SlitMap::inverse(cplx z) const {
    double x = z.real() - u, y = z.imag();
    if (y == 0.0) {
        if (std::abs(x) < a) return {u, std::sqrt(a * a - x * x)};
        double r = std::sqrt(x * x - a * a);
        return {u + (x > 0 ? r : -r), 0.0};
    }
    cplx s = branch_sqrt(x, y, -a * a);
    return {u + s.real(), s.imag()};
}

Curve evolve_slits(std::span<const double> steps, std::span<const double> drivers, double base) {
    if (steps.size() != drivers.size()) throw InputError("evolve_slits: steps and drivers differ in length");
    std::vector<SlitMap> maps;
    maps.reserve(steps.size());
    Curve out;
    out.points.reserve(steps.size() + 1);
    out.capacity_times.reserve(steps.size() + 1);
    out.points.emplace_back(base, 0.0);
    out.capacity_times.push_back(0.0);
    double t = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (!(steps[k] > 0.0)) throw InputError("evolve_slits: non-positive step at index " + std::to_string(k));
        SlitMap m{drivers[k], 2.0 * std::sqrt(steps[k])};
        cplx z{m.u, m.a};
        for (std::size_t j = maps.size(); j-- > 0;) z = maps[j].inverse(z);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || z.imag() < -1e-12 * (1.0 + std::abs(z)))
            throw NumericalError("Loewner step " + std::to_string(k) + " left the half-plane");
        maps.push_back(m);
        t += steps[k];
        out.points.push_back(z);
        out.capacity_times.push_back(t);
    }
    return out;
}

Curve evolve_forward(const DrivingFunction& driver, int steps_per_unit) {
    if (steps_per_unit < 1) throw InputError("steps_per_unit must be at least 1");
    std::vector<double> steps, drivers;
    const auto& ts = driver.times();
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        double len = ts[i + 1] - ts[i];
        auto m = static_cast<std::size_t>(std::ceil(len * steps_per_unit - 1e-9));
        m = std::max<std::size_t>(m, 1);
        double h = len / static_cast<double>(m);
        for (std::size_t j = 0; j < m; ++j) {
            steps.push_back(h);
            drivers.push_back(driver(ts[i] + (static_cast<double>(j) + 2.0 / 3.0) * h));
        }
    }
    return evolve_slits(steps, drivers, driver.values().front());
}

ZipperResult unzip(const Curve& curve, const ZipperOptions& opts) {
    if (curve.size() < 2) throw InputError("zipper needs at least two vertices");
    const cplx base = curve.base();
    if (std::abs(base.imag()) > 1e-9 * (1.0 + std::abs(base))) throw InputError("curve base is not on the real line");
    const double x0 = base.real();
    if (opts.check_simple) {
        long bad = first_self_intersection(curve.points);
        if (bad >= 0) throw NumericalError("curve is not simple: segment from vertex " + std::to_string(bad) + " crosses an earlier one");
    }

    ZipperResult res;
    std::vector<double> times{0.0}, values{0.0};
    double t = 0.0;
    double last_u = 0.0;
    cplx prev = base;
    for (std::size_t k = 1; k < curve.size(); ++k) {
        cplx p = curve.points[k];
        if (is_infinite(p)) break;
        if (std::abs(p - prev) <= 1e-14 * (1.0 + std::abs(p))) continue;
        prev = p;
        cplx w = p - x0;
        if (w.imag() <= 1e-12 * (1.0 + std::abs(w))) w += cplx(0.0, opts.lift);
        for (const auto& m : res.maps) w = m.forward(w);
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
            throw NumericalError("zipper overflow at vertex " + std::to_string(k));
        if (w.imag() < -1e-9 * (1.0 + std::abs(w)))
            throw NumericalError("curve is not simple near vertex " + std::to_string(k));
        if (w.imag() <= 0.0) continue;
        SlitMap m{w.real(), w.imag()};
        double dt = m.dt();
        if (t + dt > opts.max_time) {
            res.truncated = true;
            break;
        }
        times.push_back(t + (2.0 / 3.0) * dt);
        values.push_back(m.u);
        t += dt;
        last_u = m.u;
        res.maps.push_back(m);
        res.vertices_used = k;
    }
    if (res.maps.empty()) throw NumericalError("zipper produced no steps");
    times.push_back(t);
    values.push_back(last_u);
    res.driver = DrivingFunction(std::move(times), std::move(values));
    return res;
}

DrivingFunction compute_driving(const Curve& curve, const ZipperOptions& opts) { return unzip(curve, opts).driver; }

double half_plane_capacity(const Curve& curve) {
    if (!curve.capacity_times.empty()) return 2.0 * curve.capacity_times.back();
    // a polyline coming back to the real line encloses a hull; stop at its landing vertex
    Curve c;
    c.points.push_back(curve.base());
    for (std::size_t k = 1; k < curve.size(); ++k) {
        c.points.push_back(curve.points[k]);
        if (std::abs(curve.points[k].imag()) <= 1e-12 * (1.0 + std::abs(curve.points[k]))) break;
    }
    return 2.0 * unzip(c).driver.final_time();
}

double dirichlet_energy(const DrivingFunction& driver, std::optional<double> up_to) {
    const auto& ts = driver.times();
    const auto& ws = driver.values();
    double end = up_to.value_or(ts.back());
    double e = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts[i - 1] >= end) break;
        double t1 = std::min(ts[i], end);
        double slope = (ws[i] - ws[i - 1]) / (ts[i] - ts[i - 1]);
        e += 0.5 * slope * slope * (t1 - ts[i - 1]);
    }
    return e;
}

bool exits_cone(const Curve& curve, double theta, double t_from, double t_to) {
    bool timed = curve.capacity_times.size() == curve.points.size();
    for (std::size_t k = 1; k < curve.size(); ++k) {
        if (timed && (curve.capacity_times[k] < t_from || curve.capacity_times[k] > t_to)) continue;
        cplx z = curve.points[k] - curve.base().real();
        double arg = std::atan2(z.imag(), z.real());
        if (arg < theta || arg > kPi - theta) return true;
    }
    return false;
}

}  // namespace llab::loewner
