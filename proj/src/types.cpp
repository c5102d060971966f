#include "loewner_lab/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "loewner_lab/parallel.hpp"

namespace llab {

namespace {

double point_segment(cplx p, cplx a, cplx b) {
    cplx d = b - a;
    double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    double s = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + s * d));
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
    double d1 = cross(p2 - p1, q1 - p1);
    double d2 = cross(p2 - p1, q2 - p1);
    double d3 = cross(q2 - q1, p1 - q1);
    double d4 = cross(q2 - q1, p2 - q1);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

double one_sided(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, distance_to_polyline(a[i], b));
        if (i + 1 < a.size()) worst = std::max(worst, distance_to_polyline(0.5 * (a[i] + a[i + 1]), b));
    }
    return worst;
}

}  // namespace

double distance_to_polyline(cplx p, const std::vector<cplx>& poly) {
    if (poly.empty()) return std::numeric_limits<double>::infinity();
    if (poly.size() == 1) return std::abs(p - poly[0]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) best = std::min(best, point_segment(p, poly[i], poly[i + 1]));
    return best;
}

double hausdorff_distance(const Curve& a, const Curve& b) {
    return std::max(one_sided(a.points, b.points), one_sided(b.points, a.points));
}

bool polylines_intersect(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() < 2 || b.size() < 2) return false;
    // bounding boxes of b's segments are cheap to skip against
    double bx0 = 1e300, bx1 = -1e300, by0 = 1e300, by1 = -1e300;
    for (cplx q : b) {
        bx0 = std::min(bx0, q.real()); bx1 = std::max(bx1, q.real());
        by0 = std::min(by0, q.imag()); by1 = std::max(by1, q.imag());
    }
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        cplx p1 = a[i], p2 = a[i + 1];
        if (std::max(p1.real(), p2.real()) < bx0 || std::min(p1.real(), p2.real()) > bx1) continue;
        if (std::max(p1.imag(), p2.imag()) < by0 || std::min(p1.imag(), p2.imag()) > by1) continue;
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            cplx q1 = b[j], q2 = b[j + 1];
            if (std::max(q1.real(), q2.real()) < std::min(p1.real(), p2.real())) continue;
            if (std::min(q1.real(), q2.real()) > std::max(p1.real(), p2.real())) continue;
            if (std::max(q1.imag(), q2.imag()) < std::min(p1.imag(), p2.imag())) continue;
            if (std::min(q1.imag(), q2.imag()) > std::max(p1.imag(), p2.imag())) continue;
            if (segments_cross(p1, p2, q1, q2)) return true;
        }
    }
    return false;
}

long first_self_intersection(const std::vector<cplx>& poly) {
    const std::size_t n = poly.size();
    for (std::size_t j = 2; j + 1 < n; ++j) {
        cplx q1 = poly[j], q2 = poly[j + 1];
        double qx0 = std::min(q1.real(), q2.real()), qx1 = std::max(q1.real(), q2.real());
        double qy0 = std::min(q1.imag(), q2.imag()), qy1 = std::max(q1.imag(), q2.imag());
        for (std::size_t i = 0; i + 1 < j; ++i) {
            cplx p1 = poly[i], p2 = poly[i + 1];
            if (std::max(p1.real(), p2.real()) < qx0 || std::min(p1.real(), p2.real()) > qx1) continue;
            if (std::max(p1.imag(), p2.imag()) < qy0 || std::min(p1.imag(), p2.imag()) > qy1) continue;
            if (segments_cross(p1, p2, q1, q2)) return static_cast<long>(j);
        }
    }
    return -1;
}

}  // namespace llab

namespace llab {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LOEWNER_LAB_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace llab
