#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace llab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Malformed or out-of-contract input (CLI exit status 1).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to reach its tolerance (CLI exit status 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double geom = 1e-3;    // curve units
    double energy = 1e-2;  // Loewner energy units
};

inline bool is_infinite(cplx z) {
    return !std::isfinite(z.real()) || !std::isfinite(z.imag());
}

inline cplx complex_infinity() {
    return {std::numeric_limits<double>::infinity(), 0.0};
}

/// Polyline in the closed upper half-plane. points[0] is the base on the real line.
struct Curve {
    std::vector<cplx> points;
    std::vector<double> capacity_times;  // optional, aligned with points

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    cplx base() const { return points.front(); }
    cplx tip() const { return points.back(); }
};

/// Symmetric Hausdorff distance between two polylines (segments included).
double hausdorff_distance(const Curve& a, const Curve& b);

/// Distance from a point to a polyline.
double distance_to_polyline(cplx p, const std::vector<cplx>& poly);

/// True when the open polylines a and b share a point (segment intersection).
bool polylines_intersect(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Index of the first vertex whose outgoing segment crosses an earlier non-adjacent one, or -1.
long first_self_intersection(const std::vector<cplx>& poly);

}  // namespace llab
