#pragma once

#include <cstdint>

#include "loewner_lab/multichord.hpp"

namespace llab::multichord {

using Poly = std::vector<double>;  // ascending powers

/// Real rational function h = P / Q.
/// The "endpoints" normalization means h(x_1) = 0, h(x_2n) = infinity, h(infinity) = 1,
/// which leaves exactly one representative per class; Q is then monic.
struct RationalFn {
    Poly p;
    Poly q;
    std::string normalization = "none";

    cplx operator()(cplx z) const;
    int degree() const;
};

Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_add(const Poly& a, const Poly& b, double sb = 1.0);
Poly poly_derivative(const Poly& a);
cplx poly_eval(const Poly& a, cplx z);
Poly poly_trim(Poly a, double rel = 1e-14);
/// All complex roots (companion matrix eigenvalues).
std::vector<cplx> poly_roots(const Poly& a);

/// Coefficients of P'Q - PQ'.
Poly wronskian(const RationalFn& f);

/// Post-composes with the real Mobius map that realizes the endpoints normalization for (x1, x2n).
RationalFn normalize_endpoints(const RationalFn& f, double x1, double x2n);

/// Same class up to real Mobius post-composition (compared after normalization).
bool equivalent(const RationalFn& f, const RationalFn& g, double x1, double x2n, double tol = 1e-7);

struct RationalOptions {
    double tol = 1e-12;  // Newton residual, relative
    int max_newton = 60;
    GeodesicOptions geodesic{};
    int multistart = 4000;             // random restarts for classes the geodesic seeds miss
    std::uint64_t multistart_seed = 7;
};

/// Newton solve of W(x_j) = 0, j = 2..2n-1, from any seed of degree n + 1.
/// Throws NumericalError when Newton fails or the critical points come out wrong.
RationalFn solve_rational(const std::vector<double>& x, RationalFn seed, const RationalOptions& opts = {});

/// Seed read off the geodesic multichord: h restricted to the outer face is a uniformizer.
RationalFn seed_from_multichord(const Multichord& mc);

/// One representative per class, one class per link pattern, in enumerate_link_patterns order.
/// A solution is accepted for a pattern only when its traced real locus has that pattern.
std::vector<RationalFn> rational_solutions(const std::vector<double>& x, const RationalOptions& opts = {});

struct Window {
    double re_min = -1.0, re_max = 1.0, im_max = 1.0;
};

/// Traces h^{-1}(R) in the open upper half-plane from each critical point.
Multichord real_locus(const RationalFn& f, const std::vector<double>& x, const Window& window, double step);
/// Window spanning three times the width of the marked points; step 5e-3 of the width or less.
Multichord real_locus(const RationalFn& f, const std::vector<double>& x);

}  // namespace llab::multichord
