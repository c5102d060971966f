#pragma once

#include <functional>
#include <string>
#include <vector>

#include "loewner_lab/types.hpp"
#include "json.hpp"

namespace llab::spectral {

enum class Shape { disc, half_disc, quarter_disc, disc_with_diameter_component };

Shape parse_shape(const std::string& name);
std::string shape_name(Shape s);

struct Corner {
    cplx location;
    double beta = 0.5;  // opening angle pi * beta
};

/// Weyl factor sigma(x, y); the metric is exp(2 sigma) |dz|^2.
using Weight = std::function<double(double, double)>;

struct SpectralDomain {
    Shape shape = Shape::disc;
    double radius = 1.0;
    std::vector<Corner> corners;
    Weight sigma;  // empty means flat
    double area = 0.0;
    double perimeter = 0.0;

    /// Flat domain of the given shape, centred at 0. The half disc is the upper one, the quarter
    /// disc the first-quadrant one.
    static SpectralDomain make(Shape shape, double radius = 1.0);
};

struct HeatCoeffs {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};

struct Mode {
    int nu = 0;
    int k = 0;
    double lambda = 0.0;
};

/// Dirichlet modes J_nu(j r / rho) in the angular basis of the shape, sorted by eigenvalue.
/// Degenerate disc modes (nu >= 1) appear twice.
std::vector<Mode> dirichlet_modes(const SpectralDomain& domain, long count, int threads = 0);
std::vector<double> dirichlet_spectrum(const SpectralDomain& domain, long count, int threads = 0);

/// All eigenvalues below lambda_max.
std::vector<double> spectrum_below(const SpectralDomain& domain, double lambda_max, int threads = 0);

/// Heat-trace coefficients of Tr(w exp(-t Delta)) by quadrature; w = 1 when weight is empty.
HeatCoeffs heat_trace_coefficients(const SpectralDomain& domain, const Weight& weight = {});

double heat_trace(const std::vector<double>& spectrum, double t);

struct Determinant {
    Shape shape = Shape::disc;
    long count = 0;  // eigenvalues used
    double logdet = 0.0;
    double uncertainty = 0.0;

    nlohmann::json to_json() const;
};

/// -zeta'(0), from the small-time split of the heat trace at a range of delta and a fit of the
/// remainder in powers of sqrt(delta). Throws NumericalError when the uncertainty exceeds max_uncertainty.
Determinant zeta_determinant(const SpectralDomain& domain, double max_uncertainty = 1e-3, int threads = 0);

/// zeta(0) from the same split; for Dirichlet domains it equals a2.
double zeta_at_zero(const SpectralDomain& domain, int threads = 0);

/// zeta_R'(-1) = 1/12 - log A, A the Glaisher-Kinkelin constant.
inline constexpr double kZetaPrimeMinusOne = -0.165421143700451;

/// Closed forms for the flat unit disc and half disc.
double logdet_closed_form(Shape shape);

struct PaOptions {
    bool corner_terms = true;   // false only for the negative control
    double fd_step = 1e-5;      // first derivatives of sigma; the Laplacian uses 1e-3
    double tol = 1e-3;          // 20- against 40-point Gauss-Legendre
};

/// log det for exp(2 sigma) times the domain metric (flat, or exp(2 domain.sigma)|dz|^2), given the
/// reference log det of the domain metric.
double polyakov_alvarez(const SpectralDomain& domain, const Weight& sigma, double logdet_reference,
                        const PaOptions& opts = {});

struct DetPotential {
    double logdet_disc = 0.0;
    double logdet_half = 0.0;
    double H_tilde = 0.0;
    double H_loewner = 0.0;  // diameter of the unit disc
    double lambda = 0.0;
};

/// Diameter of the unit disc: H_tilde = log det(disc) - 2 log det(half disc), lambda = H_tilde - H.
DetPotential potential_via_determinants(int threads = 0);

struct CutoffResult {
    double delta = 0.0;
    double mass = 0.0;       // sum of E1(lambda delta)
    double expansion = 0.0;
    double tail = 0.0;       // bound on the omitted eigenvalues
};

CutoffResult loop_mass_cutoff(const SpectralDomain& domain, double delta, int threads = 0);

}  // namespace llab::spectral
