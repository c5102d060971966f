#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "loewner_lab/multichord.hpp"

namespace llab::mc_sle {

using loewner::SLEParams;

struct McConfig {
    std::uint64_t seed = 1;
    long n_samples = 1000;
    double dt = 1e-3;
    double T = 1.0;
    double r = 0.1;
    double R = 1.0;
    bool geometric = true;  // steps max(dt, 0.01 t); false gives the uniform grid dt
    int threads = 0;

    void validate() const;
};

struct SlePath {
    Curve curve;                          // with capacity times
    std::vector<loewner::SlitMap> maps;   // the Loewner chain, in order
    std::vector<double> driver;           // W at the step ends
};

/// Sample `index` of the run: Brownian driver sqrt(kappa) B on [0, T], Gaussian increments.
SlePath sample_sle_path(const SLEParams& params, const McConfig& cfg, std::uint64_t index);

/// Sample 0 of the run.
Curve sample_sle(const SLEParams& params, const McConfig& cfg);

/// SLE chord of (H; a, b) as the Mobius image of a path from 0 to infinity, closed at b.
Curve chord_image(const Curve& path, double a, double b);

struct GibbsOptions {
    int sweeps = 3;
    int max_rejections = 100;
    double horizon = 2500.0;  // capacity in the (0, infinity) frame before the chord is closed
};

/// Systematic-sweep Gibbs sampler started at the geodesic multichord; chord j is resampled as SLE in
/// its component (sampled in (H; 0, infinity) and pulled back) until it avoids the others.
multichord::Multichord gibbs_multichordal(const std::vector<double>& x, const multichord::LinkPattern& alpha, const SLEParams& params,
                              const McConfig& cfg, const GibbsOptions& opts = {});

/// Gamma(12/kappa) / (Gamma(8/kappa) Gamma(4/kappa + 1)) via log-Gamma.
double c_kappa_bound(double kappa);

struct ReturnResult {
    double p_hat = 0.0;
    double stderr_ = 0.0;
    double bound = 0.0;
    long hits = 0;
    long samples = 0;
    double horizon = 0.0;  // capacity at which paths were truncated
    bool vacuous = false;  // no hits and bound < 10 / samples
    bool pass = false;     // p_hat <= bound + 3 stderr
};

/// Frequency of returning to the semicircle of radius r after first reaching radius R.
/// Paths are truncated at capacity 20 R^2; the grid step is dt R^2.
ReturnResult return_probability(const SLEParams& params, const McConfig& cfg);

/// Same for several radii from one set of paths.
std::vector<ReturnResult> return_probabilities(const SLEParams& params, const McConfig& cfg, std::span<const double> radii);

/// Boundary arc [lo, hi] of the half-plane, or an arc of the domain boundary for slit domains.
struct Arc {
    double lo = 0.0;
    double hi = 0.0;
};

/// E_D(A1, A2) = double integral of the Poisson excursion kernel, adaptive Gauss-Kronrod.
double excursion_measure(const conformal::DomainSpec& domain, Arc a1, Arc a2, double tol = 1e-10);

struct LdpRow {
    double kappa = 0.0;
    double p_hat = 0.0;
    double log_p = 0.0;
    double klogp = 0.0;
    double stderr_ = 0.0;  // of klogp
    long hits = 0;
    bool zero_hits = false;
};

struct LdpEvent {
    enum class Kind { exit_cone, hit_ball } kind = Kind::exit_cone;
    double theta = kPi / 3;  // exit_cone
    cplx center{1.0, 1.0};   // hit_ball
    double radius = 0.25;
    double t0 = 0.25;        // capacity window for exit_cone
};

/// Table of kappa log P[event] for decreasing kappas; trend_ok reports the monotone trend
/// (each step beyond two standard errors) over rows with hits.
std::vector<LdpRow> ldp_decay_probe(const LdpEvent& event, std::span<const double> kappas, const McConfig& cfg,
                                    bool* trend_ok = nullptr);

/// 8 log sin(theta): the rate for leaving Cone(theta).
double cone_rate(double theta);

}  // namespace llab::mc_sle
