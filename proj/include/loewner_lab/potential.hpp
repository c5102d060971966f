#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>

#include "loewner_lab/multichord.hpp"

namespace llab::potential {

using multichord::GeodesicOptions;
using multichord::LinkPattern;
using multichord::Multichord;

enum class LoopMethod { deterministic, monte_carlo };

struct LoopMcOptions {
    double mesh = 0.02;      // walk step length
    double t_cutoff = 1e-3;  // loops shorter than this are dropped
    long n_samples = 200000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: LOEWNER_LAB_THREADS or hardware
};

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// H = sum(energy_terms) + loop_term + sum(poisson_terms); all multichords live in H with x on R.
struct PotentialReport {
    double H = 0.0;
    std::vector<double> energy_terms;   // I_H(gamma_j) / 12
    double loop_term = 0.0;             // m_H
    std::vector<double> poisson_terms;  // -log(P_H) / 4
    LoopMethod method = LoopMethod::deterministic;
    std::optional<double> stderr_;

    nlohmann::json to_json() const;
};

/// m by peeling chords in the given order (default 0..n-1): the chord order[k] is measured
/// in the component left by the chords after it.
double loop_term_deterministic(const Multichord& mc, std::span<const std::size_t> order = {});

/// max - min of loop_term_deterministic over all peeling orders.
double peeling_spread(const Multichord& mc);

/// Brownian-bridge loops with Gaussian steps of length ~mesh, roots uniform in a box around the
/// chords, log-uniform durations in [t_cutoff, (2 span)^2].
McEstimate loop_term_mc(const Multichord& mc, const LoopMcOptions& opts = {});

/// Mass of loops hitting both the curve and the obstacles, accumulated along the curve's own
/// Loewner chain (given as slit maps from 0 toward infinity) as -1/3 of the integrated Schwarzian
/// (capacity 2t convention).
double loop_mass_along_chain(std::span<const loewner::SlitMap> chain, const std::vector<Curve>& obstacles);

/// |H(mc) - H_{D_j}(gamma_j) - H(mc without chord j)|, D_j the component of the other chords.
double cascade_defect(const Multichord& mc, std::size_t j);

PotentialReport loewner_potential(const Multichord& mc, LoopMethod method = LoopMethod::deterministic,
                                  const LoopMcOptions& mc_opts = {});

/// M(x, alpha). n = 1 uses the closed form 1/2 log|x2 - x1|.
double minimal_potential(const std::vector<double>& x, const LinkPattern& alpha, const GeodesicOptions& opts = {});

/// Smallest H(perturbed) - M over `count` random admissible bumps of the geodesic multichord.
double minimality_margin(const std::vector<double>& x, const LinkPattern& alpha, int count = 5, std::uint64_t seed = 3,
                         double amplitude = 0.05);

/// 12 (H(mc) - M(x, alpha)).
double multichord_energy(const Multichord& mc);

/// Residual of the j-th (1-based) null-state equation for a given gradient of U.
double null_state_residual(const std::vector<double>& x, int j, std::span<const double> grad);

/// Central-difference gradient of U = 12 M with step h.
std::vector<double> potential_gradient(const std::vector<double>& x, const LinkPattern& alpha, double h,
                                       const GeodesicOptions& opts = {});

/// Residual of the j-th (1-based) semiclassical null-state equation for U = 12 M, central differences.
double pde_residual(const std::vector<double>& x, const LinkPattern& alpha, int j, double h_fd,
                    const GeodesicOptions& opts = {});

struct FlowState {
    double t = 0.0;
    double W = 0.0;
    std::vector<double> V;  // the other marked points, in order
};

struct FlowResult {
    std::vector<FlowState> states;
    Curve trace;  // generated by W from x_{a_j}
    bool lifetime_reached = false;
    double lifetime = 0.0;  // collision time (extrapolated) when reached
};

struct FlowOptions {
    double t_max = std::numeric_limits<double>::infinity();  // capacity budget
    double rel_tol = 1e-8;
    double gap_stop = 1e-6;  // stop when W is this close to a V, relative to the initial gap
    GeodesicOptions geodesic{};
};

/// Loewner flow of the minimizer: dW/dt = -dU/dx_{a_j}, dV/dt = 2 / (V - W); j is the 1-based chord index.
FlowResult minimizer_flow(const std::vector<double>& x, const LinkPattern& alpha, int j, double dt,
                          const FlowOptions& opts = {});

struct ProbeRow {
    double kappa = 0.0;
    double klogZ = 0.0;
    double stderr_ = 0.0;  // of klogZ (delta method)
    long accepted = 0;     // disjoint samples
    long samples = 0;
};

/// kappa log Z_alpha from independent SLE chords: ((6-kappa)/2) sum log P + kappa log E[1{disjoint} exp(c m / 2)].
std::vector<ProbeRow> partition_limit_probe(const std::vector<double>& x, const LinkPattern& alpha,
                                            std::span<const double> kappas, long n_samples, std::uint64_t seed,
                                            int threads = 0);

}  // namespace llab::potential
