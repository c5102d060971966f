#pragma once

#include <limits>
#include <optional>
#include <span>

#include "loewner_lab/types.hpp"

namespace llab::loewner {

/// Loewner driver sampled in capacity time (hcap = 2t), piecewise-linear between samples.
class DrivingFunction {
public:
    DrivingFunction() = default;
    DrivingFunction(std::vector<double> times, std::vector<double> values);

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return times_.size(); }
    double final_time() const { return times_.back(); }

    /// Linear interpolation; constant extension past the last sample.
    double operator()(double t) const;

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

struct SLEParams {
    double kappa = 2.0;

    /// c(kappa) = (3 kappa - 8)(6 - kappa) / (2 kappa)
    double central_charge() const { return (3.0 * kappa - 8.0) * (6.0 - kappa) / (2.0 * kappa); }
};

/// One elementary vertical-slit map g(z) = u + sqrt((z-u)^2 + a^2), a = 2 sqrt(dt).
/// It removes the segment [u, u + i a] and has half-plane capacity a^2 / 2 = 2 dt.
struct SlitMap {
    double u = 0.0;
    double a = 0.0;

    cplx forward(cplx z) const;
    cplx inverse(cplx w) const;
    double dt() const { return 0.25 * a * a; }
};

/// Forward Loewner evolution from elementary slit maps with explicit step lengths.
/// The step k uses the constant value drivers[k] on a step of length steps[k]; base is W_0.
Curve evolve_slits(std::span<const double> steps, std::span<const double> drivers, double base = 0.0);

/// Forward Loewner evolution. Each driver interval is split into
/// ceil(length * steps_per_unit) slit steps; step k is driven by W at the 2/3 point.
Curve evolve_forward(const DrivingFunction& driver, int steps_per_unit);

struct ZipperOptions {
    double lift = 1e-3;                                             // epsilon_geom lift for on-axis vertices
    double max_time = std::numeric_limits<double>::infinity();      // T_max truncation
    bool check_simple = true;                                       // segment self-intersection scan
};

struct ZipperResult {
    DrivingFunction driver;
    std::vector<SlitMap> maps;
    bool truncated = false;
    std::size_t vertices_used = 0;
};

/// Vertical-slit zipper. The base is translated to 0; the recovered value of step k is
/// reported at the 2/3 point of the step and the last value is held to the final time.
ZipperResult unzip(const Curve& curve, const ZipperOptions& opts = {});

DrivingFunction compute_driving(const Curve& curve, const ZipperOptions& opts = {});

double half_plane_capacity(const Curve& curve);

/// 1/2 * integral of |W'|^2 over [0, up_to] for the piecewise-linear interpolant.
double dirichlet_energy(const DrivingFunction& driver, std::optional<double> up_to = std::nullopt);

/// True when some point with capacity time in [t_from, t_to] leaves {theta <= arg z <= pi - theta}.
/// Without capacity times every point is checked.
bool exits_cone(const Curve& curve, double theta, double t_from = 0.0,
                double t_to = std::numeric_limits<double>::infinity());

}  // namespace llab::loewner
