#pragma once

#include <optional>

#include "json.hpp"
#include "loewner_lab/loewner.hpp"

namespace llab::conformal {

enum class DomainKind { half_plane, disc, slit_complement };

/// Marked domain. For slit_complement the slits are removed from the upper half-plane;
/// slits either join two real points (chords) or grow from one real point.
struct DomainSpec {
    DomainKind kind = DomainKind::half_plane;
    std::vector<Curve> slits;
    cplx face_anchor{0.0, 1e6};

    static DomainSpec half_plane() { return {}; }
    static DomainSpec disc() { return {DomainKind::disc, {}, {0.0, 0.0}}; }
    static DomainSpec slit_complement(std::vector<Curve> slits, cplx anchor) {
        return {DomainKind::slit_complement, std::move(slits), anchor};
    }
};

/// One elementary map. Mobius: (a z + b) / (c z + d). Slit: loewner::SlitMap{p, q}.
/// Arc: opens the small arc joining the real points p and q (treated as a semicircle) and keeps
/// the side selected by `side`; z -> side * sgn(q - p) * (2z - p - q) / (q - z)^2. This is
/// (M^2 - 1) / |q - p| for M the Mobius map p -> 0, q -> infinity, written without cancellation.
struct Step {
    enum class Kind { mobius, slit, arc };
    Kind kind = Kind::mobius;
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};
    double p = 0.0;
    double q = 0.0;
    int side = 1;
    bool inverted = false;

    static Step mobius(cplx a, cplx b, cplx c, cplx d) { Step s; s.a = a; s.b = b; s.c = c; s.d = d; return s; }
    static Step slit(double u, double height) { Step s; s.kind = Kind::slit; s.p = u; s.q = height; return s; }
    static Step arc(double t1, double t2, int side) { Step s; s.kind = Kind::arc; s.p = t1; s.q = t2; s.side = side; return s; }

    cplx apply(cplx z) const;
    cplx unapply(cplx z) const;
};

class MapChain {
public:
    MapChain() = default;
    explicit MapChain(std::vector<Step> steps) : steps_(std::move(steps)) {}

    cplx operator()(cplx z) const;
    cplx inverse(cplx z) const;
    MapChain inverted() const;
    MapChain then(const MapChain& other) const;

    void push(Step s) { steps_.push_back(s); }
    const std::vector<Step>& steps() const { return steps_; }
    std::size_t size() const { return steps_.size(); }

    nlohmann::json to_json() const;
    static MapChain from_json(const nlohmann::json& j);

private:
    std::vector<Step> steps_;
};

/// Real Mobius map of the half-plane with x -> 0 and y -> infinity (either may be infinite).
/// With third_point set, the map is rescaled to have |derivative| = 1 there.
MapChain mobius_to_reference(cplx x, cplx y, std::optional<double> third_point = std::nullopt);

/// Map of the component containing the anchor onto the half-plane, without final normalization.
MapChain component_chain(const DomainSpec& domain);

/// component_chain followed by the Mobius map sending the images of x, y to 0, infinity.
MapChain uniformize_component(const DomainSpec& domain, cplx x, cplx y);

/// |phi'(x)| at a real boundary point (central differences, two Richardson levels).
double boundary_derivative(const MapChain& chain, double x);
/// Same at a point of the unit circle, differencing along the circle.
double boundary_derivative_circle(const MapChain& chain, cplx zeta);

double poisson_kernel(const DomainSpec& domain, cplx x, cplx y);

Curve hyperbolic_geodesic(const DomainSpec& domain, cplx x, cplx y, int samples, double log_span = 10.0);

struct ChordEnergy {
    double energy = 0.0;
    bool truncated = false;
    loewner::DrivingFunction driver;
};

/// Loewner energy of a chord of (domain; x, y), computed in (H; 0, infinity).
ChordEnergy chord_energy(const Curve& curve, const DomainSpec& domain, cplx x, cplx y,
                         const loewner::ZipperOptions& opts = {});
ChordEnergy chord_energy_with(const Curve& curve, const MapChain& normalized, const loewner::ZipperOptions& opts = {});

/// True when the point lies under the chord (between the chord and the real segment joining its ends).
bool inside_chord(const Curve& chord, cplx z);
bool is_two_ended(const Curve& slit);

}  // namespace llab::conformal
