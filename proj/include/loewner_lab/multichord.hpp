#pragma once

#include <string>
#include <utility>

#include "loewner_lab/conformal.hpp"

namespace llab::multichord {

/// Planar pairing of 1..2n; pairs stored as (a, b) with a < b, sorted by a.
struct LinkPattern {
    std::vector<std::pair<int, int>> pairs;

    std::size_t n() const { return pairs.size(); }
    bool planar() const;
    std::string to_string() const;                 // "12|34" when every index is a digit, else "1,2|3,4"
    static LinkPattern parse(const std::string& s); // accepts both forms
    bool operator==(const LinkPattern&) const = default;
};

std::vector<LinkPattern> enumerate_link_patterns(int n);

struct Multichord {
    std::vector<double> x;
    LinkPattern pattern;
    std::vector<Curve> chords;  // chord j runs from x[a_j - 1] to x[b_j - 1]
};

struct GeodesicOptions {
    double tol = 1e-10;
    int max_sweeps = 200;
    int samples = 400;
    double log_span = 10.0;
    int eval_refine = 4;  // potentials: chords are regenerated at eval_refine * samples before evaluation
};

/// Semicircle from a to b with `samples` interior points spaced evenly in angle.
Curve semicircle(double a, double b, int samples);

/// Domain of chord j: the half-plane minus the other chords, component containing chord j.
conformal::DomainSpec complement_of(const Multichord& mc, std::size_t j);

Multichord geodesic_multichord(const std::vector<double>& x, const LinkPattern& alpha,
                               const GeodesicOptions& opts = {});

/// Same fixed-point sweep from a given admissible starting multichord.
Multichord geodesic_multichord_from(Multichord start, const GeodesicOptions& opts = {});

/// Largest chord energy of a chord in its own complementary component.
double geodesic_defect(const Multichord& mc);

LinkPattern classify_link_pattern(const std::vector<Curve>& chords, const std::vector<double>& x, double tol = 1e-3);

/// Max over chords (matched by endpoint pair) of the Hausdorff distance.
double multichord_distance(const Multichord& a, const Multichord& b);

void validate_points(const std::vector<double>& x, const LinkPattern& alpha);

}  // namespace llab::multichord
