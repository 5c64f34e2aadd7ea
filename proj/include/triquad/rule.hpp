#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "triquad/geometry.hpp"

namespace triquad {

/// Points with every areal coordinate >= -kInsideTolerance count as inside.
inline constexpr double kInsideTolerance = 1e-12;

struct Orbit {
    int type = 0;
    std::vector<double> params;
    double weight = 0.0;
};

/// Where a rule came from in a search: RNG seed, combination index, attempt.
struct Provenance {
    std::uint64_t seed = 0;
    int combination = 0;
    long attempt = 0;

    auto operator<=>(const Provenance&) const = default;
};

/// A symmetric cubature rule: orbits with parameters and one weight per
/// orbit point.
struct CandidateRule {
    SymmetryMode mode = SymmetryMode::Full;
    int degree = 0;
    std::vector<Orbit> orbits;
    Provenance provenance;

    OrbitKind kind(const Orbit& o) const { return OrbitKind::make(mode, o.type); }
    int point_count() const;

    /// Every point of every orbit, in orbit order.
    std::vector<ArealPoint> points() const;
    /// One weight per entry of points().
    std::vector<double> weights() const;

    /// Orbit counts per type ([n0, n1, n2] or [n0, n1]).
    std::vector<int> orbit_counts() const;

    /// Copy with canonical orbit parameters, orbits sorted by (type, params).
    CandidateRule canonicalized() const;
};

/// Two canonicalized rules with the same structure whose parameters and
/// weights agree componentwise within tol.
bool same_rule(const CandidateRule& a, const CandidateRule& b, double tol = 1e-9);

/// Quality: P/N = all weights positive or not; I/O = all points inside or not.
enum class QualityFlag { PI, NI, PO, NO };

std::string_view to_string(QualityFlag q);
std::optional<QualityFlag> parse_quality(std::string_view s);

QualityFlag classify_quality(const CandidateRule& rule);

}  // namespace triquad
