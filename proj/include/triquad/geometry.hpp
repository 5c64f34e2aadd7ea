#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace triquad {

/// Point on the triangle in areal (barycentric) coordinates.
///
/// Points outside the triangle are representable; only the sum
/// constraint is enforced by make().
struct ArealPoint {
    double l1 = 0.0;
    double l2 = 0.0;
    double l3 = 0.0;

    /// Checked constructor: throws std::invalid_argument unless
    /// |l1 + l2 + l3 - 1| <= 1e-14.
    static ArealPoint make(double l1, double l2, double l3);

    /// Builds (l1, l2, 1 - l1 - l2).
    static ArealPoint from_first_two(double l1, double l2) { return {l1, l2, 1.0 - l1 - l2}; }

    double operator[](int k) const { return k == 0 ? l1 : (k == 1 ? l2 : l3); }

    /// Coordinate difference d = L2 - L1 and sum s = L2 + L1.
    double difference() const { return l2 - l1; }
    double sum() const { return l2 + l1; }

    double min_coordinate() const;

    std::array<double, 3> coords() const { return {l1, l2, l3}; }

    bool operator==(const ArealPoint&) const = default;
};

/// L1^a L2^b L3^c
struct ArealMonomial {
    int a = 0;
    int b = 0;
    int c = 0;

    int degree() const { return a + b + c; }
    double evaluate(const ArealPoint& p) const;
};

/// All areal monomials of total degree exactly `degree`, ordered by a descending.
std::vector<ArealMonomial> monomials_of_degree(int degree);

enum class SymmetryMode { Full, Rotational };

const char* to_string(SymmetryMode mode);

/// Symmetry orbit type. FULL admits types 0/1/2 (1/3/6 points, 0/1/2 free
/// coordinates); ROTATIONAL admits types 0/1 (1/3 points, 0/2 free coordinates).
struct OrbitKind {
    SymmetryMode mode = SymmetryMode::Full;
    int type = 0;

    /// Throws std::invalid_argument for a type the mode does not admit.
    static OrbitKind make(SymmetryMode mode, int type);

    int point_count() const;
    int parameter_count() const;

    bool operator==(const OrbitKind&) const = default;
};

/// Number of orbit types available for a mode (3 for FULL, 2 for ROTATIONAL).
int orbit_type_count(SymmetryMode mode);

/// (1/A) * integral over the triangle of L1^a L2^b L3^c = 2 a! b! c! / (a+b+c+2)!
mpq_class exact_moment(const ArealMonomial& m);

/// Nearest double to an exact rational.
double to_double(const mpq_class& q);

/// Generator coordinates of an orbit: FULL type-1 maps a to (a, a, 1-2a);
/// FULL type-2 and ROTATIONAL type-1 map (a, b) to (a, b, 1-a-b); type-0 is
/// the centroid.
ArealPoint orbit_generator(OrbitKind kind, std::span<const double> params);

/// Derivatives of the generator coordinates with respect to each parameter.
/// Entry [p] holds (dL1, dL2, dL3) / d params[p].
std::vector<std::array<double, 3>> orbit_generator_jacobian(OrbitKind kind);

/// Full permutation orbit (FULL) or cyclic orbit (ROTATIONAL) of the generator.
///
/// The first three points of a FULL type-2 orbit are the cyclic images
/// (L1,L2,L3), (L3,L1,L2), (L2,L3,L1); the last three are their transposes
/// (L1,L3,L2), (L2,L1,L3), (L3,L2,L1). Type-1 FULL orbits emit (a,a,c),
/// (a,c,a), (c,a,a).
std::vector<ArealPoint> expand_orbit(OrbitKind kind, std::span<const double> params);

/// Coordinate permutations used by expand_orbit. Each entry lists, for output
/// slots 0..2, which generator coordinate lands there.
std::span<const std::array<int, 3>> orbit_permutations(OrbitKind kind);

/// Canonical parameters of an orbit, so that equal orbits compare equal.
/// FULL type-2: generator sorted ascending. ROTATIONAL type-1: the cyclic
/// rotation that is lexicographically smallest. Other types are unchanged.
std::vector<double> canonical_parameters(OrbitKind kind, std::span<const double> params);

enum class SumMode { Symmetric, Rotational, Antisymmetric };

using ArealFunction = std::function<double(const ArealPoint&)>;

/// T_s (six-term sum over all permutations), T_r (three cyclic terms) or
/// T_a (cyclic terms minus transposed terms) of f at p.
double symmetrized_sum(const ArealFunction& f, const ArealPoint& p, SumMode mode);

/// Values of the invariant polynomials at a point:
/// l2 = L1L2 + L2L3 + L3L1, l3 = -L1L2L3, la = (L1-L2)(L1-L3)(L2-L3).
struct ElementaryValues {
    double l2 = 0.0;
    double l3 = 0.0;
    double la = 0.0;
};

ElementaryValues elementary_values(const ArealPoint& p);

/// Partial derivatives of (l2, l3, la) with respect to (L1, L2, L3), each
/// coordinate treated as independent.
struct ElementaryGradient {
    std::array<double, 3> l2{};
    std::array<double, 3> l3{};
    std::array<double, 3> la{};
};

ElementaryGradient elementary_gradient(const ArealPoint& p);

}  // namespace triquad
