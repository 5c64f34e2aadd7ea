#include "triquad/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <mpfr.h>

namespace triquad {

namespace {

constexpr std::array<std::array<int, 3>, 1> kIdentity{{{0, 1, 2}}};

// Cyclic images first, then transposes; matches the term order of T_s.
constexpr std::array<std::array<int, 3>, 6> kAllPermutations{{
    {0, 1, 2},
    {2, 0, 1},
    {1, 2, 0},
    {0, 2, 1},
    {1, 0, 2},
    {2, 1, 0},
}};

constexpr std::array<std::array<int, 3>, 3> kCyclic{{
    {0, 1, 2},
    {2, 0, 1},
    {1, 2, 0},
}};

// Distinct images of (a, a, c).
constexpr std::array<std::array<int, 3>, 3> kTypeOne{{
    {0, 1, 2},
    {0, 2, 1},
    {2, 0, 1},
}};

mpz_class factorial(int n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return f;
}

ArealPoint permuted(const ArealPoint& p, const std::array<int, 3>& perm) {
    return {p[perm[0]], p[perm[1]], p[perm[2]]};
}

void check_params(OrbitKind kind, std::span<const double> params) {
    if (static_cast<int>(params.size()) != kind.parameter_count()) {
        throw std::invalid_argument("orbit type " + std::to_string(kind.type) + " expects " +
                                    std::to_string(kind.parameter_count()) + " parameter(s), got " +
                                    std::to_string(params.size()));
    }
}

}  // namespace

ArealPoint ArealPoint::make(double l1, double l2, double l3) {
    if (std::abs(l1 + l2 + l3 - 1.0) > 1e-14) {
        throw std::invalid_argument("areal coordinates must sum to 1");
    }
    return {l1, l2, l3};
}

double ArealPoint::min_coordinate() const { return std::min({l1, l2, l3}); }

double ArealMonomial::evaluate(const ArealPoint& p) const {
    double v = 1.0;
    for (int k = 0; k < a; ++k) v *= p.l1;
    for (int k = 0; k < b; ++k) v *= p.l2;
    for (int k = 0; k < c; ++k) v *= p.l3;
    return v;
}

std::vector<ArealMonomial> monomials_of_degree(int degree) {
    std::vector<ArealMonomial> out;
    for (int a = degree; a >= 0; --a) {
        for (int b = degree - a; b >= 0; --b) out.push_back({a, b, degree - a - b});
    }
    return out;
}

const char* to_string(SymmetryMode mode) { return mode == SymmetryMode::Full ? "full" : "rot"; }

OrbitKind OrbitKind::make(SymmetryMode mode, int type) {
    if (type < 0 || type >= orbit_type_count(mode)) {
        throw std::invalid_argument("orbit type " + std::to_string(type) + " not admitted in " +
                                    to_string(mode) + " mode");
    }
    return {mode, type};
}

int OrbitKind::point_count() const {
    if (type == 0) return 1;
    if (mode == SymmetryMode::Rotational) return 3;
    return type == 1 ? 3 : 6;
}

int OrbitKind::parameter_count() const {
    if (type == 0) return 0;
    if (mode == SymmetryMode::Rotational) return 2;
    return type;
}

int orbit_type_count(SymmetryMode mode) { return mode == SymmetryMode::Full ? 3 : 2; }

mpq_class exact_moment(const ArealMonomial& m) {
    if (m.a < 0 || m.b < 0 || m.c < 0) throw std::invalid_argument("negative exponent");
    mpq_class q(2 * factorial(m.a) * factorial(m.b) * factorial(m.c), factorial(m.degree() + 2));
    q.canonicalize();
    return q;
}

double to_double(const mpq_class& q) {
    mpfr_t x;
    mpfr_init2(x, 53);
    mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
    const double d = mpfr_get_d(x, MPFR_RNDN);
    mpfr_clear(x);
    return d;
}

ArealPoint orbit_generator(OrbitKind kind, std::span<const double> params) {
    check_params(kind, params);
    if (kind.type == 0) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    if (kind.mode == SymmetryMode::Full && kind.type == 1) {
        const double a = params[0];
        return {a, a, 1.0 - 2.0 * a};
    }
    return ArealPoint::from_first_two(params[0], params[1]);
}

std::vector<std::array<double, 3>> orbit_generator_jacobian(OrbitKind kind) {
    if (kind.type == 0) return {};
    if (kind.mode == SymmetryMode::Full && kind.type == 1) return {{1.0, 1.0, -2.0}};
    return {{1.0, 0.0, -1.0}, {0.0, 1.0, -1.0}};
}

std::span<const std::array<int, 3>> orbit_permutations(OrbitKind kind) {
    if (kind.type == 0) return kIdentity;
    if (kind.mode == SymmetryMode::Rotational) return kCyclic;
    if (kind.type == 1) return kTypeOne;
    return kAllPermutations;
}

std::vector<ArealPoint> expand_orbit(OrbitKind kind, std::span<const double> params) {
    const ArealPoint g = orbit_generator(kind, params);
    std::vector<ArealPoint> out;
    for (const auto& perm : orbit_permutations(kind)) out.push_back(permuted(g, perm));
    return out;
}

std::vector<double> canonical_parameters(OrbitKind kind, std::span<const double> params) {
    check_params(kind, params);
    if (kind.type == 0 || (kind.mode == SymmetryMode::Full && kind.type == 1)) {
        return {params.begin(), params.end()};
    }
    const ArealPoint g = orbit_generator(kind, params);
    std::array<double, 3> best = g.coords();
    if (kind.mode == SymmetryMode::Full) {
        std::sort(best.begin(), best.end());
    } else {
        for (const auto& perm : kCyclic) {
            const std::array<double, 3> c = permuted(g, perm).coords();
            if (c < best) best = c;
        }
    }
    return {best[0], best[1]};
}

double symmetrized_sum(const ArealFunction& f, const ArealPoint& p, SumMode mode) {
    double cyclic = 0.0;
    for (int k = 0; k < 3; ++k) cyclic += f(permuted(p, kAllPermutations[k]));
    if (mode == SumMode::Rotational) return cyclic;
    double transposed = 0.0;
    for (int k = 3; k < 6; ++k) transposed += f(permuted(p, kAllPermutations[k]));
    return mode == SumMode::Symmetric ? cyclic + transposed : cyclic - transposed;
}

ElementaryValues elementary_values(const ArealPoint& p) {
    const auto [a, b, c] = p.coords();
    return {a * b + b * c + c * a, -a * b * c, (a - b) * (a - c) * (b - c)};
}

ElementaryGradient elementary_gradient(const ArealPoint& p) {
    const auto [a, b, c] = p.coords();
    ElementaryGradient g;
    g.l2 = {b + c, a + c, a + b};
    g.l3 = {-b * c, -a * c, -a * b};
    // la = (a-b)(a-c)(b-c)
    g.la = {(b - c) * ((a - c) + (a - b)),
            (a - c) * ((a - b) - (b - c)),
            (a - b) * (-(b - c) - (a - c))};
    return g;
}

}  // namespace triquad
