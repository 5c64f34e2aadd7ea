#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "triquad/geometry.hpp"

namespace triquad {

/// l2^i l3^j la^k in the invariant polynomials of the triangle.
struct SymMonomial {
    int i = 0;
    int j = 0;
    int k = 0;

    /// Weighted degree with weight 2 for l2 and 3 for l3 and la.
    int weighted_degree() const { return 2 * i + 3 * j + 3 * k; }
    auto operator<=>(const SymMonomial&) const = default;
};

/// Monomials with weighted degree <= phi: k = 0 for Full, k in {0, 1} for
/// Rotational. Ordered by weighted degree, then j, then k; so the set for
/// phi - 1 is a prefix of the set for phi.
std::vector<SymMonomial> monomial_set(SymmetryMode mode, int phi);

/// (1/A) * integral over the triangle of m1 * m2.
mpq_class inner_product_exact(const SymMonomial& m1, const SymMonomial& m2);

/// Orthonormal basis of symmetric (Full) or rotationally symmetric
/// (Rotational) polynomials under <f,g> = (1/A) * integral of f g.
///
/// Stored exactly as orthogonal polynomials p_k = sum_t c_kt m_t with
/// c_kk = 1 and rational squared norms N_k; the orthonormal polynomials are
/// q_k = p_k / sqrt(N_k). The double mirror holds c_kt / sqrt(N_k) rounded
/// once from exact values.
class OrthoSymBasis {
public:
    OrthoSymBasis(SymmetryMode mode, int phi, std::vector<SymMonomial> monomials,
                  std::vector<std::vector<mpq_class>> coefficients, std::vector<mpq_class> norms2);

    SymmetryMode mode() const { return mode_; }
    int phi() const { return phi_; }
    std::size_t size() const { return monomials_.size(); }

    const std::vector<SymMonomial>& monomials() const { return monomials_; }
    /// Row k holds c_k0 .. c_kk.
    const std::vector<std::vector<mpq_class>>& coefficients() const { return coefficients_; }
    const std::vector<mpq_class>& norms2() const { return norms2_; }
    /// Row k holds the orthonormal coefficients c_kt / sqrt(N_k).
    const std::vector<std::vector<double>>& float_coefficients() const { return float_coeffs_; }

    /// Horner evaluation of all q_k. Gradient spans may be empty; if given
    /// they receive dq/dl2, dq/dl3, dq/dla.
    void evaluate(const ElementaryValues& e, std::span<double> values, std::span<double> d_l2 = {},
                  std::span<double> d_l3 = {}, std::span<double> d_la = {}) const;

    /// Same values through the three-term-style recurrence
    /// q_k = (x_k q_parent(k) - sum_{l<k} h_kl q_l) / h_kk, where x_k is the
    /// invariant (l2, l3 or la) that maps the parent monomial onto monomial k.
    /// The h_kl are rounded from exact values. Unlike the monomial Horner
    /// form this stays accurate to a few ulps of max |q| at high degree.
    void evaluate_recurrence(const ElementaryValues& e, std::span<double> values,
                             std::span<double> d_l2 = {}, std::span<double> d_l3 = {},
                             std::span<double> d_la = {}) const;

    /// Exact coefficient table: one line per polynomial,
    /// "N_k c_k0 ... c_kk" as numerator/denominator rationals.
    std::string coefficient_table() const;

private:
    struct HornerPoly {
        int max_i = -1;
        std::vector<int> row_offset;              // size max_i + 2
        std::vector<std::array<double, 2>> rows;  // (coefficient of la^0, of la^1) per (i, j)
    };

    struct RecurrenceStep {
        int parent = 0;
        int variable = 0;  // 0: l2, 1: l3, 2: la
        double diagonal = 1.0;
        std::vector<std::pair<int, double>> projections;  // (l, h_kl), nonzero only
    };

    void build_recurrence();

    SymmetryMode mode_;
    int phi_;
    std::vector<SymMonomial> monomials_;
    std::vector<std::vector<mpq_class>> coefficients_;
    std::vector<mpq_class> norms2_;
    std::vector<std::vector<double>> float_coeffs_;
    std::vector<HornerPoly> plans_;
    std::vector<RecurrenceStep> recurrence_;
};

/// Exact classical Gram-Schmidt over monomial_set(mode, phi). Throws
/// std::logic_error on a zero norm.
OrthoSymBasis orthonormalize(SymmetryMode mode, int phi);

/// All orthonormal basis values at p.
std::vector<double> eval_ortho(const OrthoSymBasis& basis, const ArealPoint& p);

}  // namespace triquad
