#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "triquad/geometry.hpp"

namespace triquad {

/// Index-set families of the PKD basis psi_ij.
///
/// FULL_F is the complete basis. OBJ_W, OBJ_W2 and EVEN_E are objective
/// subsets for fully symmetric rules, MIN_M, MIN_M2 and MIN_M3 are minimal
/// ones, and ROT_R, ROT_R2 are minimal for rotationally symmetric rules.
enum class BasisKind { FullF, ObjW, ObjW2, EvenE, MinM, MinM2, MinM3, RotR, RotR2 };

inline constexpr std::array<BasisKind, 9> kAllBasisKinds{
    BasisKind::FullF, BasisKind::ObjW,  BasisKind::ObjW2, BasisKind::EvenE, BasisKind::MinM,
    BasisKind::MinM2, BasisKind::MinM3, BasisKind::RotR,  BasisKind::RotR2,
};

std::string_view to_string(BasisKind kind);
std::optional<BasisKind> parse_basis_kind(std::string_view name);

/// Whether orbit sums of this kind's members are meaningful for the mode.
/// FULL_F serves both modes; ROT_* only rotational; the rest only full.
bool accepts_mode(BasisKind kind, SymmetryMode mode);

struct BasisIndex {
    int i = 0;
    int j = 0;

    int degree() const { return i + j; }
    auto operator<=>(const BasisIndex&) const = default;
};

struct BasisIndexSet {
    BasisKind kind = BasisKind::FullF;
    int phi = 0;
    /// Sorted by (degree, i).
    std::vector<BasisIndex> members;

    std::size_t size() const { return members.size(); }
};

/// Members satisfying the kind's defining inequalities for degree phi.
BasisIndexSet index_set(BasisKind kind, int phi);

/// kappa_a(omega) = 1 if omega mod a == 1, else 0.
int kappa(int a, int omega);

/// Closed-form n(phi).
long cardinality(BasisKind kind, int phi);

/// Closed-form m(omega): number of members of degree exactly omega.
long per_degree(BasisKind kind, int omega);

/// psi_ij(p) = P^_i(d/s) P^_j^(2i+1,0)(1-2s) s^i with d = L2-L1, s = L2+L1.
/// Orthonormal under plain Lebesgue measure on a unit right triangle, i.e.
/// <f,g> = (1/(2A)) * integral of f g.
double eval_pkd(int i, int j, const ArealPoint& p);

/// (d psi/dL1, d psi/dL2) with L3 = 1 - L1 - L2.
std::array<double, 2> eval_pkd_gradient(int i, int j, const ArealPoint& p);

/// Sum of psi_index over every point of an orbit. Throws
/// std::invalid_argument if the orbit's mode is not accepted by `kind`.
double symmetrized_residual_row(BasisKind kind, BasisIndex index, OrbitKind orbit,
                                std::span<const double> params);

/// Evaluates every member of an index set, with gradients, at one point.
///
/// The first factor P_i(d/s) s^i is computed by the homogeneous Legendre
/// recurrence (n+1) Q_{n+1} = (2n+1) d Q_n - n s^2 Q_{n-1}, which has no
/// singularity at s = 0. Holds scratch buffers: one instance per thread.
class PkdEvaluator {
public:
    explicit PkdEvaluator(const BasisIndexSet& set);

    std::size_t size() const { return members_.size(); }

    /// Writes psi values and (d/dL1, d/dL2) partials, each of length size().
    void evaluate(const ArealPoint& p, std::span<double> values, std::span<double> d_l1,
                  std::span<double> d_l2);

private:
    std::vector<BasisIndex> members_;
    std::vector<int> max_j_;  // per i, -1 if no member uses it
    int max_i_ = 0;
    std::vector<double> q_, q_d_, q_s_;
    std::vector<double> pj_, pj_x_;
};

}  // namespace triquad
