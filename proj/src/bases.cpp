#include "triquad/bases.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "triquad/orthopoly.hpp"

namespace triquad {

namespace {

constexpr double kSmallSum = 1e-8;
constexpr int kMaxExpandedDegree = 64;

// Coefficients c_k of P_n(x) = sum_k c_k x^k for n <= kMaxExpandedDegree.
// Computed once, exactly, then rounded.
const std::vector<std::vector<double>>& legendre_coefficients() {
    static const std::vector<std::vector<double>> table = [] {
        std::vector<std::vector<mpq_class>> exact(kMaxExpandedDegree + 1);
        exact[0] = {1};
        exact[1] = {0, 1};
        for (int n = 1; n < kMaxExpandedDegree; ++n) {
            std::vector<mpq_class> next(n + 2, 0);
            for (int k = 0; k <= n; ++k) next[k + 1] += mpq_class(2 * n + 1, n + 1) * exact[n][k];
            for (int k = 0; k < n; ++k) next[k] -= mpq_class(n, n + 1) * exact[n - 1][k];
            exact[n + 1] = std::move(next);
        }
        std::vector<std::vector<double>> out(exact.size());
        for (std::size_t n = 0; n < exact.size(); ++n) {
            for (const auto& c : exact[n]) out[n].push_back(to_double(c));
        }
        return out;
    }();
    return table;
}

// P_i(d/s) s^i = sum_k c_k d^k s^(i-k), plus its partials in d and s.
std::array<double, 3> homogeneous_legendre(int i, double d, double s) {
    if (i > kMaxExpandedDegree) throw std::out_of_range("PKD first index too large");
    const auto& c = legendre_coefficients()[i];
    double v = 0.0, vd = 0.0, vs = 0.0;
    for (int k = 0; k <= i; ++k) {
        if (c[k] == 0.0) continue;
        const double dk = std::pow(d, k);
        const double sk = std::pow(s, i - k);
        v += c[k] * dk * sk;
        if (k > 0) vd += c[k] * k * std::pow(d, k - 1) * sk;
        if (i - k > 0) vs += c[k] * (i - k) * dk * std::pow(s, i - k - 1);
    }
    return {v, vd, vs};
}

// First factor sqrt(2i+1) P_i(d/s) s^i and its partials in (d, s).
std::array<double, 3> first_factor(int i, double d, double s) {
    const double scale = std::sqrt(2.0 * i + 1.0);
    if (std::abs(s) < kSmallSum) {
        auto h = homogeneous_legendre(i, d, s);
        return {scale * h[0], scale * h[1], scale * h[2]};
    }
    const double t = d / s;
    const double p = jacobi(i, 0.0, 0.0, t);
    const double dp = jacobi_derivative(i, 0.0, 0.0, t);
    const double si1 = i > 0 ? std::pow(s, i - 1) : 1.0 / s;
    return {scale * p * std::pow(s, i), scale * dp * si1, scale * si1 * (i * p - t * dp)};
}

bool is_member(BasisKind kind, int phi, int i, int j) {
    if (i < 0 || j < 0 || i + j > phi) return false;
    const bool even = i % 2 == 0;
    switch (kind) {
        case BasisKind::FullF:
            return true;
        case BasisKind::ObjW:
            return i <= j;
        case BasisKind::ObjW2:
            return j <= phi / 2 && j <= i;
        case BasisKind::EvenE:
            return even && i <= j;
        case BasisKind::MinM:
            return even && i <= phi / 3 && 2 * i <= j && j != 2 * i + 1;
        case BasisKind::MinM2:
            return even && 2 * j <= i;
        case BasisKind::MinM3:
            return even && i <= 2 * (phi / 3) + 2 * kappa(6, phi - 1) && 2 * (i / 4) <= j &&
                   j <= 2 * i;
        case BasisKind::RotR:
            return i <= phi / 3 && 2 * i <= j && j != 2 * i + 1;
        case BasisKind::RotR2:
            return j <= i / 2 - kappa(2, i);
    }
    return false;
}

}  // namespace

std::string_view to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::FullF: return "FULL_F";
        case BasisKind::ObjW: return "OBJ_W";
        case BasisKind::ObjW2: return "OBJ_W2";
        case BasisKind::EvenE: return "EVEN_E";
        case BasisKind::MinM: return "MIN_M";
        case BasisKind::MinM2: return "MIN_M2";
        case BasisKind::MinM3: return "MIN_M3";
        case BasisKind::RotR: return "ROT_R";
        case BasisKind::RotR2: return "ROT_R2";
    }
    return "?";
}

std::optional<BasisKind> parse_basis_kind(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (BasisKind k : kAllBasisKinds) {
        if (to_string(k) == upper) return k;
    }
    return std::nullopt;
}

bool accepts_mode(BasisKind kind, SymmetryMode mode) {
    if (kind == BasisKind::FullF) return true;
    const bool rot = kind == BasisKind::RotR || kind == BasisKind::RotR2;
    return rot == (mode == SymmetryMode::Rotational);
}

BasisIndexSet index_set(BasisKind kind, int phi) {
    if (phi < 0) throw std::invalid_argument("index_set: negative degree");
    BasisIndexSet set{kind, phi, {}};
    for (int omega = 0; omega <= phi; ++omega) {
        for (int i = 0; i <= omega; ++i) {
            if (is_member(kind, phi, i, omega - i)) set.members.push_back({i, omega - i});
        }
    }
    return set;
}

int kappa(int a, int omega) {
    // omega - 1 may be -1 (e.g. kappa_6(phi - 1) at phi = 0); use the
    // non-negative residue.
    return ((omega % a) + a) % a == 1 ? 1 : 0;
}

long cardinality(BasisKind kind, int phi) {
    if (phi < 0) return 0;
    const long p = phi;
    switch (kind) {
        case BasisKind::FullF:
            return (p + 1) * (p + 2) / 2;
        case BasisKind::ObjW:
        case BasisKind::ObjW2:
            return (p + 2) * (p + 2) / 4;
        case BasisKind::EvenE:
            return (p + 3) * (p + 3) / 8;
        case BasisKind::MinM:
        case BasisKind::MinM2:
        case BasisKind::MinM3:
            // floor((p+3)^2/12 + 1/4)
            return ((p + 3) * (p + 3) + 3) / 12;
        case BasisKind::RotR:
        case BasisKind::RotR2:
            return 1 + (p + 3) * p / 6;
    }
    return 0;
}

long per_degree(BasisKind kind, int omega) {
    if (omega < 0) return 0;
    switch (kind) {
        case BasisKind::FullF:
            return omega + 1;
        case BasisKind::ObjW:
        case BasisKind::ObjW2:
            return 1 + omega / 2;
        case BasisKind::EvenE:
            return 1 + omega / 4;
        case BasisKind::MinM:
        case BasisKind::MinM2:
        case BasisKind::MinM3:
            return 1 + omega / 6 - kappa(6, omega);
        case BasisKind::RotR:
        case BasisKind::RotR2:
            return 1 + omega / 3 - kappa(3, omega);
    }
    return 0;
}

double eval_pkd(int i, int j, const ArealPoint& p) {
    const double s = p.sum();
    const double d = p.difference();
    const double a = first_factor(i, d, s)[0];
    return a * scaled_jacobi(j, 2.0 * i + 1.0, 1.0 - 2.0 * s);
}

std::array<double, 2> eval_pkd_gradient(int i, int j, const ArealPoint& p) {
    const double s = p.sum();
    const double d = p.difference();
    const auto [a, a_d, a_s] = first_factor(i, d, s);
    const double alpha = 2.0 * i + 1.0;
    const double scale = std::sqrt(2.0 * j + alpha + 1.0);
    const double b = scale * jacobi(j, alpha, 0.0, 1.0 - 2.0 * s);
    const double b_s = -2.0 * scale * jacobi_derivative(j, alpha, 0.0, 1.0 - 2.0 * s);
    const double common = a_s * b + a * b_s;
    return {-a_d * b + common, a_d * b + common};
}

double symmetrized_residual_row(BasisKind kind, BasisIndex index, OrbitKind orbit,
                                std::span<const double> params) {
    if (!accepts_mode(kind, orbit.mode)) {
        throw std::invalid_argument(std::string("basis ") + std::string(to_string(kind)) +
                                    " does not accept " + to_string(orbit.mode) + " orbits");
    }
    double sum = 0.0;
    for (const ArealPoint& p : expand_orbit(orbit, params)) sum += eval_pkd(index.i, index.j, p);
    return sum;
}

PkdEvaluator::PkdEvaluator(const BasisIndexSet& set) : members_(set.members) {
    for (const auto& m : members_) max_i_ = std::max(max_i_, m.i);
    max_j_.assign(max_i_ + 1, -1);
    int max_j = 0;
    for (const auto& m : members_) {
        max_j_[m.i] = std::max(max_j_[m.i], m.j);
        max_j = std::max(max_j, m.j);
    }
    q_.resize(max_i_ + 1);
    q_d_.resize(max_i_ + 1);
    q_s_.resize(max_i_ + 1);
    pj_.resize(static_cast<std::size_t>(max_i_ + 1) * (max_j + 1));
    pj_x_.resize(pj_.size());
}

void PkdEvaluator::evaluate(const ArealPoint& p, std::span<double> values,
                            std::span<double> d_l1, std::span<double> d_l2) {
    const double d = p.difference();
    const double s = p.sum();
    const double x = 1.0 - 2.0 * s;

    q_[0] = 1.0;
    q_d_[0] = 0.0;
    q_s_[0] = 0.0;
    if (max_i_ >= 1) {
        q_[1] = d;
        q_d_[1] = 1.0;
        q_s_[1] = 0.0;
    }
    for (int n = 1; n < max_i_; ++n) {
        const double a = 2.0 * n + 1.0;
        const double inv = 1.0 / (n + 1.0);
        q_[n + 1] = (a * d * q_[n] - n * s * s * q_[n - 1]) * inv;
        q_d_[n + 1] = (a * (q_[n] + d * q_d_[n]) - n * s * s * q_d_[n - 1]) * inv;
        q_s_[n + 1] = (a * d * q_s_[n] - n * (2.0 * s * q_[n - 1] + s * s * q_s_[n - 1])) * inv;
    }

    const std::size_t stride = pj_.size() / (max_i_ + 1);
    for (int i = 0; i <= max_i_; ++i) {
        const int jmax = max_j_[i];
        if (jmax < 0) continue;
        double* pv = &pj_[i * stride];
        double* px = &pj_x_[i * stride];
        const double alpha = 2.0 * i + 1.0;
        pv[0] = 1.0;
        px[0] = 0.0;
        if (jmax >= 1) {
            pv[1] = (alpha + 1.0) + (alpha + 2.0) * (x - 1.0) / 2.0;
            px[1] = (alpha + 2.0) / 2.0;
        }
        for (int k = 2; k <= jmax; ++k) {
            const double c = 2.0 * k + alpha;
            const double a1 = 2.0 * k * (k + alpha) * (c - 2.0);
            const double a2 = (c - 1.0) * alpha * alpha;
            const double a3 = (c - 2.0) * (c - 1.0) * c;
            const double a4 = 2.0 * (k + alpha - 1.0) * (k - 1.0) * c;
            pv[k] = ((a2 + a3 * x) * pv[k - 1] - a4 * pv[k - 2]) / a1;
            px[k] = (a3 * pv[k - 1] + (a2 + a3 * x) * px[k - 1] - a4 * px[k - 2]) / a1;
        }
    }

    for (std::size_t m = 0; m < members_.size(); ++m) {
        const auto [i, j] = members_[m];
        const double scale = std::sqrt((2.0 * i + 1.0) * (2.0 * i + 2.0 * j + 2.0));
        const double a = q_[i];
        const double b = pj_[i * stride + j];
        const double b_s = -2.0 * pj_x_[i * stride + j];
        const double common = q_s_[i] * b + a * b_s;
        values[m] = scale * a * b;
        d_l1[m] = scale * (-q_d_[i] * b + common);
        d_l2[m] = scale * (q_d_[i] * b + common);
    }
}

}  // namespace triquad
