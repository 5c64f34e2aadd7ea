#include "triquad/symbasis.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include <mpfr.h>

namespace triquad {

namespace {

using Exponents = std::array<int, 3>;
using ExactPoly = std::map<Exponents, mpz_class>;

ExactPoly multiply(const ExactPoly& a, const ExactPoly& b) {
    ExactPoly out;
    for (const auto& [ea, ca] : a) {
        for (const auto& [eb, cb] : b) {
            out[{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}] += ca * cb;
        }
    }
    return out;
}

// (L1 - L2)(L1 - L3)(L2 - L3)
const ExactPoly& alternating() {
    static const ExactPoly la = [] {
        const ExactPoly f{{{1, 0, 0}, 1}, {{0, 1, 0}, -1}};
        const ExactPoly g{{{1, 0, 0}, 1}, {{0, 0, 1}, -1}};
        const ExactPoly h{{{0, 1, 0}, 1}, {{0, 0, 1}, -1}};
        return multiply(multiply(f, g), h);
    }();
    return la;
}

// (1/A) * integral of l2^i l3^j la^k
mpq_class invariant_moment(int i, int j, int k) {
    // l2^i by the multinomial theorem over (L1L2, L2L3, L3L1).
    ExactPoly poly;
    mpz_class fi;
    mpz_fac_ui(fi.get_mpz_t(), static_cast<unsigned long>(i));
    for (int p = 0; p <= i; ++p) {
        for (int q = 0; p + q <= i; ++q) {
            const int r = i - p - q;
            mpz_class fp, fq, fr;
            mpz_fac_ui(fp.get_mpz_t(), p);
            mpz_fac_ui(fq.get_mpz_t(), q);
            mpz_fac_ui(fr.get_mpz_t(), r);
            poly[{p + r + j, p + q + j, q + r + j}] += fi / (fp * fq * fr);
        }
    }
    for (int t = 0; t < k; ++t) poly = multiply(poly, alternating());
    mpq_class sum = 0;
    for (const auto& [e, c] : poly) {
        if (c != 0) sum += mpq_class(c) * exact_moment({e[0], e[1], e[2]});
    }
    if (j % 2 == 1) sum = -sum;
    return sum;
}

class GramCache {
public:
    mpq_class operator()(const SymMonomial& a, const SymMonomial& b) {
        const int k = a.k + b.k;
        if (k % 2 == 1) return 0;
        const std::array<int, 3> key{a.i + b.i, a.j + b.j, k};
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, invariant_moment(key[0], key[1], key[2])).first;
        return it->second;
    }

private:
    std::map<std::array<int, 3>, mpq_class> cache_;
};

double ratio_over_sqrt(const mpq_class& c, const mpq_class& n2) {
    if (c == 0) return 0.0;
    const mpq_class sq = c * c / n2;
    mpfr_t x;
    mpfr_init2(x, 256);
    mpfr_set_q(x, sq.get_mpq_t(), MPFR_RNDN);
    mpfr_sqrt(x, x, MPFR_RNDN);
    const double v = mpfr_get_d(x, MPFR_RNDN);
    mpfr_clear(x);
    return c > 0 ? v : -v;
}

}  // namespace

std::vector<SymMonomial> monomial_set(SymmetryMode mode, int phi) {
    std::vector<SymMonomial> out;
    const int kmax = mode == SymmetryMode::Rotational ? 1 : 0;
    for (int w = 0; w <= phi; ++w) {
        for (int j = 0; 3 * j <= w; ++j) {
            for (int k = 0; k <= kmax; ++k) {
                const int rest = w - 3 * j - 3 * k;
                if (rest >= 0 && rest % 2 == 0) out.push_back({rest / 2, j, k});
            }
        }
    }
    return out;
}

mpq_class inner_product_exact(const SymMonomial& m1, const SymMonomial& m2) {
    const int k = m1.k + m2.k;
    if (k % 2 == 1) return 0;
    return invariant_moment(m1.i + m2.i, m1.j + m2.j, k);
}

OrthoSymBasis::OrthoSymBasis(SymmetryMode mode, int phi, std::vector<SymMonomial> monomials,
                             std::vector<std::vector<mpq_class>> coefficients,
                             std::vector<mpq_class> norms2)
    : mode_(mode),
      phi_(phi),
      monomials_(std::move(monomials)),
      coefficients_(std::move(coefficients)),
      norms2_(std::move(norms2)) {
    if (coefficients_.size() != monomials_.size() || norms2_.size() != monomials_.size()) {
        throw std::invalid_argument("OrthoSymBasis: inconsistent table sizes");
    }
    float_coeffs_.resize(size());
    plans_.resize(size());
    for (std::size_t r = 0; r < size(); ++r) {
        for (const auto& c : coefficients_[r]) float_coeffs_[r].push_back(ratio_over_sqrt(c, norms2_[r]));

        HornerPoly& plan = plans_[r];
        std::vector<int> row_len;
        for (std::size_t t = 0; t <= r; ++t) {
            const auto& m = monomials_[t];
            if (m.i >= static_cast<int>(row_len.size())) row_len.resize(m.i + 1, 0);
            row_len[m.i] = std::max(row_len[m.i], m.j + 1);
        }
        plan.max_i = static_cast<int>(row_len.size()) - 1;
        plan.row_offset.assign(1, 0);
        for (int len : row_len) plan.row_offset.push_back(plan.row_offset.back() + len);
        plan.rows.assign(plan.row_offset.back(), {0.0, 0.0});
        for (std::size_t t = 0; t <= r; ++t) {
            const auto& m = monomials_[t];
            plan.rows[plan.row_offset[m.i] + m.j][m.k] = float_coeffs_[r][t];
        }
    }
    build_recurrence();
}

void OrthoSymBasis::build_recurrence() {
    const std::size_t n = size();
    recurrence_.assign(n, {});
    if (n == 0) return;
    recurrence_[0].diagonal = ratio_over_sqrt(1, norms2_[0]);  // q_0 = 1 / sqrt(N_0)

    std::map<SymMonomial, int> index;
    for (std::size_t t = 0; t < n; ++t) index[monomials_[t]] = static_cast<int>(t);

    // proj[u][l] = <m_u, p_l>; zero for u < l.
    GramCache gram;
    std::vector<std::vector<mpq_class>> proj(n, std::vector<mpq_class>(n, 0));
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t l = 0; l <= u; ++l) {
            mpq_class acc = 0;
            for (std::size_t t = 0; t <= l; ++t) acc += coefficients_[l][t] * gram(monomials_[u], monomials_[t]);
            proj[u][l] = acc;
        }
    }

    for (std::size_t k = 1; k < n; ++k) {
        const SymMonomial m = monomials_[k];
        RecurrenceStep& step = recurrence_[k];
        SymMonomial parent = m;
        if (m.i > 0) {
            --parent.i;
            step.variable = 0;
        } else if (m.j > 0) {
            --parent.j;
            step.variable = 1;
        } else {
            --parent.k;
            step.variable = 2;
        }
        step.parent = index.at(parent);
        const int p = step.parent;

        // <x p_parent, p_l> = sum_s c_ps <x m_s, p_l>
        for (std::size_t l = 0; l <= k; ++l) {
            mpq_class acc = 0;
            for (int s = 0; s <= p; ++s) {
                if (coefficients_[p][s] == 0) continue;
                SymMonomial shifted = monomials_[s];
                if (step.variable == 0) ++shifted.i;
                if (step.variable == 1) ++shifted.j;
                if (step.variable == 2) ++shifted.k;
                const int u = index.at(shifted);
                if (u >= static_cast<int>(l)) acc += coefficients_[p][s] * proj[u][l];
            }
            const mpq_class n2 = norms2_[p] * norms2_[l];
            if (l == k) {
                step.diagonal = ratio_over_sqrt(acc, n2);
            } else if (acc != 0) {
                step.projections.emplace_back(static_cast<int>(l), ratio_over_sqrt(acc, n2));
            }
        }
    }
}

void OrthoSymBasis::evaluate_recurrence(const ElementaryValues& e, std::span<double> values,
                                        std::span<double> d_l2, std::span<double> d_l3,
                                        std::span<double> d_la) const {
    const bool grad = !d_l2.empty();
    const std::array<double, 3> x{e.l2, e.l3, e.la};
    for (std::size_t k = 0; k < recurrence_.size(); ++k) {
        const RecurrenceStep& step = recurrence_[k];
        if (k == 0) {
            values[0] = step.diagonal;
            if (grad) d_l2[0] = d_l3[0] = d_la[0] = 0.0;
            continue;
        }
        const int p = step.parent;
        double v = x[step.variable] * values[p];
        double g2 = 0.0, g3 = 0.0, ga = 0.0;
        if (grad) {
            g2 = x[step.variable] * d_l2[p];
            g3 = x[step.variable] * d_l3[p];
            ga = x[step.variable] * d_la[p];
            (step.variable == 0 ? g2 : step.variable == 1 ? g3 : ga) += values[p];
        }
        for (const auto& [l, h] : step.projections) {
            v -= h * values[l];
            if (grad) {
                g2 -= h * d_l2[l];
                g3 -= h * d_l3[l];
                ga -= h * d_la[l];
            }
        }
        const double inv = 1.0 / step.diagonal;
        values[k] = v * inv;
        if (grad) {
            d_l2[k] = g2 * inv;
            d_l3[k] = g3 * inv;
            d_la[k] = ga * inv;
        }
    }
}

void OrthoSymBasis::evaluate(const ElementaryValues& e, std::span<double> values,
                             std::span<double> d_l2, std::span<double> d_l3,
                             std::span<double> d_la) const {
    const bool grad = !d_l2.empty();
    for (std::size_t r = 0; r < plans_.size(); ++r) {
        const HornerPoly& plan = plans_[r];
        double q = 0.0, q2 = 0.0, q3 = 0.0, qa = 0.0;
        for (int i = plan.max_i; i >= 0; --i) {
            double u = 0.0, u3 = 0.0, ua = 0.0;
            for (int idx = plan.row_offset[i + 1] - 1; idx >= plan.row_offset[i]; --idx) {
                const auto& c = plan.rows[idx];
                u3 = u3 * e.l3 + u;
                ua = ua * e.l3 + c[1];
                u = u * e.l3 + (c[0] + e.la * c[1]);
            }
            q2 = q2 * e.l2 + q;
            q = q * e.l2 + u;
            q3 = q3 * e.l2 + u3;
            qa = qa * e.l2 + ua;
        }
        values[r] = q;
        if (grad) {
            d_l2[r] = q2;
            d_l3[r] = q3;
            d_la[r] = qa;
        }
    }
}

std::string OrthoSymBasis::coefficient_table() const {
    std::ostringstream os;
    for (std::size_t r = 0; r < size(); ++r) {
        os << norms2_[r].get_str();
        for (const auto& c : coefficients_[r]) os << ' ' << c.get_str();
        os << '\n';
    }
    return os.str();
}

OrthoSymBasis orthonormalize(SymmetryMode mode, int phi) {
    if (phi < 0) throw std::invalid_argument("orthonormalize: negative degree");
    std::vector<SymMonomial> monos = monomial_set(mode, phi);
    const std::size_t n = monos.size();

    GramCache gram;
    std::vector<std::vector<mpq_class>> g(n, std::vector<mpq_class>(n));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b <= a; ++b) g[a][b] = g[b][a] = gram(monos[a], monos[b]);
    }

    std::vector<std::vector<mpq_class>> coeffs(n);
    std::vector<mpq_class> norms2(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<mpq_class> row(k + 1, 0);
        row[k] = 1;
        for (std::size_t l = 0; l < k; ++l) {
            mpq_class proj = 0;  // <m_k, p_l>
            for (std::size_t t = 0; t <= l; ++t) proj += coeffs[l][t] * g[k][t];
            if (proj == 0) continue;
            const mpq_class f = proj / norms2[l];
            for (std::size_t t = 0; t <= l; ++t) row[t] -= f * coeffs[l][t];
        }
        // <p_k, p_k> = <m_k, p_k> since p_k is orthogonal to every lower monomial.
        mpq_class nn = 0;
        for (std::size_t t = 0; t <= k; ++t) nn += row[t] * g[k][t];
        if (nn <= 0) throw std::logic_error("orthonormalize: linearly dependent monomials");
        coeffs[k] = std::move(row);
        norms2[k] = nn;
    }
    return OrthoSymBasis(mode, phi, std::move(monos), std::move(coeffs), std::move(norms2));
}

std::vector<double> eval_ortho(const OrthoSymBasis& basis, const ArealPoint& p) {
    std::vector<double> out(basis.size());
    basis.evaluate(elementary_values(p), out);
    return out;
}

}  // namespace triquad
