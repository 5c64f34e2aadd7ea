#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracle.hpp"
#include "triquad/bases.hpp"
#include "triquad/orthopoly.hpp"

using namespace triquad;

namespace {

std::set<BasisIndex> as_set(const BasisIndexSet& s) { return {s.members.begin(), s.members.end()}; }

std::set<BasisIndex> swapped(const BasisIndexSet& s) {
    std::set<BasisIndex> out;
    for (const auto& m : s.members) out.insert({m.j, m.i});
    return out;
}

ArealPoint random_interior(std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    const double a = e(rng), b = e(rng), c = e(rng);
    return {a / (a + b + c), b / (a + b + c), c / (a + b + c)};
}

// Direct transcription of the product formula, without the small-s branch.
double pkd_oracle(int i, int j, const ArealPoint& p) {
    const double d = p.l2 - p.l1;
    const double s = p.l2 + p.l1;
    return std::sqrt(2.0 * i + 1.0) * jacobi(i, 0, 0, d / s) * std::pow(s, i) * std::sqrt(2.0 * i + 2.0 * j + 2.0) *
           jacobi(j, 2.0 * i + 1.0, 0, 1.0 - 2.0 * s);
}

}  // namespace

TEST(BasisKind, NamesRoundTrip) {
    for (BasisKind k : kAllBasisKinds) {
        EXPECT_EQ(parse_basis_kind(to_string(k)), k);
    }
    EXPECT_EQ(parse_basis_kind("min_m2"), BasisKind::MinM2);
    EXPECT_FALSE(parse_basis_kind("MIN_M4").has_value());
}

TEST(BasisKind, AcceptedModes) {
    EXPECT_TRUE(accepts_mode(BasisKind::FullF, SymmetryMode::Full));
    EXPECT_TRUE(accepts_mode(BasisKind::MinM, SymmetryMode::Full));
    EXPECT_FALSE(accepts_mode(BasisKind::MinM, SymmetryMode::Rotational));
    EXPECT_TRUE(accepts_mode(BasisKind::RotR2, SymmetryMode::Rotational));
    EXPECT_FALSE(accepts_mode(BasisKind::RotR, SymmetryMode::Full));
}

TEST(IndexSet, FullDegreeTwo) {
    const auto s = index_set(BasisKind::FullF, 2);
    const std::vector<BasisIndex> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
    EXPECT_EQ(s.members, expected);
}

TEST(IndexSet, RotationalDegreeThree) {
    const auto s = index_set(BasisKind::RotR, 3);
    const std::vector<BasisIndex> expected{{0, 0}, {0, 2}, {0, 3}, {1, 2}};
    EXPECT_EQ(s.members, expected);
}

TEST(IndexSet, MinimalDegreeTwelve) {
    // floor(15^2 / 12 + 1/4) = floor(18.75 + 0.25) = 19
    EXPECT_EQ(index_set(BasisKind::MinM, 12).size(), 19u);
    EXPECT_EQ(cardinality(BasisKind::MinM, 12), 19);
}

TEST(IndexSet, CanonicalOrder) {
    for (BasisKind k : kAllBasisKinds) {
        const auto s = index_set(k, 14);
        for (std::size_t n = 1; n < s.members.size(); ++n) {
            const auto& a = s.members[n - 1];
            const auto& b = s.members[n];
            EXPECT_TRUE(a.degree() < b.degree() || (a.degree() == b.degree() && a.i < b.i));
        }
    }
}

TEST(Cardinality, SpotValues) {
    EXPECT_EQ(cardinality(BasisKind::FullF, 15), 136);
    EXPECT_EQ(cardinality(BasisKind::ObjW, 15), 72);
    EXPECT_EQ(cardinality(BasisKind::EvenE, 15), 40);
    EXPECT_EQ(cardinality(BasisKind::MinM, 15), 27);
    EXPECT_EQ(cardinality(BasisKind::RotR, 15), 46);
    EXPECT_EQ(per_degree(BasisKind::MinM, 1), 0);
    EXPECT_EQ(per_degree(BasisKind::MinM, 7), 1);
    EXPECT_EQ(kappa(6, 1), 1);
    EXPECT_EQ(kappa(6, 7), 1);
    EXPECT_EQ(kappa(6, -1), 0);
    EXPECT_EQ(cardinality(BasisKind::MinM, -1), 0);
}

TEST(Cardinality, EnumerationMatchesClosedForms) {
    for (BasisKind k : kAllBasisKinds) {
        for (int phi = 0; phi <= 30; ++phi) {
            const auto s = index_set(k, phi);
            ASSERT_EQ(static_cast<long>(s.size()), cardinality(k, phi)) << to_string(k) << ' ' << phi;
            for (int omega = 0; omega <= phi; ++omega) {
                const long count = std::count_if(s.members.begin(), s.members.end(),
                                                 [&](const BasisIndex& m) { return m.degree() == omega; });
                ASSERT_EQ(count, per_degree(k, omega)) << to_string(k) << ' ' << phi << ' ' << omega;
            }
        }
    }
}

TEST(Cardinality, BruteForceFormulas) {
    // Floor expressions evaluated in floating point as an independent check.
    for (int phi = 0; phi <= 30; ++phi) {
        const double p = phi;
        EXPECT_EQ(cardinality(BasisKind::ObjW, phi), static_cast<long>(std::floor((p + 2) * (p + 2) / 4)));
        EXPECT_EQ(cardinality(BasisKind::EvenE, phi), static_cast<long>(std::floor((p + 3) * (p + 3) / 8)));
        EXPECT_EQ(cardinality(BasisKind::MinM, phi), static_cast<long>(std::floor((p + 3) * (p + 3) / 12 + 0.25)));
        EXPECT_EQ(cardinality(BasisKind::RotR, phi), 1 + static_cast<long>(std::floor((p + 3) * p / 6)));
        EXPECT_EQ(cardinality(BasisKind::MinM2, phi), cardinality(BasisKind::MinM, phi));
        EXPECT_EQ(cardinality(BasisKind::MinM3, phi), cardinality(BasisKind::MinM, phi));
        EXPECT_EQ(cardinality(BasisKind::RotR2, phi), cardinality(BasisKind::RotR, phi));
    }
}

TEST(IndexSet, SwappedForms) {
    for (int phi = 0; phi <= 20; ++phi) {
        EXPECT_EQ(as_set(index_set(BasisKind::ObjW2, phi)), swapped(index_set(BasisKind::ObjW, phi))) << phi;
        EXPECT_EQ(as_set(index_set(BasisKind::RotR2, phi)), swapped(index_set(BasisKind::RotR, phi))) << phi;
    }
}

TEST(IndexSet, SecondMinimalFormTakesHighestEvenI) {
    for (int phi = 0; phi <= 24; ++phi) {
        const auto s = index_set(BasisKind::MinM2, phi);
        for (int omega = 0; omega <= phi; ++omega) {
            std::vector<BasisIndex> expected;
            for (int i = omega; i >= 0 && static_cast<long>(expected.size()) < per_degree(BasisKind::MinM, omega);
                 --i) {
                if (i % 2 == 0) expected.push_back({i, omega - i});
            }
            std::vector<BasisIndex> got;
            for (const auto& m : s.members) {
                if (m.degree() == omega) got.push_back(m);
            }
            std::sort(expected.begin(), expected.end());
            std::sort(got.begin(), got.end());
            EXPECT_EQ(got, expected) << phi << ' ' << omega;
        }
    }
}

TEST(IndexSet, Inclusions) {
    for (int phi = 0; phi <= 20; ++phi) {
        const auto w = as_set(index_set(BasisKind::ObjW, phi));
        const auto e = as_set(index_set(BasisKind::EvenE, phi));
        const auto m = as_set(index_set(BasisKind::MinM, phi));
        const auto r = as_set(index_set(BasisKind::RotR, phi));
        EXPECT_TRUE(std::includes(w.begin(), w.end(), e.begin(), e.end()));
        EXPECT_TRUE(std::includes(e.begin(), e.end(), m.begin(), m.end()));
        EXPECT_TRUE(std::includes(r.begin(), r.end(), m.begin(), m.end()));
    }
}

TEST(IndexSet, PrefixAcrossDegrees) {
    for (BasisKind k : kAllBasisKinds) {
        if (k == BasisKind::MinM3) continue;  // bound depends on phi
        for (int phi = 1; phi <= 20; ++phi) {
            const auto hi = index_set(k, phi);
            const auto lo = index_set(k, phi - 1);
            ASSERT_GE(hi.size(), lo.size());
            EXPECT_TRUE(std::equal(lo.members.begin(), lo.members.end(), hi.members.begin())) << to_string(k);
        }
    }
}

TEST(EvalPkd, SpecValues) {
    const ArealPoint c{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    std::mt19937_64 rng(1);
    const ArealPoint p = random_interior(rng);
    EXPECT_NEAR(eval_pkd(0, 0, p), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(eval_pkd(1, 0, c), 0.0, 1e-15);
    EXPECT_NEAR(eval_pkd(0, 1, c), 0.0, 1e-15);
}

TEST(EvalPkd, MatchesProductFormula) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 30; ++t) {
        const ArealPoint p = random_interior(rng);
        for (const auto& m : index_set(BasisKind::FullF, 12).members) {
            const double ref = pkd_oracle(m.i, m.j, p);
            EXPECT_NEAR(eval_pkd(m.i, m.j, p), ref, 1e-12 * std::max(1.0, std::abs(ref)));
        }
    }
}

TEST(EvalPkd, VertexLimit) {
    // At L3 = 1: d = s = 0, so only i = 0 survives and P_j^(1,0)(1) = j + 1.
    const ArealPoint v{0.0, 0.0, 1.0};
    for (int j = 0; j <= 10; ++j) {
        EXPECT_NEAR(eval_pkd(0, j, v), std::sqrt(2.0 * j + 2.0) * (j + 1), 1e-12);
        for (int i = 1; i <= 5; ++i) EXPECT_NEAR(eval_pkd(i, j, v), 0.0, 1e-15);
    }
}

TEST(EvalPkd, ContinuousAcrossSmallSThreshold) {
    for (double s : {1e-7, 2e-8, 1e-8, 5e-9, 1e-10}) {
        const ArealPoint p{0.3 * s, 0.7 * s, 1.0 - s};
        for (const auto& m : index_set(BasisKind::FullF, 10).members) {
            const double ref = pkd_oracle(m.i, m.j, p);
            EXPECT_NEAR(eval_pkd(m.i, m.j, p), ref, 1e-12 * std::max(1.0, std::abs(ref))) << s;
        }
    }
}

TEST(EvalPkd, OrthonormalUnderHalfAverage) {
    // <f, g> = (1 / 2A) int f g = average(f g) / 2; reference rule exact to degree 2 * 10
    const int phi = 10;
    const auto members = index_set(BasisKind::FullF, phi).members;
    const std::size_t n = members.size();
    std::vector<double> gram(n * n, 0.0);
    const auto gl = oracle::gauss_legendre(phi + 2);
    for (const auto& a : gl) {
        for (const auto& b : gl) {
            const double u = 0.5 * (a.x + 1.0), v = 0.5 * (b.x + 1.0);
            const ArealPoint p{u, v * (1.0 - u), 1.0 - u - v * (1.0 - u)};
            const double w = 0.25 * a.w * b.w * (1.0 - u);  // integral over the unit right triangle
            std::vector<double> vals(n);
            for (std::size_t k = 0; k < n; ++k) vals[k] = eval_pkd(members[k].i, members[k].j, p);
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < n; ++c) gram[r * n + c] += w * vals[r] * vals[c];
            }
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) EXPECT_NEAR(gram[r * n + c], r == c ? 1.0 : 0.0, 1e-12);
    }
}

TEST(EvalPkdGradient, SpecValues) {
    const ArealPoint c{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    const auto g00 = eval_pkd_gradient(0, 0, c);
    EXPECT_DOUBLE_EQ(g00[0], 0.0);
    EXPECT_DOUBLE_EQ(g00[1], 0.0);
    const auto g01 = eval_pkd_gradient(0, 1, c);
    EXPECT_NEAR(g01[0], -6.0, 1e-13);
    EXPECT_NEAR(g01[1], -6.0, 1e-13);
    for (double a : {0.1, 0.25, 0.4}) {
        const auto g = eval_pkd_gradient(1, 0, {a, a, 1.0 - 2.0 * a});
        EXPECT_NEAR(g[0], -g[1], 1e-13);
    }
}

TEST(EvalPkdGradient, MatchesFiniteDifferences) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        const ArealPoint p = random_interior(rng);
        for (const auto& m : index_set(BasisKind::FullF, 10).members) {
            const auto g = eval_pkd_gradient(m.i, m.j, p);
            const double f1 = oracle::central_difference(
                [&](double h) { return eval_pkd(m.i, m.j, ArealPoint::from_first_two(p.l1 + h, p.l2)); }, 0.0);
            const double f2 = oracle::central_difference(
                [&](double h) { return eval_pkd(m.i, m.j, ArealPoint::from_first_two(p.l1, p.l2 + h)); }, 0.0);
            const double scale = std::max({1.0, std::abs(g[0]), std::abs(g[1])});
            EXPECT_NEAR(g[0], f1, 1e-7 * scale) << m.i << ' ' << m.j;
            EXPECT_NEAR(g[1], f2, 1e-7 * scale) << m.i << ' ' << m.j;
        }
    }
}

TEST(PkdEvaluator, AgreesWithPointwiseEvaluation) {
    std::mt19937_64 rng(5);
    for (BasisKind k : {BasisKind::FullF, BasisKind::MinM3, BasisKind::RotR2}) {
        const auto set = index_set(k, 14);
        PkdEvaluator ev(set);
        std::vector<double> v(set.size()), d1(set.size()), d2(set.size());
        std::vector<ArealPoint> pts{{0.0, 0.0, 1.0}, {1e-9, 2e-9, 1.0 - 3e-9}, {1.0, 0.0, 0.0}};
        for (int t = 0; t < 10; ++t) pts.push_back(random_interior(rng));
        for (const auto& p : pts) {
            ev.evaluate(p, v, d1, d2);
            for (std::size_t n = 0; n < set.size(); ++n) {
                const auto& m = set.members[n];
                const double ref = eval_pkd(m.i, m.j, p);
                const auto g = eval_pkd_gradient(m.i, m.j, p);
                const double scale = std::max({1.0, std::abs(ref), std::abs(g[0]), std::abs(g[1])});
                EXPECT_NEAR(v[n], ref, 1e-12 * scale);
                EXPECT_NEAR(d1[n], g[0], 1e-11 * scale);
                EXPECT_NEAR(d2[n], g[1], 1e-11 * scale);
            }
        }
    }
}

TEST(SymmetrizedRow, SpecValues) {
    const std::vector<double> a{0.2};
    const std::vector<double> ab{0.1, 0.3};
    EXPECT_NEAR(symmetrized_residual_row(BasisKind::FullF, {1, 0}, OrbitKind::make(SymmetryMode::Full, 1), a), 0.0,
                1e-14);
    EXPECT_NEAR(symmetrized_residual_row(BasisKind::FullF, {0, 0}, OrbitKind::make(SymmetryMode::Full, 2), ab),
                6.0 * std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(symmetrized_residual_row(BasisKind::MinM, {0, 1}, OrbitKind::make(SymmetryMode::Full, 0), {}), 0.0,
                1e-14);
}

TEST(SymmetrizedRow, OddIVanishesOnFullOrbits) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10; ++t) {
        const ArealPoint p = random_interior(rng);
        const std::vector<double> ab{p.l1, p.l2};
        for (const auto& m : index_set(BasisKind::FullF, 10).members) {
            if (m.i % 2 == 0) continue;
            EXPECT_NEAR(symmetrized_residual_row(BasisKind::FullF, m, OrbitKind::make(SymmetryMode::Full, 2), ab),
                        0.0, 1e-12);
        }
    }
}

TEST(SymmetrizedRow, EvenIIsTwiceRotationalSum) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10; ++t) {
        const ArealPoint p = random_interior(rng);
        const std::vector<double> ab{p.l1, p.l2};
        for (const auto& m : index_set(BasisKind::EvenE, 10).members) {
            const double full =
                symmetrized_residual_row(BasisKind::EvenE, m, OrbitKind::make(SymmetryMode::Full, 2), ab);
            const double rot =
                symmetrized_residual_row(BasisKind::FullF, m, OrbitKind::make(SymmetryMode::Rotational, 1), ab);
            EXPECT_NEAR(full, 2.0 * rot, 1e-12);
        }
    }
}

TEST(SymmetrizedRow, ModeMismatchThrows) {
    const std::vector<double> ab{0.1, 0.3};
    EXPECT_THROW(symmetrized_residual_row(BasisKind::RotR, {0, 0}, OrbitKind::make(SymmetryMode::Full, 2), ab),
                 std::invalid_argument);
    EXPECT_THROW(
        symmetrized_residual_row(BasisKind::MinM2, {0, 0}, OrbitKind::make(SymmetryMode::Rotational, 1), ab),
        std::invalid_argument);
}
