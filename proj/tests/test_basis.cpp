#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pcekit/basis.hpp"

using namespace pcekit;

TEST(Eval1d, RecurrenceBaseCases)
{
    EXPECT_DOUBLE_EQ(eval_1d(PolyFamily::HermiteProbabilist, 2, 2.0), 3.0);
    EXPECT_DOUBLE_EQ(eval_1d(PolyFamily::Legendre, 1, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(eval_1d(PolyFamily::HermiteProbabilist, 0, -7.0), 1.0);
}

TEST(Eval1d, HermiteOrderFourAtOne)
{
    // He_4(1) = 1 - 6 + 3, unrolled from psi_{n+1} = x psi_n - n psi_{n-1}.
    EXPECT_DOUBLE_EQ(oracle::hermite_explicit(4, 1.0), -2.0);
    EXPECT_DOUBLE_EQ(eval_1d(PolyFamily::HermiteProbabilist, 4, 1.0), -2.0);
}

TEST(Eval1d, MatchesExplicitPolynomials)
{
    for (double x : {-2.5, -1.0, -0.3, 0.0, 0.7, 1.9}) {
        for (int n = 0; n <= 6; ++n)
            EXPECT_NEAR(eval_1d(PolyFamily::HermiteProbabilist, n, x), oracle::hermite_explicit(n, x),
                        1e-12 * (1.0 + std::abs(oracle::hermite_explicit(n, x))));
        for (int n = 0; n <= 5; ++n)
            EXPECT_NEAR(eval_1d(PolyFamily::Legendre, n, x), oracle::legendre_explicit(n, x),
                        1e-12 * (1.0 + std::abs(oracle::legendre_explicit(n, x))));
    }
}

TEST(Eval1d, AllOrdersAgreeWithSingleOrder)
{
    std::vector<double> out(9);
    eval_1d_all(PolyFamily::Legendre, 8, 0.37, out);
    for (int n = 0; n <= 8; ++n) EXPECT_DOUBLE_EQ(out[n], eval_1d(PolyFamily::Legendre, n, 0.37));
}

TEST(Norms, AnalyticValues)
{
    EXPECT_DOUBLE_EQ(norm_squared_1d(PolyFamily::HermiteProbabilist, 0), 1.0);
    EXPECT_DOUBLE_EQ(norm_squared_1d(PolyFamily::HermiteProbabilist, 4), 24.0);
    EXPECT_DOUBLE_EQ(norm_squared_1d(PolyFamily::Legendre, 0), 1.0);
    EXPECT_DOUBLE_EQ(norm_squared_1d(PolyFamily::Legendre, 3), 1.0 / 7.0);
}

TEST(BuildBasis, TermCountForFourByFour)
{
    const auto b = PcBasis::build(4, 4, PolyFamily::HermiteProbabilist);
    EXPECT_EQ(b.size(), 70u);
}

TEST(BuildBasis, OrderZeroIsConstant)
{
    const auto b = PcBasis::build(2, 0, PolyFamily::HermiteProbabilist);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b.term(0).orders, (std::vector<int>{0, 0}));
    EXPECT_DOUBLE_EQ(b.norm_squared(0), 1.0);
}

TEST(BuildBasis, GradedLexicographicOrderTwoDims)
{
    const auto b = PcBasis::build(2, 2, PolyFamily::HermiteProbabilist);
    const std::vector<std::vector<int>> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    ASSERT_EQ(b.size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_EQ(b.term(k).orders, expected[k]);
}

TEST(BuildBasis, MatchesBruteForceEnumeration)
{
    for (int d = 1; d <= 4; ++d)
        for (int p = 0; p <= 5; ++p) {
            const auto b = PcBasis::build(d, p, PolyFamily::Legendre);
            const auto ref = oracle::enumerate_total_degree(d, p);
            ASSERT_EQ(b.size(), ref.size());
            for (std::size_t k = 0; k < ref.size(); ++k) ASSERT_EQ(b.term(k).orders, ref[k]);
        }
}

TEST(BuildBasis, TermCountIsBinomial)
{
    for (int d = 1; d <= 6; ++d)
        for (int p = 0; p <= 6; ++p)
            EXPECT_EQ(static_cast<double>(PcBasis::build(d, p, PolyFamily::HermiteProbabilist).size()),
                      oracle::binomial(d + p, p))
                << "d=" << d << " p=" << p;
}

TEST(BuildBasis, NormProductRuleExhaustive)
{
    for (int d = 1; d <= 4; ++d)
        for (int p = 0; p <= 5; ++p) {
            std::vector<PolyFamily> fam(d);
            for (int i = 0; i < d; ++i) fam[i] = i % 2 ? PolyFamily::Legendre : PolyFamily::HermiteProbabilist;
            const auto b = PcBasis::build(d, p, fam);
            for (std::size_t k = 0; k < b.size(); ++k) {
                double expected = 1.0;
                for (int i = 0; i < d; ++i) {
                    const int a = b.term(k).orders[i];
                    if (fam[i] == PolyFamily::HermiteProbabilist) {
                        for (int f = 2; f <= a; ++f) expected *= f;
                    } else {
                        expected /= 2.0 * a + 1.0;
                    }
                }
                EXPECT_DOUBLE_EQ(b.norm_squared(k), expected);
            }
        }
}

TEST(BuildBasis, DeterministicOrdering)
{
    const auto a = PcBasis::build(3, 4, PolyFamily::HermiteProbabilist);
    const auto b = PcBasis::build(3, 4, PolyFamily::HermiteProbabilist);
    EXPECT_EQ(a.terms(), b.terms());
}

TEST(BuildBasis, RejectsBadInputs)
{
    EXPECT_THROW(PcBasis::build(0, 2, std::vector<PolyFamily>{}), std::invalid_argument);
    EXPECT_THROW(PcBasis::build(2, -1, PolyFamily::Legendre), std::invalid_argument);
    EXPECT_THROW(total_degree_term_count(2000, 2000), std::overflow_error);
}

TEST(BuildBasis, MultiIndexMeasures)
{
    const MultiIndex m{{2, 0, 1, 0}};
    EXPECT_EQ(m.total_degree(), 3);
    EXPECT_EQ(m.interaction_order(), 2);
}

TEST(EvalBasis, OriginOnHermiteBasis)
{
    const auto b = PcBasis::build(2, 2, PolyFamily::HermiteProbabilist);
    const std::vector<double> origin{0.0, 0.0};
    const auto v = b.eval(origin);
    const std::vector<double> expected{1, 0, 0, -1, 0, -1};
    ASSERT_EQ(v.size(), expected.size());
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_DOUBLE_EQ(v[k], expected[k]);
}

TEST(EvalBasis, OddHermiteTermsVanishAtOrigin)
{
    const auto b = PcBasis::build(3, 5, PolyFamily::HermiteProbabilist);
    const auto v = b.eval(std::vector<double>(3, 0.0));
    for (std::size_t k = 0; k < b.size(); ++k) {
        bool odd = false;
        for (int a : b.term(k).orders) odd |= a % 2 == 1;
        if (odd) EXPECT_EQ(v[k], 0.0);
    }
}

TEST(EvalBasis, OneDimLegendre)
{
    const auto b = PcBasis::build(1, 1, PolyFamily::Legendre);
    const auto v = b.eval(std::vector<double>{0.25});
    EXPECT_DOUBLE_EQ(v[0], 1.0);
    EXPECT_DOUBLE_EQ(v[1], 0.25);
}

TEST(EvalBasis, ProductOfOneDimensionalValues)
{
    const std::vector<PolyFamily> fam{PolyFamily::HermiteProbabilist, PolyFamily::Legendre, PolyFamily::HermiteProbabilist};
    const auto b = PcBasis::build(3, 4, fam);
    const std::vector<double> x{0.8, -0.35, -1.7};
    const auto v = b.eval(x);
    EXPECT_EQ(v[0], 1.0);
    for (std::size_t k = 0; k < b.size(); ++k) {
        double expected = 1.0;
        const auto& a = b.term(k).orders;
        expected *= oracle::hermite_explicit(a[0], x[0]);
        expected *= oracle::legendre_explicit(a[1], x[1]);
        expected *= oracle::hermite_explicit(a[2], x[2]);
        EXPECT_NEAR(v[k], expected, 1e-12 * (1.0 + std::abs(expected)));
    }
}

TEST(EvalBasis, DimensionMismatchThrows)
{
    const auto b = PcBasis::build(2, 2, PolyFamily::HermiteProbabilist);
    EXPECT_THROW(b.eval(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Orthogonality, MonteCarloHermite)
{
    // 10^6 draws; each sample mean must sit within 5 standard errors of
    // delta_mn <psi_n^2>.
    constexpr std::size_t n = 1'000'000;
    std::mt19937_64 gen(7);
    std::normal_distribution<double> normal;
    double sum[5][5] = {}, sumsq[5][5] = {};
    std::vector<double> psi(5);
    for (std::size_t s = 0; s < n; ++s) {
        eval_1d_all(PolyFamily::HermiteProbabilist, 4, normal(gen), psi);
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; b <= 4; ++b) {
                const double v = psi[a] * psi[b];
                sum[a][b] += v;
                sumsq[a][b] += v * v;
            }
    }
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b) {
            const double mean = sum[a][b] / n;
            const double se = std::sqrt((sumsq[a][b] / n - mean * mean) / n);
            const double expected = a == b ? norm_squared_1d(PolyFamily::HermiteProbabilist, a) : 0.0;
            EXPECT_LE(std::abs(mean - expected), 5.0 * se + 1e-15) << a << "," << b;
        }
}
