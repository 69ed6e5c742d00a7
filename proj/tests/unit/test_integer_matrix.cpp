#include <gtest/gtest.h>

#include <random>

#include "sasfield/integer_matrix.hpp"

using namespace sasfield;

namespace {

// gcd of all k x k minors, by brute force over row and column subsets.
Integer minor_gcd(const IntMatrix& b, std::size_t k)
{
    Integer g = 0;
    const std::size_t m = b.rows(), n = b.cols();
    std::vector<std::size_t> rows(k), cols(k);
    auto next = [](std::vector<std::size_t>& idx, std::size_t limit) {
        std::size_t k = idx.size();
        for (std::size_t i = k; i-- > 0;) {
            if (idx[i] < limit - k + i) {
                ++idx[i];
                for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                return true;
            }
        }
        return false;
    };
    for (std::size_t i = 0; i < k; ++i) rows[i] = i;
    do {
        for (std::size_t i = 0; i < k; ++i) cols[i] = i;
        do {
            IntMatrix sub(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) sub(i, j) = b(rows[i], cols[j]);
            Integer det = determinant(sub);
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), det.get_mpz_t());
        } while (next(cols, n));
    } while (next(rows, m));
    return g;
}

}  // namespace

TEST(SmithNormalForm, SingleDiagonalGenerator)
{
    const IntMatrix b{{1}, {1}};
    const auto snf = smith_normal_form(b);
    EXPECT_EQ(snf.D, (IntMatrix{{1}, {0}}));
    ASSERT_EQ(snf.invariant_factors().size(), 1u);
    EXPECT_EQ(snf.invariant_factors()[0], 1);
}

TEST(SmithNormalForm, ZeroMatrixHasRankZero)
{
    const IntMatrix b(2, 1);
    const auto snf = smith_normal_form(b);
    EXPECT_TRUE(snf.D.is_zero());
    EXPECT_EQ(snf.rank(), 0u);
}

TEST(SmithNormalForm, CoprimeDiagonalCollapsesToCyclic)
{
    const IntMatrix b{{2, 0}, {0, 3}};
    const auto snf = smith_normal_form(b);
    EXPECT_EQ(snf.D, (IntMatrix{{1, 0}, {0, 6}}));
}

TEST(SmithNormalForm, NoColumnsIsAccepted)
{
    const IntMatrix b(3, 0);
    const auto snf = smith_normal_form(b);
    EXPECT_EQ(snf.rank(), 0u);
    EXPECT_EQ(snf.S, IntMatrix::identity(3));
}

TEST(SmithNormalForm, InvariantFactorsMatchMinorGcds)
{
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> entry(-6, 6);
    std::uniform_int_distribution<int> shape(1, 4);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = shape(rng), n = shape(rng);
        IntMatrix b(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) b(i, j) = entry(rng);
        const auto snf = smith_normal_form(b);  // certificate checked internally
        const auto f = snf.invariant_factors();
        Integer prod = 1;
        for (std::size_t k = 1; k <= std::min(m, n); ++k) {
            const Integer g = minor_gcd(b, k);
            if (k <= f.size()) {
                prod *= f[k - 1];
                EXPECT_EQ(prod, g) << b.to_string();
            } else {
                EXPECT_EQ(g, 0) << b.to_string();
            }
        }
        EXPECT_EQ(snf.rank(), rank(b));
    }
}

TEST(SmithNormalForm, LargeEntriesStayExact)
{
    IntMatrix b{{1, 0}, {0, 1}};
    b(0, 0) = Integer("123456789012345678901234567890");
    b(1, 1) = Integer("987654321098765432109876543210");
    const auto snf = smith_normal_form(b);
    Integer g;
    mpz_gcd(g.get_mpz_t(), b(0, 0).get_mpz_t(), b(1, 1).get_mpz_t());
    EXPECT_EQ(snf.D(0, 0), g);
    EXPECT_EQ(snf.D(0, 0) * snf.D(1, 1), b(0, 0) * b(1, 1));
}

TEST(SmithNormalForm, VerifierRejectsForgedCertificate)
{
    const IntMatrix b{{2, 0}, {0, 3}};
    auto snf = smith_normal_form(b);
    snf.D(1, 1) = 5;
    EXPECT_THROW(verify_smith(b, snf), std::logic_error);
}

TEST(IntegerMatrix, DeterminantAndInverse)
{
    const IntMatrix m{{2, 1, 0}, {1, 3, 1}, {0, 1, 4}};
    EXPECT_EQ(determinant(m), 18);
    const RatMatrix inv = inverse(m);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            Rational acc = 0;
            for (std::size_t k = 0; k < 3; ++k) acc += Rational(m(i, k)) * inv[k][j];
            EXPECT_EQ(acc, i == j ? 1 : 0);
        }
    EXPECT_THROW(inverse(IntMatrix{{1, 2}, {2, 4}}), std::domain_error);
}

TEST(IntegerMatrix, LeftInverse)
{
    const IntMatrix v{{1}, {1}};
    const RatMatrix z = left_inverse(v);
    ASSERT_EQ(z.size(), 1u);
    EXPECT_EQ(z[0][0], Rational(1, 2));
    EXPECT_EQ(z[0][1], Rational(1, 2));
}
