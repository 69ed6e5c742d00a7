#include <gtest/gtest.h>

#include <random>
#include <set>

#include "lattice_oracle.hpp"
#include "sasfield/lattice.hpp"

using namespace sasfield;

namespace {

QuotientStructure diagonal_example()
{
    return analyze_quotient(GroupSpec::from_generators(2, {{1, 1}}));
}

IntVec to_int(const oracle::Vec& v) { return IntVec(v.begin(), v.end()); }

struct RandomCase {
    std::size_t d;
    std::vector<oracle::Vec> gens;
};

RandomCase random_case(std::mt19937_64& rng, bool proper_only)
{
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    RandomCase c;
    c.d = dim(rng);
    std::uniform_int_distribution<std::size_t> count(0, proper_only ? c.d - 1 : c.d + 1);
    c.gens = oracle::random_generators(rng, c.d, count(rng), 3);
    return c;
}

QuotientStructure analyze(const RandomCase& c)
{
    std::vector<IntVec> gens;
    for (const auto& g : c.gens) gens.push_back(to_int(g));
    return analyze_quotient(GroupSpec::from_generators(c.d, gens));
}

}  // namespace

TEST(QuotientStructure, DiagonalKernelInTwoDimensions)
{
    const auto qs = diagonal_example();
    EXPECT_EQ(qs.effective_dimension(), 1u);
    EXPECT_EQ(qs.kernel_rank(), 1u);
    EXPECT_EQ(qs.torsion_order(), 1);
    EXPECT_EQ(qs.free_basis(), (IntMatrix{{1}, {0}}));
    EXPECT_EQ(qs.kernel_basis(), (IntMatrix{{1}, {1}}));
    ASSERT_EQ(qs.coset_reps().size(), 1u);
    EXPECT_EQ(qs.coset_reps()[0], (IntVec{0, 0}));
}

TEST(QuotientStructure, TrivialKernelGivesIdentityBasis)
{
    const auto qs = analyze_quotient(GroupSpec::from_generators(2, {}));
    EXPECT_EQ(qs.effective_dimension(), 2u);
    EXPECT_EQ(qs.kernel_rank(), 0u);
    EXPECT_EQ(qs.torsion_order(), 1);
    EXPECT_EQ(qs.free_basis(), IntMatrix::identity(2));
}

TEST(QuotientStructure, ZeroGeneratorIsTrivialKernel)
{
    const auto qs = analyze_quotient(GroupSpec::from_generators(2, {{0, 0}}));
    EXPECT_EQ(qs.kernel_rank(), 0u);
    EXPECT_EQ(qs.effective_dimension(), 2u);
}

TEST(QuotientStructure, DependentGeneratorsAreReduced)
{
    const auto qs = analyze_quotient(GroupSpec::from_generators(3, {{1, 1, 0}, {0, 1, 1}, {1, 2, 1}}));
    EXPECT_EQ(qs.kernel_rank(), 2u);
    EXPECT_EQ(qs.effective_dimension(), 1u);
    EXPECT_EQ(qs.torsion_order(), 1);
}

TEST(QuotientStructure, TorsionOrderMatchesBoxCosetCount)
{
    // Z^2 / span{(2,0),(0,3)} is Z/6; Z^2 / span{(2,2)} is Z + Z/2.
    const auto full = analyze_quotient(GroupSpec::from_generators(2, {{2, 0}, {0, 3}}));
    EXPECT_EQ(full.effective_dimension(), 0u);
    EXPECT_EQ(full.torsion_order(), 6);
    EXPECT_EQ(enumerate_Hn(5, full).size(), 6u);

    const auto mixed = analyze_quotient(GroupSpec::from_generators(2, {{2, 2}}));
    EXPECT_EQ(mixed.effective_dimension(), 1u);
    EXPECT_EQ(mixed.torsion_order(), 2);
    EXPECT_EQ(mixed.coset_reps()[0], (IntVec{0, 0}));
}

TEST(QuotientStructure, ThreeDimensionalTorsionFreeExample)
{
    const auto qs = analyze_quotient(GroupSpec::from_generators(3, {{1, 1, 0}, {0, 1, 1}}));
    EXPECT_EQ(qs.effective_dimension(), 1u);
    EXPECT_EQ(qs.kernel_rank(), 2u);
    const auto e = oracle::echelon(3, {{1, 1, 0}, {0, 1, 1}});
    const auto scan = oracle::scan_box(e, 6);
    // l = number of cosets of G = F + K; F is generated by one vector here.
    EXPECT_EQ(qs.torsion_order(), 1);
    EXPECT_EQ(static_cast<std::size_t>(scan.cosets.size()), enumerate_Hn(6, qs).size());
}

TEST(GroupOps, DiagonalExampleArithmetic)
{
    const auto qs = diagonal_example();
    const auto a = qs.canonical({3, 0});
    const auto b = qs.canonical({4, 0});
    EXPECT_EQ(a.vec(), (IntVec{3, 0}));
    EXPECT_EQ(group_add(a, b, qs).vec(), (IntVec{7, 0}));
    EXPECT_EQ(group_add(a, qs.identity(), qs), a);
    EXPECT_EQ(group_inverse(a, qs).vec(), (IntVec{-3, 0}));
    EXPECT_EQ(group_inverse(qs.identity(), qs), qs.identity());
    EXPECT_EQ(qs.canonical({5, 2}).vec(), (IntVec{3, 0}));
    EXPECT_TRUE(qs.in_kernel({-4, -4}));
    EXPECT_FALSE(qs.in_kernel({1, 0}));
}

TEST(GroupOps, DiagonalExampleNorm)
{
    const auto qs = diagonal_example();
    EXPECT_EQ(norm_N(qs.canonical({3, 0}), qs), 2);
    EXPECT_EQ(norm_N(qs.canonical({4, 0}), qs), 2);
    EXPECT_EQ(norm_N(qs.canonical({5, 0}), qs), 3);
    EXPECT_EQ(norm_N(qs.identity(), qs), 0);
}

TEST(GroupOps, DiagonalExampleBallsAndCounts)
{
    const auto qs = diagonal_example();
    const auto h1 = enumerate_Hn(1, qs);
    ASSERT_EQ(h1.size(), 5u);
    for (std::int64_t t = -2; t <= 2; ++t) EXPECT_EQ(h1[static_cast<std::size_t>(t + 2)].vec(), (IntVec{t, 0}));
    EXPECT_EQ(enumerate_Hn(100, qs).size(), 401u);
    for (std::int64_t n : {1, 5, 17}) {
        EXPECT_EQ(count_m(qs.identity(), n, qs), 2 * n + 1);
        for (std::int64_t t = 0; t <= 2 * n; ++t) EXPECT_EQ(count_m(qs.canonical({t, 0}), n, qs), 2 * n + 1 - t);
        EXPECT_EQ(count_m(qs.canonical({2 * n + 1, 0}), n, qs), 0);
    }
}

TEST(GroupOps, TrivialKernelBallIsTheBox)
{
    const auto qs = analyze_quotient(GroupSpec::from_generators(2, {}));
    for (std::int64_t n : {1, 3, 7}) {
        const auto h = enumerate_Hn(n, qs);
        EXPECT_EQ(static_cast<std::int64_t>(h.size()), (2 * n + 1) * (2 * n + 1));
        for (const auto& u : h) {
            EXPECT_EQ(norm_N(u, qs), sup_norm(u.vec()));
            EXPECT_EQ(count_m(u, n, qs), 1);
        }
    }
}

TEST(GroupOps, AbelianGroupAxiomsOnRandomStructures)
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::int64_t> coord(-9, 9);
    for (int s = 0; s < 30; ++s) {
        const auto c = random_case(rng, false);
        const auto qs = analyze(c);
        auto draw = [&] {
            IntVec v(c.d);
            for (auto& x : v) x = coord(rng);
            return qs.canonical(v);
        };
        for (int i = 0; i < 100; ++i) {
            const auto a = draw(), b = draw(), e = draw();
            EXPECT_EQ(group_add(group_add(a, b, qs), e, qs), group_add(a, group_add(b, e, qs), qs));
            EXPECT_EQ(group_add(a, b, qs), group_add(b, a, qs));
            EXPECT_EQ(group_add(a, qs.identity(), qs), a);
            EXPECT_EQ(group_add(a, group_inverse(a, qs), qs), qs.identity());
            EXPECT_EQ(qs.canonical(a.vec()), a);
            EXPECT_EQ(norm_N(group_inverse(a, qs), qs), norm_N(a, qs));
            EXPECT_LE(norm_N(group_add(a, b, qs), qs), norm_N(a, qs) + norm_N(b, qs));
        }
    }
}

TEST(GroupOps, CanonicalFormsAgreeWithEchelonResidues)
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::int64_t> coord(-12, 12);
    for (int s = 0; s < 30; ++s) {
        const auto c = random_case(rng, false);
        const auto qs = analyze(c);
        const auto e = oracle::echelon(c.d, c.gens);
        for (int i = 0; i < 200; ++i) {
            oracle::Vec a(c.d), b(c.d);
            for (auto& x : a) x = coord(rng);
            for (auto& x : b) x = coord(rng);
            const bool same = oracle::residue(e, a) == oracle::residue(e, b);
            EXPECT_EQ(same, qs.canonical(to_int(a)) == qs.canonical(to_int(b)));
            oracle::Vec diff(c.d);
            for (std::size_t k = 0; k < c.d; ++k) diff[k] = a[k] - b[k];
            EXPECT_EQ(same, qs.in_kernel(to_int(diff)));
        }
    }
}

TEST(LatticeOracle, BallsCountsAndNormsMatchBoxScan)
{
    std::mt19937_64 rng(99);
    for (int s = 0; s < 25; ++s) {
        const auto c = random_case(rng, false);
        const auto qs = analyze(c);
        const auto e = oracle::echelon(c.d, c.gens);
        const std::int64_t n_max = c.d <= 2 ? 12 : (c.d == 3 ? 8 : 4);
        for (std::int64_t n = 1; n <= n_max; n += (n < 4 ? 1 : 3)) {
            const auto scan = oracle::scan_box(e, n);
            const auto hn = enumerate_Hn(n, qs);
            ASSERT_EQ(hn.size(), scan.cosets.size()) << "d=" << c.d << " n=" << n;
            std::set<HElement> seen(hn.begin(), hn.end());
            ASSERT_EQ(seen.size(), hn.size());
            std::int64_t total = 0;
            for (const auto& [key, entry] : scan.cosets) {
                const HElement u = qs.canonical(to_int(entry.sample));
                EXPECT_TRUE(seen.count(u));
                EXPECT_EQ(count_m(u, n, qs), entry.count);
                EXPECT_EQ(norm_N(u, qs), entry.min_norm);
            }
            for (const auto& u : hn) total += count_m(u, n, qs);
            std::int64_t box = 1;
            for (std::size_t k = 0; k < c.d; ++k) box *= 2 * n + 1;
            EXPECT_EQ(total, box);
        }
    }
}

TEST(LatticeOracle, BallGrowthIsPolynomialOfEffectiveDegree)
{
    const auto qs = analyze_quotient(GroupSpec::from_generators(3, {{1, 1, 0}, {0, 1, 1}}));
    const auto h20 = static_cast<double>(enumerate_Hn(20, qs).size());
    const auto h40 = static_cast<double>(enumerate_Hn(40, qs).size());
    EXPECT_NEAR(h40 / h20, 2.0, 0.05);
}
