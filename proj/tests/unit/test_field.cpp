#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "sasfield/errors.hpp"
#include "sasfield/field.hpp"
#include "sasfield/stable.hpp"
#include "sasfield/statistics.hpp"

using namespace sasfield;

namespace {

QuotientStructure structure(std::size_t d, std::vector<IntVec> gens)
{
    return analyze_quotient(GroupSpec::from_generators(d, gens));
}

QuotientStructure diagonal_kernel() { return structure(2, {{1, 1}}); }

TruncationPolicy fixed_index(std::size_t index)
{
    return {index, std::numeric_limits<double>::infinity(), 0};
}

std::size_t count_beyond(const PrmSample& prm, double level, std::size_t lo, std::size_t hi)
{
    std::size_t c = 0;
    for (const auto& p : prm.points)
        c += std::abs(p.j) > level && p.window_index >= lo && p.window_index < hi;
    return c;
}

}  // namespace

TEST(PoissonPoints, MeanCountMatchesIntensity)
{
    const auto qs = structure(1, {});
    const auto model = single_atom_model(1.5, 1.0, qs);
    const FieldLayout layout(model, qs, 24);
    ASSERT_EQ(layout.window().size(), 49u);
    const std::size_t reps = 10000;
    double above1 = 0.0, above2 = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        RandomStream rng(5, {r});
        const auto prm = sample_prm(model, layout, 500, rng);
        ASSERT_DOUBLE_EQ(prm.total_mass, 49.0);
        above1 += static_cast<double>(count_beyond(prm, 1.0, 0, 49));
        above2 += static_cast<double>(count_beyond(prm, 2.0, 0, 49));
    }
    // #{|j| > x} is Poisson with mean nu(W) |window| x^{-alpha}.
    const double m1 = 49.0, m2 = 49.0 * std::pow(2.0, -1.5);
    EXPECT_NEAR(above1 / reps, m1, 4.0 * std::sqrt(m1 / reps));
    EXPECT_NEAR(above2 / reps, m2, 4.0 * std::sqrt(m2 / reps));
}

TEST(PoissonPoints, DisjointWindowsAreIndependent)
{
    const auto qs = structure(1, {});
    const auto model = single_atom_model(1.2, 0.5, qs);
    const FieldLayout layout(model, qs, 10);
    const std::size_t half = layout.window().size() / 2;
    constexpr std::size_t bins = 6;
    std::vector<std::vector<double>> table(bins, std::vector<double>(bins, 0.0));
    for (std::size_t r = 0; r < 5000; ++r) {
        RandomStream rng(6, {r});
        const auto prm = sample_prm(model, layout, 400, rng);
        const std::size_t a = std::min(count_beyond(prm, 1.0, 0, half), bins - 1);
        const std::size_t b = std::min(count_beyond(prm, 1.0, half, layout.window().size()), bins - 1);
        table[a][b] += 1.0;
    }
    EXPECT_GT(chi_square_independence(table).p_value, 0.01);
}

TEST(PoissonPoints, RejectsZeroTruncation)
{
    const auto qs = structure(1, {});
    const auto model = single_atom_model(1.0, 1.0, qs);
    const FieldLayout layout(model, qs, 2);
    RandomStream rng(1);
    EXPECT_THROW(sample_prm(model, layout, 0, rng), std::invalid_argument);
}

TEST(KernelModels, RejectsNearGaussianIndex)
{
    const auto qs = structure(1, {});
    EXPECT_THROW(single_atom_model(1.96, 1.0, qs), DomainError);
    EXPECT_THROW(single_atom_model(0.0, 1.0, qs), DomainError);
    EXPECT_NO_THROW(single_atom_model(1.9, 1.0, qs));
}

TEST(KernelModels, JsonRoundTripAndErrors)
{
    const auto qs = diagonal_kernel();
    const nlohmann::json doc = {
        {"alpha", 1.3},
        {"cocycleTrivial", true},
        {"marks", {{{"id", "a"}, {"weight", 0.25}}, {{"id", "b"}, {"weight", 0.75}}}},
        {"support", {{0, 0}, {1, 0}, {3, 2}}},
        {"h", {{{"w", "a"}, {"u", {0, 0}}, {"value", 1.0}},
               {{"w", "b"}, {"u", {2, 1}}, {"value", -0.5}},
               {{"w", "b"}, {"u", {0, 0}}, {"value", 0.0}}}},
    };
    const auto model = kernel_model_from_json(doc, qs);
    EXPECT_EQ(model.entries().size(), 2u);  // the zero entry is dropped
    EXPECT_DOUBLE_EQ(model.total_weight(), 1.0);
    EXPECT_DOUBLE_EQ(model.h(1, qs.canonical({1, 0})), -0.5);
    EXPECT_DOUBLE_EQ(model.h(0, qs.canonical({1, 0})), 0.0);
    EXPECT_EQ(model.support_radius(qs), 1);
    EXPECT_NEAR(model.alpha_norm(), 0.25 + 0.75 * std::pow(0.5, 1.3), 1e-14);

    const auto again = kernel_model_from_json(to_json(model), qs);
    ASSERT_EQ(again.entries().size(), model.entries().size());
    for (std::size_t i = 0; i < model.entries().size(); ++i) {
        EXPECT_EQ(again.entries()[i].u, model.entries()[i].u);
        EXPECT_EQ(again.entries()[i].mark, model.entries()[i].mark);
        EXPECT_DOUBLE_EQ(again.entries()[i].value, model.entries()[i].value);
    }

    auto bad = doc;
    bad["cocycleTrivial"] = false;
    EXPECT_THROW(kernel_model_from_json(bad, qs), ConfigError);
    bad = doc;
    bad.erase("alpha");
    EXPECT_THROW(kernel_model_from_json(bad, qs), ConfigError);
    bad = doc;
    bad["h"][0]["w"] = "zz";
    EXPECT_THROW(kernel_model_from_json(bad, qs), ConfigError);
    bad = doc;
    bad["support"] = {{0, 0}};
    EXPECT_THROW(kernel_model_from_json(bad, qs), ConfigError);
    bad = doc;
    bad["alpha"] = 1.99;
    EXPECT_THROW(kernel_model_from_json(bad, qs), DomainError);
}

TEST(Field, MatchesDirectSeriesEvaluation)
{
    const auto qs = diagonal_kernel();
    const auto model = shift_model(1.2, [](double x) { return std::exp(-x); }, 3.0, 4, qs);
    const auto layout = std::make_shared<const FieldLayout>(model, qs, 5);
    RandomStream a(77), b(77);
    const auto prm = sample_prm(model, *layout, 300, a);
    const auto field = sample_field(model, layout, fixed_index(300), b);
    ASSERT_EQ(field.diagnostics.points_used, 300u);
    const double scale = std::pow(stable_tail_constant(1.2), 1.0 / 1.2);
    for (std::size_t s = 0; s < layout->sites().size(); ++s) {
        double direct = 0.0;
        for (const auto& p : prm.points)
            direct += p.j * model.h(p.mark, group_add(layout->window()[p.window_index], layout->sites()[s], qs));
        EXPECT_NEAR(field.values[s], scale * direct, 1e-12 * (1.0 + std::abs(scale * direct)));
    }
}

TEST(Field, DiagonalKernelDependsOnDifferenceOnly)
{
    const auto qs = diagonal_kernel();
    const auto model = shift_model(1.2, [](double x) { return 1.0 - x / 3.0; }, 3.0, 2, qs);
    const std::int64_t n = 5;
    const auto layout = std::make_shared<const FieldLayout>(model, qs, n);
    RandomStream rng(3);
    const auto field = sample_field(model, layout, fixed_index(2000), rng);
    double scanned = 0.0;
    for (std::int64_t t1 = -n; t1 <= n; ++t1)
        for (std::int64_t t2 = -n; t2 <= n; ++t2) {
            const std::size_t i = layout->site_index(qs.canonical({t1, t2}));
            const std::size_t j = layout->site_index(qs.canonical({t1 - t2, 0}));
            ASSERT_LT(i, layout->sites().size());
            ASSERT_EQ(i, j);
            scanned = std::max(scanned, std::abs(field.values[i]));
        }
    EXPECT_DOUBLE_EQ(partial_maxima(field), scanned);
}

TEST(Field, PartialMaximaEqualsBoxScan)
{
    for (const auto& gens : std::vector<std::vector<IntVec>>{{}, {{0, 2}}, {{2, 1}, {0, 3}}}) {
        const auto qs = structure(2, gens);
        const auto model = single_atom_model(0.8, 1.0, qs);
        const std::int64_t n = 10;
        const auto layout = std::make_shared<const FieldLayout>(model, qs, n);
        RandomStream rng(4);
        const auto field = sample_field(model, layout, TruncationPolicy{}, rng);
        double scanned = 0.0;
        for (std::int64_t t1 = -n; t1 <= n; ++t1)
            for (std::int64_t t2 = -n; t2 <= n; ++t2) {
                const std::size_t i = layout->site_index(qs.canonical({t1, t2}));
                ASSERT_LT(i, layout->sites().size());
                scanned = std::max(scanned, std::abs(field.values[i]));
            }
        EXPECT_DOUBLE_EQ(partial_maxima(field), scanned);
    }
}

TEST(Field, SingleAtomMarginalIsStandardStable)
{
    // With h = 1 at one site, X_0 has characteristic function exp(-w |theta|^alpha).
    const auto qs = structure(1, {});
    const double alpha = 0.8, weight = 2.0;
    const auto model = single_atom_model(alpha, weight, qs);
    const auto layout = std::make_shared<const FieldLayout>(model, qs, 2);
    const std::size_t reps = 20000;
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        RandomStream rng(8, {r});
        const auto f = sample_field(model, layout, fixed_index(2000), rng);
        c1 += std::cos(0.5 * f.values[0]);
        c2 += std::cos(f.values[3]);
    }
    EXPECT_NEAR(c1 / reps, std::exp(-weight * std::pow(0.5, alpha)), 0.02);
    EXPECT_NEAR(c2 / reps, std::exp(-weight), 0.02);
}

TEST(Field, ZeroKernelGivesZeroField)
{
    const auto qs = structure(1, {});
    const KernelModel model(1.0, {{"w", 1.0}}, {qs.identity()}, {{0, qs.identity(), 0.0}});
    EXPECT_TRUE(model.entries().empty());
    const auto layout = std::make_shared<const FieldLayout>(model, qs, 3);
    RandomStream rng(2);
    const auto f = sample_field(model, layout, fixed_index(50), rng);
    for (double v : f.values) EXPECT_EQ(v, 0.0);
}

TEST(Field, MarginalsAreShiftInvariant)
{
    const auto qs = structure(1, {});
    const auto model = shift_model(1.2, [](double x) { return 1.0 - x / 3.0; }, 3.0, 3, qs);
    const auto layout = std::make_shared<const FieldLayout>(model, qs, 6);
    const std::size_t reps = 4000;
    const std::size_t sites = layout->sites().size();
    std::vector<std::vector<double>> by_site(sites);
    for (std::size_t r = 0; r < reps; ++r) {
        RandomStream rng(9, {r});
        const auto f = sample_field(model, layout, fixed_index(1000), rng);
        for (std::size_t s = 0; s < sites; ++s) by_site[s].push_back(f.values[s]);
    }
    const std::size_t origin = layout->site_index(qs.identity());
    for (std::size_t s = 0; s < sites; ++s) {
        if (s == origin) continue;
        EXPECT_GT(ks_two_sample(by_site[origin], by_site[s]).p_value, 0.01) << "site " << s;
    }
}

TEST(Field, TruncationRuleMeetsTolerance)
{
    const auto qs = structure(1, {});
    const auto model = single_atom_model(1.5, 1.0, qs);
    const auto layout = std::make_shared<const FieldLayout>(model, qs, 3);
    RandomStream rng(10);
    const auto f = sample_field(model, layout, TruncationPolicy{}, rng);
    if (!f.diagnostics.truncation_warning) EXPECT_LE(f.diagnostics.tail_ratio, 1e-3);
    EXPECT_GE(f.diagnostics.points_used, 1000u);

    RandomStream capped(10);
    const auto g = sample_field(model, layout, TruncationPolicy{10, 1e-9, 2}, capped);
    EXPECT_TRUE(g.diagnostics.truncation_warning);
    EXPECT_EQ(g.diagnostics.points_used, 40u);
}

TEST(Maxima, DeterministicAcrossWorkerCounts)
{
    const auto qs = diagonal_kernel();
    const auto model = single_atom_model(1.2, 1.0, qs);
    MaximaOptions opt{{2, 4}, 12, 2024, 1, TruncationPolicy{}};
    const auto one = run_maxima_experiment(model, qs, opt);
    opt.workers = 3;
    const auto three = run_maxima_experiment(model, qs, opt);
    ASSERT_EQ(one.records.size(), 24u);
    ASSERT_EQ(one.records.size(), three.records.size());
    for (std::size_t i = 0; i < one.records.size(); ++i) {
        EXPECT_EQ(one.records[i].n, three.records[i].n);
        EXPECT_EQ(one.records[i].maximum, three.records[i].maximum);
    }
    EXPECT_EQ(one.log_log_slope, three.log_log_slope);
}
