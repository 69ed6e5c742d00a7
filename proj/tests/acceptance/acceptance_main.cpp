// Acceptance suite: one PASS/FAIL line per criterion; exit status 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lattice_oracle.hpp"
#include "sasfield/field.hpp"
#include "sasfield/geometry.hpp"
#include "sasfield/kernel_model.hpp"
#include "sasfield/lattice.hpp"
#include "sasfield/point_process.hpp"
#include "sasfield/stable.hpp"
#include "sasfield/statistics.hpp"

using namespace sasfield;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

QuotientStructure diagonal_structure() { return analyze_quotient(GroupSpec::from_generators(2, {{1, 1}})); }

// The diagonal-kernel field with f = indicator of [0, 1): one mark, h(w, 0) = 1.
KernelModel diagonal_model(double alpha, const QuotientStructure& qs)
{
    return shift_model(alpha, [](double x) { return x >= 0.0 && x < 1.0 ? 1.0 : 0.0; }, 1.0, 1, qs);
}

struct RandomLattice {
    std::size_t d;
    std::vector<oracle::Vec> gens;
    std::int64_t n;
};

std::vector<RandomLattice> random_lattices()
{
    std::mt19937_64 rng(20240611);
    std::vector<RandomLattice> out;
    for (int s = 0; s < 20; ++s) {
        RandomLattice c;
        c.d = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const std::size_t count = std::uniform_int_distribution<std::size_t>(0, c.d + 1)(rng);
        c.gens = oracle::random_generators(rng, c.d, count, 3);
        c.n = std::uniform_int_distribution<std::int64_t>(1, 12)(rng);
        out.push_back(std::move(c));
    }
    return out;
}

QuotientStructure analyze(const RandomLattice& c)
{
    std::vector<IntVec> gens;
    for (const auto& g : c.gens) gens.emplace_back(g.begin(), g.end());
    return analyze_quotient(GroupSpec::from_generators(c.d, gens));
}

void diagonal_golden(Outcome& o)
{
    const auto qs = diagonal_structure();
    const auto g = Geometry::build(qs);
    const double v_half = g.fiber_volume(std::vector<double>{0.5}).value;
    o.require(qs.effective_dimension() == 1 && qs.kernel_rank() == 1 && qs.torsion_order() == 1, "(p, q, l) = (1, 1, 1)");
    o.require(g.half_width() == 2, "C = [-2, 2] exactly");
    o.require(std::abs(v_half - 1.5) <= 1e-9, "V(0.5) = 1.5");
    o.require(std::abs(g.scaling_constant() - 4.0) <= 1e-9, "c = 4");
    o.detail << "p=" << qs.effective_dimension() << " q=" << qs.kernel_rank() << " l=" << qs.torsion_order()
             << " C=[-" << g.half_width().get_str() << ", " << g.half_width().get_str() << "] V(0.5)=" << v_half
             << " c=" << g.scaling_constant();
}

void trivial_kernel_reduction(Outcome& o)
{
    const auto qs = analyze_quotient(GroupSpec::from_generators(2, {}));
    const auto g = Geometry::build(qs);
    o.require(qs.kernel_rank() == 0 && qs.torsion_order() == 1, "q = 0, l = 1");
    o.require(g.scaling_constant() == 2.0, "c = 2 exactly");
    bool unit = true;
    std::size_t checked = 0;
    for (const auto& y : body_grid(g, 21)) {
        unit = unit && g.fiber_volume(y).value == 1.0 && g.fiber_volume(y).exact;
        RatVec ry;
        for (double v : y) ry.push_back(to_rational(v));
        unit = unit && g.fiber_volume_exact(ry) == 1;
        ++checked;
    }
    o.require(unit, "V = 1 on C");
    std::set<std::pair<std::string, std::string>> corners;
    for (const auto& v : g.polygon()) corners.insert({v[0].get_str(), v[1].get_str()});
    o.require(corners == std::set<std::pair<std::string, std::string>>{{"-1", "-1"}, {"-1", "1"}, {"1", "-1"}, {"1", "1"}},
              "C = [-1, 1]^2");
    o.detail << "c=" << g.scaling_constant() << " V=1 at " << checked << " grid points";
}

void partition_identity(Outcome& o)
{
    std::size_t cosets = 0;
    for (const auto& c : random_lattices()) {
        const auto qs = analyze(c);
        const auto hn = enumerate_Hn(c.n, qs);
        const auto scan = oracle::scan_box(oracle::echelon(c.d, c.gens), c.n);
        std::int64_t total = 0;
        for (const auto& u : hn) total += count_m(u, c.n, qs);
        std::int64_t box = 1;
        for (std::size_t k = 0; k < c.d; ++k) box *= 2 * c.n + 1;
        o.require(total == box, "sum of m(t, n) over H_n = (2n+1)^d");
        o.require(hn.size() == scan.cosets.size(), "|H_n| equals the number of box cosets");
        const std::set<HElement> members(hn.begin(), hn.end());
        for (const auto& [key, entry] : scan.cosets) {
            const HElement u = qs.canonical(IntVec(entry.sample.begin(), entry.sample.end()));
            if (!members.count(u) || count_m(u, c.n, qs) != entry.count) {
                o.require(false, "per-coset count agrees with the box scan");
                break;
            }
        }
        cosets += hn.size();
    }
    o.detail << "20 lattices, " << cosets << " cosets checked";
}

void volume_identity(Outcome& o)
{
    double worst_exact = 0.0, worst_mc = 0.0;
    std::size_t exact = 0, mc = 0;
    const auto identity = [](double v, std::span<const double>) { return v; };
    for (const auto& c : random_lattices()) {
        const auto qs = analyze(c);
        const auto g = Geometry::build(qs);
        const double torsion = static_cast<double>(qs.torsion_order());
        const double target = std::pow(2.0, static_cast<double>(c.d));
        const Estimate& whole = g.integral_of_fiber_volume();
        if (whole.exact) {
            worst_exact = std::max(worst_exact, std::abs(torsion * whole.value - target));
            ++exact;
        } else {
            worst_mc = std::max(worst_mc, std::abs(torsion * whole.value - target) / target);
            ++mc;
        }
        // The sampled integrator over C is checked independently of vol(P).
        const Estimate sampled = g.integrate(identity);
        if (!sampled.exact) {
            worst_mc = std::max(worst_mc, std::abs(torsion * sampled.value - target) / target);
            ++mc;
        }
    }
    o.require(worst_exact <= 1e-6, "exact cases within 1e-6");
    o.require(worst_mc <= 1e-2, "Monte Carlo cases within 1e-2 (relative)");
    o.detail << exact << " exact (max abs error " << worst_exact << "), " << mc << " Monte Carlo (max rel error "
             << worst_mc << ")";
}

void profile_convergence(Outcome& o)
{
    const auto qs = diagonal_structure();
    const auto g = Geometry::build(qs);
    const auto grid = body_grid(g, 81);
    double worst = 0.0;
    for (const auto& y : grid)
        worst = std::max(worst, std::abs(m_profile(0, 200, y, qs).get_d() - g.fiber_volume(y).value));
    const std::int64_t n = 200;
    std::int64_t sum = 0;
    for (const auto& u : enumerate_Hn(n, qs)) sum += count_m(u, n, qs);
    const double average = static_cast<double>(sum) / static_cast<double>(n) / static_cast<double>(n);
    const double rel = std::abs(average - 4.0) / 4.0;
    o.require(worst <= 0.05, "max grid |m_n(y) - V(y)| <= 0.05 at n = 200");
    o.require(rel <= 0.025, "average within 2.5% at n = 200");
    o.detail << "grid error " << worst << ", average " << average << " (" << 100.0 * rel << "%)";
}

void stable_sampler(Outcome& o)
{
    double worst_cf = 0.0;
    double tail_ratio = 0.0;
    for (double alpha : {0.8, 1.0, 1.5}) {
        RandomStream rng(777, {static_cast<std::uint64_t>(alpha * 100)});
        const std::size_t n = 1'000'000;
        double c05 = 0.0, c1 = 0.0, c2 = 0.0;
        std::size_t beyond = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = sample_standard_sas(alpha, rng);
            c05 += std::cos(0.5 * x);
            c1 += std::cos(x);
            c2 += std::cos(2.0 * x);
            beyond += x > 50.0;
        }
        const double dn = static_cast<double>(n);
        worst_cf = std::max({worst_cf, std::abs(c05 / dn - std::exp(-std::pow(0.5, alpha))),
                             std::abs(c1 / dn - std::exp(-1.0)), std::abs(c2 / dn - std::exp(-std::pow(2.0, alpha)))});
        if (alpha == 1.0) tail_ratio = static_cast<double>(beyond) / dn * 50.0;
    }
    const double target = stable_tail_constant(1.0) / 2.0;
    o.require(worst_cf <= 0.01, "characteristic function within 0.01");
    o.require(std::abs(tail_ratio - target) <= 0.1 * target, "alpha = 1 tail ratio within 10% of 1/pi");
    o.detail << "max CF error " << worst_cf << ", P(X > 50) * 50 = " << tail_ratio << " vs " << target;
}

void maxima_scaling(Outcome& o)
{
    const auto qs = diagonal_structure();
    const auto model = diagonal_model(1.5, qs);
    MaximaOptions opt;
    opt.radii = {8, 16, 32, 64};
    opt.replicates = 500;
    opt.master_seed = 4242;
    opt.workers = 0;
    const auto report = run_maxima_experiment(model, qs, opt);
    bool decreasing = true;
    for (std::size_t i = 1; i < report.levels.size(); ++i)
        decreasing = decreasing && report.levels[i].median_over_nominal_rate < report.levels[i - 1].median_over_nominal_rate;
    const double ratio = report.levels[3].median_over_free_rate / report.levels[2].median_over_free_rate;
    const double ks = report.levels[3].ks_distance;
    o.require(decreasing, "n^{-d/alpha} M_n median strictly decreasing");
    o.require(ratio >= 0.6 && ratio <= 1.6, "n^{-p/alpha} M_n median ratio 64 vs 32 in [0.6, 1.6]");
    o.require(ks <= 0.08, "Frechet KS distance <= 0.08 at n = 64");
    o.detail << "nominal medians";
    for (const auto& l : report.levels) o.detail << " " << l.median_over_nominal_rate;
    o.detail << "; free-rate ratio " << ratio << "; KS " << ks << " (sigma " << report.levels[3].frechet_scale << ")";
}

std::vector<TestFunction> acceptance_suite() { return {{0.5, 0.5, 2.0}, {0.75, 0.5, 1.0}, {1.0, 0.5, 0.5}}; }

void laplace_convergence(Outcome& o)
{
    const auto qs = diagonal_structure();
    const auto geometry = Geometry::build(qs);
    const auto model = diagonal_model(1.5, qs);
    ConvergenceOptions opt;
    opt.radii = {50};
    opt.replicates = 2000;
    opt.master_seed = 31337;
    opt.workers = 0;
    const auto report = convergence_report(model, qs, geometry, acceptance_suite(), opt);
    for (const auto& r : report.rows) {
        o.require(r.pass, "empirical within 3 SE of theory (g" + std::to_string(r.g_id) + ")");
        o.detail << "g" << r.g_id << ": " << r.empirical << " +- " << r.std_error << " vs " << r.theoretical << "; ";
    }
    for (const auto& r : report.limit_rows) {
        o.require(r.pass, "limit sampler within 3 SE of theory (g" + std::to_string(r.g_id) + ")");
        o.detail << "limit g" << r.g_id << ": " << r.empirical << " +- " << r.std_error << "; ";
    }
}

void non_tightness(Outcome& o)
{
    const auto qs = diagonal_structure();
    const auto geometry = Geometry::build(qs);
    const auto model = diagonal_model(1.5, qs);
    ConvergenceOptions opt;
    opt.radii = {8, 16, 32, 64};
    opt.replicates = 500;
    opt.master_seed = 8080;
    opt.workers = 0;
    const auto diag = scaling_diagnostics(model, qs, geometry, ScalingOptions{0.5, 0.3}, opt);
    for (const auto& r : diag.ratios) {
        o.require(r.ratio >= 1.5 && r.ratio <= 3.0, "doubling ratio in [1.5, 3] at n = " + std::to_string(r.n));
        o.detail << "ratio(" << r.n << ")=" << r.ratio << " ";
    }
    o.require(diag.ratios.size() == 3, "three doubling pairs");
    o.require(diag.over_scaling_decreasing, "over-scaled mass decreasing");
    o.require(diag.under_scaling_increasing, "under-scaled mass increasing");
    o.detail << "over:";
    for (const auto& l : diag.levels) o.detail << " " << l.over_scaled_mass;
    o.detail << " under:";
    for (const auto& l : diag.levels) o.detail << " " << l.under_scaled_mass;
}

constexpr double unlimited = std::numeric_limits<double>::infinity();

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "diagonal-kernel golden values", 1.0, diagonal_golden},
        {2, "trivial-kernel reduction", unlimited, trivial_kernel_reduction},
        {3, "partition identity vs box scan", 30.0, partition_identity},
        {4, "fiber volume identity", unlimited, volume_identity},
        {5, "profile and average convergence", 10.0, profile_convergence},
        {6, "stable sampler", 60.0, stable_sampler},
        {7, "maxima scaling", 180.0, maxima_scaling},
        {8, "Laplace functional convergence", 300.0, laplace_convergence},
        {9, "non-tightness diagnostics", 120.0, non_tightness},
    };
    bool all = true;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > c.time_limit_s) {
            o.pass = false;
            o.detail << " [runtime over " << c.time_limit_s << " s]";
        }
        all = all && o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail.str() << " ("
                  << seconds << " s)" << std::endl;
    }
    return all ? 0 : 1;
}
