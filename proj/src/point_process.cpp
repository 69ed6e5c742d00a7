#include "sasfield/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sasfield/errors.hpp"
#include "sasfield/parallel.hpp"
#include "sasfield/stable.hpp"
#include "sasfield/statistics.hpp"

namespace sasfield {

void TestFunction::validate() const
{
    const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(a) || !positive(width) || !positive(beta))
        throw std::invalid_argument("TestFunction: a, width and beta must be positive and finite");
}

double TestFunction::operator()(double x) const
{
    return beta * std::clamp((std::abs(x) - a) / width, 0.0, 1.0);
}

void WeightedPointMeasure::add(double location, double weight)
{
    if (!std::isfinite(location) || !std::isfinite(weight) || weight < 0.0)
        throw std::invalid_argument("WeightedPointMeasure: atoms need a finite location and a finite weight >= 0");
    if (location == 0.0 || weight == 0.0) return;
    atoms_.push_back({location, weight});
}

double WeightedPointMeasure::integrate(const TestFunction& g) const
{
    double s = 0.0;
    for (const auto& atom : atoms_) s += atom.weight * g(atom.location);
    return s;
}

double WeightedPointMeasure::mass_beyond(double delta) const
{
    double s = 0.0;
    for (const auto& atom : atoms_)
        if (std::abs(atom.location) >= delta) s += atom.weight;
    return s;
}

LaplaceEstimate laplace_from_integrals(std::span<const double> integrals)
{
    if (integrals.size() < 2) throw std::invalid_argument("laplace_empirical: need at least two samples");
    std::vector<double> e(integrals.size());
    std::transform(integrals.begin(), integrals.end(), e.begin(), [](double v) { return std::exp(-v); });
    return {mean(e), standard_error(e)};
}

LaplaceEstimate laplace_empirical(std::span<const WeightedPointMeasure> samples, const TestFunction& g)
{
    std::vector<double> integrals;
    integrals.reserve(samples.size());
    for (const auto& m : samples) integrals.push_back(m.integrate(g));
    return laplace_from_integrals(integrals);
}

WeightedPointMeasure build_scaled_measure(const FieldSample& field, double location_scale, double weight_scale)
{
    const auto& mult = field.layout->multiplicities();
    WeightedPointMeasure out;
    for (std::size_t i = 0; i < field.values.size(); ++i)
        out.add(location_scale * field.values[i], weight_scale * static_cast<double>(mult[i]));
    return out;
}

WeightedPointMeasure build_normalized_measure(const FieldSample& field, const QuotientStructure& qs, double c,
                                              double alpha)
{
    const double p = static_cast<double>(qs.effective_dimension());
    if (qs.effective_dimension() == 0) throw DomainError("build_normalized_measure: needs effective dimension p >= 1");
    const double n = static_cast<double>(field.radius());
    const double q = static_cast<double>(qs.kernel_rank());
    return build_scaled_measure(field, std::pow(c * n, -p / alpha), std::pow(n, -q));
}

KernelModel limit_kernel(const KernelModel& model)
{
    return model.scaled(std::pow(stable_tail_constant(model.alpha()) / 2.0, 1.0 / model.alpha()));
}

namespace {

std::vector<std::vector<double>> values_by_mark(const KernelModel& model)
{
    std::vector<std::vector<double>> out(model.marks().size());
    for (const auto& e : model.entries()) out[e.mark].push_back(e.value);
    return out;
}

std::vector<double> cumulative_weights(const KernelModel& model)
{
    std::vector<double> cum;
    const double total = model.total_weight();
    double acc = 0.0;
    for (const auto& m : model.marks()) {
        acc += m.weight / total;
        cum.push_back(acc);
    }
    cum.back() = 1.0;
    return cum;
}

}  // namespace

WeightedPointMeasure sample_limit_measure(const KernelModel& model, const Geometry& geometry,
                                          const LimitSamplerOptions& options, RandomStream& rng)
{
    const KernelModel tilde = limit_kernel(model);
    WeightedPointMeasure out;
    if (tilde.entries().empty()) return out;
    const auto by_mark = values_by_mark(tilde);
    const auto cum = cumulative_weights(tilde);
    const double mass = 2.0 * tilde.total_weight();
    const double inv_alpha = 1.0 / tilde.alpha();
    const double hmax = tilde.max_abs_value();
    const bool weighted = geometry.kernel_rank() > 0;
    double gamma = 0.0;
    for (std::size_t i = 0; i < options.max_points; ++i) {
        gamma += rng.exponential();
        const double jabs = std::pow(mass / gamma, inv_alpha);
        if (options.cutoff > 0.0 && jabs * hmax < options.cutoff) break;
        const double j = rng.sign() * jabs;
        std::size_t mark = 0;
        if (cum.size() > 1)
            mark = static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), rng.uniform_open()) - cum.begin());
        const double weight = weighted ? geometry.fiber_volume(geometry.sample_uniform(rng)).value : 1.0;
        for (double v : by_mark[mark]) out.add(j * v, weight);
    }
    return out;
}

namespace {

constexpr double quadrature_tolerance = 1e-10;

// int_{x != 0} (1 - exp(-v sum_u g(x eta_u))) alpha |x|^{-alpha-1} dx for |values| eta_u.
double mark_exponent(double v, const std::vector<double>& values, double alpha, const TestFunction& g, double& error)
{
    if (values.empty() || v <= 0.0) return 0.0;
    std::vector<double> eta, breaks;
    for (double h : values) {
        eta.push_back(std::abs(h));
        breaks.push_back(g.a / std::abs(h));
        breaks.push_back((g.a + g.width) / std::abs(h));
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const auto integrand = [&](double x) {
        double sum = 0.0;
        for (double e : eta) sum += g(x * e);
        return -std::expm1(-v * sum) * alpha * std::pow(x, -alpha - 1.0);
    };
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        double err = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, breaks[k], breaks[k + 1], 8,
                                                                               quadrature_tolerance, &err);
        error += 2.0 * err;
    }
    const double saturated = -std::expm1(-v * g.beta * static_cast<double>(eta.size()));
    total += saturated * std::pow(breaks.back(), -alpha);
    return 2.0 * total;
}

}  // namespace

TheoreticalLaplace laplace_theoretical(const KernelModel& model, const Geometry& geometry, const TestFunction& g)
{
    g.validate();
    const KernelModel tilde = limit_kernel(model);
    const auto by_mark = values_by_mark(tilde);
    const auto phi = [&](double v, std::span<const double>) {
        double s = 0.0, node_error = 0.0;
        for (std::size_t w = 0; w < by_mark.size(); ++w)
            s += tilde.marks()[w].weight * mark_exponent(v, by_mark[w], tilde.alpha(), g, node_error);
        return s;
    };
    // Fix the error budget from the point of largest fiber volume.
    double probe_error = 0.0;
    {
        const double v0 = geometry.sup_fiber_volume();
        double scale = 0.0;
        for (std::size_t w = 0; w < by_mark.size(); ++w)
            scale += tilde.marks()[w].weight * mark_exponent(v0, by_mark[w], tilde.alpha(), g, probe_error);
        if (probe_error > 1e-6 * std::max(1.0, scale)) {
            std::ostringstream msg;
            msg << "laplace_theoretical: x quadrature reached only " << probe_error << " absolute error";
            throw std::runtime_error(msg.str());
        }
    }
    const Estimate integral = geometry.integrate(phi);
    const double volume = geometry.volume().value;
    TheoreticalLaplace out;
    out.exponent = integral.value / volume;
    out.value = std::exp(-out.exponent);
    out.error_estimate = out.value * (probe_error + integral.std_error / volume);
    return out;
}

std::uint64_t limit_stream_tag() { return 0x4C494D4954000000ULL; }
std::uint64_t measure_stream_tag(std::int64_t n) { return 0x4D45415355524500ULL ^ static_cast<std::uint64_t>(n); }

namespace {

void validate_options(const ConvergenceOptions& options, const Geometry& geometry)
{
    if (options.radii.empty()) throw std::invalid_argument("nList must not be empty");
    for (std::size_t i = 0; i < options.radii.size(); ++i) {
        if (options.radii[i] < 1) throw std::invalid_argument("nList entries must be positive");
        if (i > 0 && options.radii[i] <= options.radii[i - 1]) throw std::invalid_argument("nList must be increasing");
    }
    if (geometry.effective_dimension() == 0) throw DomainError("point-process scaling needs effective dimension p >= 1");
}

struct FieldStatistics {
    std::vector<double> values;
    bool warning = false;
};

template <class Fn>
std::vector<FieldStatistics> over_fields(const KernelModel& model, const QuotientStructure& qs, std::int64_t n,
                                         const ConvergenceOptions& options, Fn&& reduce)
{
    const auto layout = std::make_shared<const FieldLayout>(model, qs, n);
    return parallel_map<FieldStatistics>(options.replicates, options.workers, [&](std::size_t r) {
        RandomStream rng = replicate_stream(options.master_seed, measure_stream_tag(n), r);
        const FieldSample field = sample_field(model, layout, options.truncation, rng);
        return FieldStatistics{reduce(field), field.diagnostics.truncation_warning};
    });
}

}  // namespace

ConvergenceReport convergence_report(const KernelModel& model, const QuotientStructure& qs, const Geometry& geometry,
                                     const std::vector<TestFunction>& tests, const ConvergenceOptions& options)
{
    validate_options(options, geometry);
    if (options.replicates < 100) throw std::invalid_argument("convergence_report: replicates must be at least 100");
    if (tests.empty()) throw std::invalid_argument("convergence_report: gSuite must not be empty");
    for (const auto& g : tests) g.validate();

    ConvergenceReport report;
    for (const auto& g : tests) report.theory.push_back(laplace_theoretical(model, geometry, g));
    const double c = geometry.scaling_constant();
    const double alpha = model.alpha();

    const auto make_row = [&](std::int64_t n, std::size_t g_id, const std::vector<double>& integrals) {
        const LaplaceEstimate est = laplace_from_integrals(integrals);
        const TheoreticalLaplace& th = report.theory[g_id];
        const double se = std::hypot(est.std_error, th.error_estimate);
        return ConvergenceRow{n, g_id, est.value, est.std_error, th.value,
                              std::abs(est.value - th.value) <= 3.0 * se};
    };
    const auto split = [&](const std::vector<FieldStatistics>& stats, std::size_t g_id) {
        std::vector<double> v;
        v.reserve(stats.size());
        for (const auto& s : stats) v.push_back(s.values[g_id]);
        return v;
    };

    for (const std::int64_t n : options.radii) {
        const auto stats = over_fields(model, qs, n, options, [&](const FieldSample& field) {
            const WeightedPointMeasure m = build_normalized_measure(field, qs, c, alpha);
            std::vector<double> integrals;
            for (const auto& g : tests) integrals.push_back(m.integrate(g));
            return integrals;
        });
        for (const auto& s : stats) report.truncation_warnings += s.warning;
        for (std::size_t g = 0; g < tests.size(); ++g) report.rows.push_back(make_row(n, g, split(stats, g)));
    }

    double cutoff = tests.front().a;
    for (const auto& g : tests) cutoff = std::min(cutoff, g.a);
    const LimitSamplerOptions limit_options{options.limit_max_points, cutoff};
    const auto limit = parallel_map<FieldStatistics>(options.replicates, options.workers, [&](std::size_t r) {
        RandomStream rng = replicate_stream(options.master_seed, limit_stream_tag(), r);
        const WeightedPointMeasure m = sample_limit_measure(model, geometry, limit_options, rng);
        std::vector<double> integrals;
        for (const auto& g : tests) integrals.push_back(m.integrate(g));
        return FieldStatistics{std::move(integrals), false};
    });
    for (std::size_t g = 0; g < tests.size(); ++g) report.limit_rows.push_back(make_row(0, g, split(limit, g)));

    if (options.radii.size() >= 2) {
        for (std::size_t g = 0; g < tests.size(); ++g) {
            std::vector<double> xs, gaps;
            for (const auto& row : report.rows)
                if (row.g_id == g) {
                    xs.push_back(static_cast<double>(row.n));
                    gaps.push_back(std::abs(row.empirical - row.theoretical));
                }
            const TestResult k = kendall_tau_decreasing(xs, gaps);
            report.trends.push_back({g, k.statistic, k.p_value, k.statistic < 0.0 && k.p_value < 0.2});
        }
    }

    report.pass = true;
    for (const auto& row : report.rows)
        if (row.n == options.radii.back()) report.pass = report.pass && row.pass;
    for (const auto& row : report.limit_rows) report.pass = report.pass && row.pass;
    return report;
}

ScalingDiagnostics scaling_diagnostics(const KernelModel& model, const QuotientStructure& qs, const Geometry& geometry,
                                       const ScalingOptions& scaling, const ConvergenceOptions& options)
{
    validate_options(options, geometry);
    if (options.replicates < 2) throw std::invalid_argument("scaling_diagnostics: need at least two replicates");
    if (!(scaling.delta > 0.0) || !(scaling.epsilon > 0.0))
        throw std::invalid_argument("scaling_diagnostics: delta and epsilon must be positive");
    const double alpha = model.alpha();
    const double p = static_cast<double>(qs.effective_dimension());
    const double q = static_cast<double>(qs.kernel_rank());
    const double c = geometry.scaling_constant();

    ScalingDiagnostics out;
    for (const std::int64_t n : options.radii) {
        const double nd = static_cast<double>(n);
        const double weight_scale = std::pow(nd, -q);
        const auto stats = over_fields(model, qs, n, options, [&](const FieldSample& field) {
            return std::vector<double>{
                build_scaled_measure(field, std::pow(c * nd, -p / alpha), 1.0).mass_beyond(scaling.delta),
                build_scaled_measure(field, std::pow(nd, -(p + scaling.epsilon) / alpha), weight_scale)
                    .mass_beyond(scaling.delta),
                build_scaled_measure(field, std::pow(nd, -(p - scaling.epsilon) / alpha), weight_scale)
                    .mass_beyond(scaling.delta)};
        });
        std::vector<double> unnorm, over, under;
        for (const auto& s : stats) {
            unnorm.push_back(s.values[0]);
            over.push_back(s.values[1]);
            under.push_back(s.values[2]);
        }
        out.levels.push_back({n, mean(unnorm), standard_error(unnorm), mean(over), mean(under)});
    }

    // The unnormalized mass grows like n^q; the band is [0.75, 1.5] * 2^q.
    const double growth = std::pow(2.0, q);
    for (const auto& level : out.levels) {
        const auto twice = std::find_if(out.levels.begin(), out.levels.end(),
                                        [&](const ScalingLevel& l) { return l.n == 2 * level.n; });
        if (twice == out.levels.end()) continue;
        const double ratio = level.unnormalized_mass > 0.0 ? twice->unnormalized_mass / level.unnormalized_mass : 0.0;
        out.ratios.push_back({level.n, ratio, ratio >= 0.75 * growth && ratio <= 1.5 * growth});
    }
    out.over_scaling_decreasing = out.under_scaling_increasing = out.levels.size() >= 2;
    for (std::size_t i = 1; i < out.levels.size(); ++i) {
        out.over_scaling_decreasing =
            out.over_scaling_decreasing && out.levels[i].over_scaled_mass < out.levels[i - 1].over_scaled_mass;
        out.under_scaling_increasing =
            out.under_scaling_increasing && out.levels[i].under_scaled_mass > out.levels[i - 1].under_scaled_mass;
    }
    out.pass = !out.ratios.empty() && out.over_scaling_decreasing && out.under_scaling_increasing;
    for (const auto& r : out.ratios) out.pass = out.pass && r.pass;
    return out;
}

}  // namespace sasfield
