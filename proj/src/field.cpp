#include "sasfield/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sasfield/parallel.hpp"
#include "sasfield/stable.hpp"
#include "sasfield/statistics.hpp"

namespace sasfield {

FieldLayout::FieldLayout(const KernelModel& model, const QuotientStructure& qs, std::int64_t n)
    : n_(n), marks_(model.marks().size())
{
    if (n < 1) throw std::invalid_argument("FieldLayout: radius must be at least 1");
    sites_ = enumerate_Hn(n, qs);
    multiplicity_.reserve(sites_.size());
    for (const auto& u : sites_) multiplicity_.push_back(count_m(u, n, qs));
    window_ = enumerate_Hn(checked_add(n, model.support_radius(qs)), qs);

    std::vector<std::vector<const KernelEntry*>> by_mark(marks_);
    for (const auto& e : model.entries()) by_mark[e.mark].push_back(&e);
    offsets_.reserve(window_.size() * marks_ + 1);
    offsets_.push_back(0);
    for (const auto& u : window_) {
        for (std::size_t w = 0; w < marks_; ++w) {
            for (const KernelEntry* e : by_mark[w]) {
                const std::size_t s = site_index(group_subtract(e->u, u, qs));
                if (s < sites_.size()) entries_.push_back({s, e->value});
            }
            offsets_.push_back(entries_.size());
        }
    }
}

std::span<const FieldLayout::Contribution> FieldLayout::contributions(std::size_t window_index, std::size_t mark) const
{
    const std::size_t k = window_index * marks_ + mark;
    return {entries_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
}

std::size_t FieldLayout::site_index(const HElement& u) const
{
    const auto it = std::lower_bound(sites_.begin(), sites_.end(), u);
    if (it == sites_.end() || *it != u) return sites_.size();
    return static_cast<std::size_t>(it - sites_.begin());
}

PrmGenerator::PrmGenerator(const KernelModel& model, std::size_t window_size, RandomStream& rng)
    : rng_(rng), inv_alpha_(1.0 / model.alpha()), mass_(model.total_weight() * static_cast<double>(window_size)),
      window_(window_size)
{
    if (window_size == 0) throw std::invalid_argument("PrmGenerator: empty window");
    const double total = model.total_weight();
    double acc = 0.0;
    for (const auto& m : model.marks()) {
        acc += m.weight / total;
        cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;
}

PrmPoint PrmGenerator::next()
{
    gamma_ += rng_.exponential();
    PrmPoint p;
    p.j = rng_.sign() * std::pow(mass_ / gamma_, inv_alpha_);
    if (cumulative_.size() > 1) {
        const double u = rng_.uniform_open();
        p.mark = static_cast<std::size_t>(std::lower_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
    }
    p.window_index = rng_.below(window_);
    return p;
}

PrmSample sample_prm(const KernelModel& model, const FieldLayout& layout, std::size_t count, RandomStream& rng)
{
    if (count < 1) throw std::invalid_argument("sample_prm: truncation index must be at least 1");
    PrmGenerator gen(model, layout.window().size(), rng);
    PrmSample out;
    out.total_mass = gen.total_mass();
    out.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.points.push_back(gen.next());
    return out;
}

FieldSample sample_field(const KernelModel& model, std::shared_ptr<const FieldLayout> layout,
                         const TruncationPolicy& policy, RandomStream& rng)
{
    if (policy.initial_index < 1) throw std::invalid_argument("sample_field: truncation index must be at least 1");
    const double scale = std::pow(stable_tail_constant(model.alpha()), 1.0 / model.alpha());
    const double hmax = model.max_abs_value();
    const std::size_t sites = layout->sites().size();
    FieldSample out;
    out.layout = layout;
    constexpr std::size_t max_attempts = 64;
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<double> acc(sites, 0.0);
        PrmGenerator gen(model, layout->window().size(), rng);
        std::size_t used = 0, target = policy.initial_index, doublings = 0;
        double last_j = 0.0;
        FieldDiagnostics diag = out.diagnostics;
        for (;;) {
            for (; used < target; ++used) {
                const PrmPoint p = gen.next();
                last_j = p.j;
                for (const auto& c : layout->contributions(p.window_index, p.mark)) acc[c.site] += p.j * c.value;
            }
            double max_x = 0.0;
            for (double v : acc) max_x = std::max(max_x, std::abs(v));
            const double tail = std::abs(last_j) * hmax;
            diag.tail_ratio = max_x > 0.0 ? tail / max_x : (tail > 0.0 ? INFINITY : 0.0);
            if (tail <= policy.relative_tolerance * max_x) break;
            if (doublings == policy.max_doublings) {
                diag.truncation_warning = true;
                break;
            }
            target *= 2;
            ++doublings;
        }
        diag.points_used = used;
        bool finite = true;
        for (auto& v : acc) {
            v *= scale;
            finite = finite && std::isfinite(v);
        }
        if (finite) {
            out.values = std::move(acc);
            out.diagnostics = diag;
            return out;
        }
        ++out.diagnostics.nonfinite_resamples;
    }
    throw std::runtime_error("sample_field: repeated non-finite draws");
}

double partial_maxima(const FieldSample& field)
{
    double m = 0.0;
    const auto& mult = field.layout->multiplicities();
    for (std::size_t i = 0; i < field.values.size(); ++i)
        if (mult[i] >= 1) m = std::max(m, std::abs(field.values[i]));
    return m;
}

std::uint64_t field_stream_tag(std::int64_t n) { return 0x4649454C44000000ULL ^ static_cast<std::uint64_t>(n); }

MaximaReport run_maxima_experiment(const KernelModel& model, const QuotientStructure& qs, const MaximaOptions& options)
{
    if (options.replicates < 1) throw std::invalid_argument("run_maxima_experiment: need at least one replicate");
    if (options.radii.empty()) throw std::invalid_argument("run_maxima_experiment: empty radius list");
    const double alpha = model.alpha();
    const double p = static_cast<double>(qs.effective_dimension());
    const double d = static_cast<double>(qs.dimension());
    MaximaReport report;
    std::vector<double> log_n, log_median;
    for (const std::int64_t n : options.radii) {
        const auto layout = std::make_shared<const FieldLayout>(model, qs, n);
        struct Outcome {
            double maximum = 0.0;
            FieldDiagnostics diag;
        };
        const auto outcomes = parallel_map<Outcome>(options.replicates, options.workers, [&](std::size_t r) {
            RandomStream rng = replicate_stream(options.master_seed, field_stream_tag(n), r);
            const FieldSample f = sample_field(model, layout, options.truncation, rng);
            return Outcome{partial_maxima(f), f.diagnostics};
        });
        MaximaLevel level;
        level.n = n;
        std::vector<double> maxima, free_scaled, nominal_scaled;
        const double free_rate = std::pow(static_cast<double>(n), p / alpha);
        const double nominal_rate = std::pow(static_cast<double>(n), d / alpha);
        for (std::size_t r = 0; r < outcomes.size(); ++r) {
            const auto& o = outcomes[r];
            report.records.push_back({r, n, o.maximum, options.master_seed});
            maxima.push_back(o.maximum);
            free_scaled.push_back(o.maximum / free_rate);
            nominal_scaled.push_back(o.maximum / nominal_rate);
            level.truncation_warnings += o.diag.truncation_warning;
            level.nonfinite_resamples += o.diag.nonfinite_resamples;
        }
        level.median = median(maxima);
        level.median_over_free_rate = median(free_scaled);
        level.median_over_nominal_rate = median(nominal_scaled);
        if (std::all_of(free_scaled.begin(), free_scaled.end(), [](double v) { return v > 0.0; })) {
            level.frechet_scale = frechet_scale_mle(free_scaled, alpha);
            const double sigma = level.frechet_scale;
            const auto ks = ks_one_sample(free_scaled, [&](double x) { return frechet_cdf(x, alpha, sigma); });
            level.ks_distance = ks.statistic;
            level.ks_p_value = ks.p_value;
        }
        if (level.median > 0.0) {
            log_n.push_back(std::log(static_cast<double>(n)));
            log_median.push_back(std::log(level.median));
        }
        report.levels.push_back(level);
    }
    if (log_n.size() >= 2) report.log_log_slope = regression_slope(log_n, log_median);
    return report;
}

}  // namespace sasfield
