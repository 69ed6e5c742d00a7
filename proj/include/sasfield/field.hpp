// Truncated LePage-series simulation of X_u = C_alpha^{1/alpha} sum_i j_i h(w_i, u_i (+) u)
// on H_n, plus partial maxima experiments.
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sasfield/kernel_model.hpp"
#include "sasfield/lattice.hpp"
#include "sasfield/rng.hpp"

namespace sasfield {

/// Sites H_n with multiplicities m(u, n), and the window H_{n+M} of PRM
/// locations that can reach them.
class FieldLayout {
public:
    struct Contribution {
        std::size_t site;
        double value;
    };

    FieldLayout(const KernelModel& model, const QuotientStructure& qs, std::int64_t n);

    std::int64_t radius() const { return n_; }
    std::size_t mark_count() const { return marks_; }
    const std::vector<HElement>& sites() const { return sites_; }
    const std::vector<std::int64_t>& multiplicities() const { return multiplicity_; }
    const std::vector<HElement>& window() const { return window_; }
    /// Sites s with h(mark, window[i] (+) s) != 0, and that value.
    std::span<const Contribution> contributions(std::size_t window_index, std::size_t mark) const;
    /// Index of a site, or sites().size() when absent.
    std::size_t site_index(const HElement& u) const;

private:
    std::int64_t n_;
    std::size_t marks_;
    std::vector<HElement> sites_;
    std::vector<std::int64_t> multiplicity_;
    std::vector<HElement> window_;
    std::vector<std::size_t> offsets_;  // CSR over (window index, mark)
    std::vector<Contribution> entries_;
};

struct PrmPoint {
    double j = 0.0;
    std::size_t mark = 0;
    std::size_t window_index = 0;
};

/// LePage points: j_i = eps_i (mass / Gamma_i)^{1/alpha} with mass = nu(W) |window|,
/// (w_i, u_i) i.i.d. proportional to nu x counting measure on the window.
struct PrmSample {
    std::vector<PrmPoint> points;
    double total_mass = 0.0;
};

/// Streams LePage points in order of decreasing |j|.
class PrmGenerator {
public:
    PrmGenerator(const KernelModel& model, std::size_t window_size, RandomStream& rng);
    PrmPoint next();
    double total_mass() const { return mass_; }
    /// Gamma_i of the last point drawn.
    double arrival() const { return gamma_; }

private:
    RandomStream& rng_;
    double inv_alpha_;
    double mass_;
    std::size_t window_;
    std::vector<double> cumulative_;  // normalized cumulative mark weights
    double gamma_ = 0.0;
};

PrmSample sample_prm(const KernelModel& model, const FieldLayout& layout, std::size_t count, RandomStream& rng);

struct TruncationPolicy {
    std::size_t initial_index = 1000;
    double relative_tolerance = 1e-3;
    std::size_t max_doublings = 10;
};

struct FieldDiagnostics {
    std::size_t points_used = 0;
    /// C_alpha^{1/alpha} |j_I| max|h| / max|X| at the final index.
    double tail_ratio = 0.0;
    bool truncation_warning = false;
    std::size_t nonfinite_resamples = 0;
};

struct FieldSample {
    std::shared_ptr<const FieldLayout> layout;
    std::vector<double> values;  // aligned with layout->sites()
    FieldDiagnostics diagnostics;

    std::int64_t radius() const { return layout->radius(); }
};

/// One field on H_n. Points are added until the tail bound passes, doubling
/// the index from policy.initial_index; the warning flag is set if the cap is
/// reached first. A draw with non-finite values is discarded and redrawn.
FieldSample sample_field(const KernelModel& model, std::shared_ptr<const FieldLayout> layout,
                         const TruncationPolicy& policy, RandomStream& rng);

/// max |X_t| over the box [-n, n]^d, i.e. over stored sites with m(u, n) >= 1.
double partial_maxima(const FieldSample& field);

struct MaximaRecord {
    std::size_t replicate = 0;
    std::int64_t n = 0;
    double maximum = 0.0;
    std::uint64_t seed = 0;
};

struct MaximaLevel {
    std::int64_t n = 0;
    double median = 0.0;
    double median_over_free_rate = 0.0;     ///< median of n^{-p/alpha} M_n
    double median_over_nominal_rate = 0.0;  ///< median of n^{-d/alpha} M_n
    double frechet_scale = 0.0;             ///< fitted sigma for n^{-p/alpha} M_n
    double ks_distance = 0.0;
    double ks_p_value = 0.0;
    std::size_t truncation_warnings = 0;
    std::size_t nonfinite_resamples = 0;
};

struct MaximaReport {
    std::vector<MaximaRecord> records;  // sorted by (n, replicate)
    std::vector<MaximaLevel> levels;
    /// Least-squares slope of log median M_n against log n.
    double log_log_slope = 0.0;
};

struct MaximaOptions {
    std::vector<std::int64_t> radii;
    std::size_t replicates = 0;
    std::uint64_t master_seed = 0;
    std::size_t workers = 1;
    TruncationPolicy truncation;
};

MaximaReport run_maxima_experiment(const KernelModel& model, const QuotientStructure& qs, const MaximaOptions& options);

/// Stream tag for field replicates at radius n.
std::uint64_t field_stream_tag(std::int64_t n);

}  // namespace sasfield
