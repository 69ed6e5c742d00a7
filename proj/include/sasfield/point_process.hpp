// Weighted point measures built from simulated fields, samples of their weak
// limit, and Laplace functionals on trapezoid test functions.
//
// Jump convention: the field uses C_alpha^{1/alpha} j with P(j > x) = x^{-alpha} / 2,
// while the limit is written with nu_alpha(dx) = alpha |x|^{-alpha-1} dx on each
// half line. Both describe the same measure once the kernel is replaced by
// (C_alpha / 2)^{1/alpha} h; see limit_kernel().
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sasfield/field.hpp"
#include "sasfield/geometry.hpp"
#include "sasfield/kernel_model.hpp"
#include "sasfield/lattice.hpp"
#include "sasfield/rng.hpp"

namespace sasfield {

/// g(x) = beta * clamp((|x| - a) / width, 0, 1).
struct TestFunction {
    double a = 1.0;
    double width = 1.0;
    double beta = 1.0;

    /// Throws std::invalid_argument unless a, width and beta are positive and finite.
    void validate() const;
    double operator()(double x) const;
    /// Smallest |x| where g is positive.
    double support_start() const { return a; }
};

struct WeightedAtom {
    double location = 0.0;
    double weight = 0.0;
};

/// Finite sum of weighted Dirac masses on R \ {0}.
class WeightedPointMeasure {
public:
    /// Atoms at 0 or with weight 0 are dropped; negative or non-finite input throws.
    void add(double location, double weight);

    const std::vector<WeightedAtom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }

    double integrate(const TestFunction& g) const;
    /// Total weight on |x| >= delta.
    double mass_beyond(double delta) const;

private:
    std::vector<WeightedAtom> atoms_;
};

struct LaplaceEstimate {
    double value = 1.0;
    double std_error = 0.0;
};

/// Mean and standard error of exp(-N(g)) over the samples; needs two or more.
LaplaceEstimate laplace_empirical(std::span<const WeightedPointMeasure> samples, const TestFunction& g);
/// Same statistic from precomputed integrals N(g).
LaplaceEstimate laplace_from_integrals(std::span<const double> integrals);

/// Atoms (X_u * location_scale, m(u, n) * weight_scale) over u in H_n.
WeightedPointMeasure build_scaled_measure(const FieldSample& field, double location_scale, double weight_scale);

/// Atoms ((c n)^{-p/alpha} X_u, m(u, n) / n^q). Throws DomainError when p = 0.
WeightedPointMeasure build_normalized_measure(const FieldSample& field, const QuotientStructure& qs, double c,
                                              double alpha);

/// The kernel (C_alpha / 2)^{1/alpha} h that pairs with nu_alpha in the limit.
KernelModel limit_kernel(const KernelModel& model);

struct LimitSamplerOptions {
    /// Hard cap on the number of Poisson points.
    std::size_t max_points = 1'000'000;
    /// Stop once every later atom has |x| below this; 0 disables the cutoff.
    double cutoff = 0.0;
};

/// One draw of sum_i sum_u V(xi_i) delta_{j_i h~(v_i, u)} with |j_i| = (2 nu(W) / Gamma_i)^{1/alpha},
/// v_i ~ nu / nu(W) and xi_i uniform on C; V is taken as 1 when q = 0.
/// With a positive cutoff the restriction to |x| >= cutoff is exact.
WeightedPointMeasure sample_limit_measure(const KernelModel& model, const Geometry& geometry,
                                          const LimitSamplerOptions& options, RandomStream& rng);

struct TheoreticalLaplace {
    double value = 1.0;
    /// -log value.
    double exponent = 0.0;
    /// Accumulated quadrature error estimate plus the Monte Carlo error of the C integral.
    double error_estimate = 0.0;
};

/// exp{-(1/|C|) int_C int int (1 - exp(-V(y) sum_u g(x h~(v, u)))) nu(dv) nu_alpha(dx) dy}.
/// Throws std::runtime_error when a quadrature misses its tolerance.
TheoreticalLaplace laplace_theoretical(const KernelModel& model, const Geometry& geometry, const TestFunction& g);

struct ConvergenceOptions {
    std::vector<std::int64_t> radii;
    std::size_t replicates = 0;
    std::uint64_t master_seed = 0;
    std::size_t workers = 1;
    TruncationPolicy truncation;
    std::size_t limit_max_points = 1'000'000;
};

struct ConvergenceRow {
    std::int64_t n = 0;
    std::size_t g_id = 0;
    double empirical = 0.0;
    double std_error = 0.0;
    double theoretical = 0.0;
    bool pass = false;  ///< |empirical - theoretical| <= 3 SE
};

struct TrendFlag {
    std::size_t g_id = 0;
    double tau = 0.0;
    double p_value = 1.0;
    bool decreasing = false;  ///< tau < 0 with p < 0.2
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;        // sorted by (n, g_id)
    std::vector<ConvergenceRow> limit_rows;  // limit sampler against theory, n = 0
    std::vector<TrendFlag> trends;           // empty with fewer than two radii
    std::vector<TheoreticalLaplace> theory;  // per g
    std::size_t truncation_warnings = 0;
    /// Every row at the largest n and every limit row passes.
    bool pass = false;
};

/// Requires increasing radii, replicates >= 100 and a non-empty g list.
ConvergenceReport convergence_report(const KernelModel& model, const QuotientStructure& qs, const Geometry& geometry,
                                     const std::vector<TestFunction>& tests, const ConvergenceOptions& options);

struct ScalingLevel {
    std::int64_t n = 0;
    double unnormalized_mass = 0.0;  ///< mean of sum m(u, n) 1{|x| >= delta}
    double unnormalized_se = 0.0;
    double over_scaled_mass = 0.0;   ///< b_n = n^{(p + eps)/alpha}, weights m / n^q
    double under_scaled_mass = 0.0;  ///< b_n = n^{(p - eps)/alpha}
};

struct ScalingRatio {
    std::int64_t n = 0;
    double ratio = 0.0;  ///< unnormalized mass at 2n over that at n
    bool pass = false;   ///< ratio in [1.5, 3]
};

struct ScalingDiagnostics {
    std::vector<ScalingLevel> levels;
    std::vector<ScalingRatio> ratios;  // one per n with 2n also listed
    bool over_scaling_decreasing = false;
    bool under_scaling_increasing = false;
    bool pass = false;
};

struct ScalingOptions {
    double delta = 0.5;
    double epsilon = 0.3;
};

ScalingDiagnostics scaling_diagnostics(const KernelModel& model, const QuotientStructure& qs, const Geometry& geometry,
                                       const ScalingOptions& scaling, const ConvergenceOptions& options);

/// Stream tags for limit-measure replicates and point-process field replicates.
std::uint64_t limit_stream_tag();
std::uint64_t measure_stream_tag(std::int64_t n);

}  // namespace sasfield
