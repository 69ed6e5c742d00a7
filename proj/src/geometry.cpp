#include "sasfield/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace sasfield {

namespace {

template <unsigned N, class F>
double gauss_legendre(const F& f, double a, double b)
{
    return boost::math::quadrature::gauss<double, N>::integrate(f, a, b);
}

double box_volume(const std::vector<double>& lo, const std::vector<double>& hi)
{
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
}

// Lasserre recursion cost caps: one-off volumes and per-point fiber volumes.
constexpr std::size_t max_exact_volume_dim = 4;
constexpr std::size_t max_exact_fiber_dim = 4;

Estimate hit_fraction_estimate(std::size_t hits, std::size_t n, double box)
{
    const double f = static_cast<double>(hits) / static_cast<double>(n);
    return {box * f, box * std::sqrt(f * (1.0 - f) / static_cast<double>(n)), false};
}

}  // namespace

Geometry Geometry::build(const QuotientStructure& qs, const GeometryOptions& options)
{
    return from_bases(qs.free_basis(), qs.kernel_basis(), qs.torsion_order(), options);
}

Geometry Geometry::from_bases(const IntMatrix& u, const IntMatrix& v, std::int64_t torsion,
                              const GeometryOptions& options)
{
    if (u.rows() != v.rows()) throw std::invalid_argument("Geometry: U and V row counts differ");
    if (torsion < 1) throw std::invalid_argument("Geometry: torsion order must be positive");
    const IntMatrix w = u.concat_columns(v);
    if (rank(w) != w.cols()) throw std::invalid_argument("Geometry: columns of [U : V] are dependent");
    if (w.cols() == 0) throw std::invalid_argument("Geometry: empty basis");

    Geometry g;
    g.p_ = u.cols();
    g.q_ = v.cols();
    g.torsion_ = torsion;
    g.options_ = options;
    const std::size_t dim = w.cols();
    std::vector<HalfSpace> rows;
    for (std::size_t j = 0; j < w.rows(); ++j) {
        HalfSpace up{RatVec(dim), 1}, down{RatVec(dim), 1};
        std::vector<double> wd(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            up.normal[k] = Rational(w(j, k));
            down.normal[k] = -Rational(w(j, k));
            wd[k] = w(j, k).get_d();
        }
        rows.push_back(std::move(up));
        rows.push_back(std::move(down));
        g.w_rows_.push_back(std::move(wd));
    }
    g.lifted_ = HPolytope(dim, std::move(rows));
    g.finish();
    return g;
}

void Geometry::finish()
{
    const std::size_t dim = p_ + q_;
    for (std::size_t k = 0; k < dim; ++k) {
        RatVec e(dim, 0);
        e[k] = 1;
        const LpResult hi = maximize(e, lifted_);
        if (hi.status != LpResult::Status::optimal) throw std::domain_error("Geometry: P is unbounded");
        // P = -P, so the lower bound is the negated upper bound.
        const double h = hi.value.get_d();
        if (k < p_) {
            box_lo_.push_back(-h);
            box_hi_.push_back(h);
            if (k == 0) half_width_ = hi.value;
        } else {
            lambda_lo_.push_back(-h);
            lambda_hi_.push_back(h);
        }
    }
    body_ = lifted_.eliminate_trailing(q_).without_redundant_rows();

    if (p_ == 0) {
        volume_ = {1.0, 0.0, true};
    } else if (p_ == 1) {
        volume_ = {Rational(2 * half_width_).get_d(), 0.0, true};
    } else if (p_ == 2) {
        polygon_ = body_.vertices();
        // C is centrally symmetric, so angles about the origin order the vertices.
        std::sort(polygon_.begin(), polygon_.end(), [](const RatVec& a, const RatVec& b) {
            return std::atan2(a[1].get_d(), a[0].get_d()) < std::atan2(b[1].get_d(), b[0].get_d());
        });
        volume_ = {convex_polygon_area(polygon_).get_d(), 0.0, true};
    } else if (p_ <= max_exact_volume_dim) {
        volume_ = {body_.exact_volume().get_d(), 0.0, true};
    } else {
        RandomStream rng(options_.seed, {0xC0, 1});
        std::size_t hits = 0;
        std::vector<double> y(p_);
        for (std::size_t s = 0; s < options_.volume_samples; ++s) {
            for (std::size_t i = 0; i < p_; ++i) y[i] = rng.uniform(box_lo_[i], box_hi_[i]);
            if (body_.contains(y)) ++hits;
        }
        volume_ = hit_fraction_estimate(hits, options_.volume_samples, box_volume(box_lo_, box_hi_));
    }

    if (exact()) {
        std::vector<double> prefix;
        integral_v_ = {integrate_exact(lifted_, p_, prefix, [](double v, std::span<const double>) { return v; }, 3),
                       0.0, true};
    } else if (dim <= max_exact_volume_dim) {
        // Fubini: the integral of V over C is vol(P).
        integral_v_ = {lifted_.exact_volume().get_d(), 0.0, true};
    } else {
        // Fubini: the integral of V over C is vol(P).
        RandomStream rng(options_.seed, {0xC0, 2});
        std::vector<double> lo = box_lo_, hi = box_hi_;
        lo.insert(lo.end(), lambda_lo_.begin(), lambda_lo_.end());
        hi.insert(hi.end(), lambda_hi_.begin(), lambda_hi_.end());
        std::vector<double> z(dim);
        std::size_t hits = 0;
        for (std::size_t s = 0; s < options_.volume_samples; ++s) {
            for (std::size_t i = 0; i < dim; ++i) z[i] = rng.uniform(lo[i], hi[i]);
            bool inside = true;
            for (const auto& row : w_rows_) {
                double acc = 0;
                for (std::size_t k = 0; k < dim; ++k) acc += row[k] * z[k];
                if (std::abs(acc) > 1.0) {
                    inside = false;
                    break;
                }
            }
            if (inside) ++hits;
        }
        integral_v_ = hit_fraction_estimate(hits, options_.volume_samples, box_volume(lo, hi));
    }
}

const Rational& Geometry::half_width() const
{
    if (p_ != 1) throw std::logic_error("Geometry::half_width: requires p = 1");
    return half_width_;
}

bool Geometry::contains(std::span<const double> y) const
{
    if (y.size() != p_) throw std::invalid_argument("Geometry::contains: dimension mismatch");
    if (p_ == 0) return true;
    return body_.contains(y, 1e-12);
}

Rational Geometry::fiber_volume_exact(const RatVec& y) const
{
    if (q_ > max_exact_fiber_dim) throw std::logic_error("Geometry::fiber_volume_exact: requires q <= 4");
    if (y.size() != p_) throw std::invalid_argument("Geometry::fiber_volume_exact: dimension mismatch");
    return lifted_.slice_leading(y).exact_volume();
}

Estimate Geometry::fiber_volume(std::span<const double> y) const
{
    if (!contains(y)) return {0.0, 0.0, true};
    if (q_ == 0) return {1.0, 0.0, true};
    if (q_ <= max_exact_fiber_dim) return {fiber_volume_exact(to_rational(y)).get_d(), 0.0, true};
    return fiber_volume_mc(y);
}

Estimate Geometry::fiber_volume_mc(std::span<const double> y) const
{
    std::vector<std::uint64_t> path{0xF1};
    for (double v : y) path.push_back(std::bit_cast<std::uint64_t>(v));
    RandomStream rng(options_.seed, std::move(path));
    std::vector<double> shift(w_rows_.size(), 0.0);
    for (std::size_t j = 0; j < w_rows_.size(); ++j)
        for (std::size_t i = 0; i < p_; ++i) shift[j] += w_rows_[j][i] * y[i];
    std::vector<double> lambda(q_);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < options_.fiber_samples; ++s) {
        for (std::size_t i = 0; i < q_; ++i) lambda[i] = rng.uniform(lambda_lo_[i], lambda_hi_[i]);
        bool inside = true;
        for (std::size_t j = 0; j < w_rows_.size() && inside; ++j) {
            double acc = shift[j];
            for (std::size_t i = 0; i < q_; ++i) acc += w_rows_[j][p_ + i] * lambda[i];
            inside = std::abs(acc) <= 1.0;
        }
        if (inside) ++hits;
    }
    return hit_fraction_estimate(hits, options_.fiber_samples, box_volume(lambda_lo_, lambda_hi_));
}

double Geometry::sup_fiber_volume() const
{
    const std::vector<double> zero(p_, 0.0);
    return fiber_volume(zero).value;
}

double Geometry::integrate_exact(const HPolytope& poly, std::size_t free_dims, std::vector<double>& prefix,
                                 const std::function<double(double, std::span<const double>)>& phi,
                                 int order) const
{
    if (free_dims == 0) return phi(poly.exact_volume().get_d(), prefix);
    std::vector<Rational> breaks;
    for (const auto& v : poly.vertices()) breaks.push_back(v[0]);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double total = 0.0;
    auto inner = [&](double t) {
        prefix.push_back(t);
        const double val = integrate_exact(poly.slice_leading({to_rational(t)}), free_dims - 1, prefix, phi, order);
        prefix.pop_back();
        return val;
    };
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i].get_d(), b = breaks[i + 1].get_d();
        total += order <= 3 ? gauss_legendre<3>(inner, a, b) : gauss_legendre<20>(inner, a, b);
    }
    return total;
}

Estimate Geometry::integrate(const std::function<double(double, std::span<const double>)>& phi) const
{
    if (p_ == 0) {
        const std::vector<double> none;
        const Estimate v = fiber_volume(none);
        return {phi(v.value, none), 0.0, v.exact};
    }
    if (exact()) {
        std::vector<double> prefix;
        return {integrate_exact(lifted_, p_, prefix, phi, 20), 0.0, true};
    }
    const std::size_t n = q_ <= 2 ? options_.volume_samples / 4 : options_.volume_samples / 100;
    RandomStream rng(options_.seed, {0xC0, 3});
    // With |C| exact, sampling uniformly from C avoids the zero draws outside it.
    const bool within_body = volume_.exact;
    std::vector<double> y(p_);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        double f = 0.0;
        if (within_body) {
            y = sample_uniform(rng);
            f = phi(fiber_volume(y).value, y);
        } else {
            for (std::size_t i = 0; i < p_; ++i) y[i] = rng.uniform(box_lo_[i], box_hi_[i]);
            if (contains(y)) f = phi(fiber_volume(y).value, y);
        }
        sum += f;
        sum_sq += f * f;
    }
    const double scale = within_body ? volume_.value : box_volume(box_lo_, box_hi_);
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
    return {scale * mean, scale * std::sqrt(var / static_cast<double>(n)), false};
}

double Geometry::scaling_constant() const
{
    if (p_ == 0) throw std::domain_error("scaling constant undefined for p = 0");
    return std::pow(static_cast<double>(torsion_) * volume_.value, 1.0 / static_cast<double>(p_));
}

std::vector<double> Geometry::sample_uniform(RandomStream& rng) const
{
    std::vector<double> y(p_);
    if (p_ == 0) return y;
    for (;;) {
        for (std::size_t i = 0; i < p_; ++i) y[i] = rng.uniform(box_lo_[i], box_hi_[i]);
        if (body_.contains(y)) return y;
    }
}

Rational m_profile(std::size_t coset, std::int64_t n, std::span<const double> y, const QuotientStructure& qs)
{
    if (n < 1) throw std::invalid_argument("m_profile: n must be positive");
    if (y.size() != qs.effective_dimension()) throw std::invalid_argument("m_profile: dimension mismatch");
    IntVec alpha(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) alpha[i] = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * y[i]));
    const HElement t = qs.element(coset, alpha);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(qs.kernel_rank()));
    Rational r(Integer(static_cast<long>(count_m(t, n, qs))), scale);
    r.canonicalize();
    return r;
}

double kappa0_empirical(const QuotientStructure& qs, const std::vector<std::int64_t>& radii)
{
    double best = 0.0;
    for (auto n : radii) {
        const double scale = std::pow(static_cast<double>(n), static_cast<double>(qs.kernel_rank()));
        for (const auto& u : enumerate_Hn(n, qs))
            best = std::max(best, static_cast<double>(count_m(u, n, qs)) / scale);
    }
    return best;
}

std::vector<std::vector<double>> body_grid(const Geometry& geometry, std::size_t per_axis)
{
    const std::size_t p = geometry.effective_dimension();
    std::vector<std::vector<double>> out;
    if (p == 0) {
        out.emplace_back();
        return out;
    }
    if (per_axis < 2) throw std::invalid_argument("body_grid: need at least two points per axis");
    std::vector<std::size_t> idx(p, 0);
    std::vector<double> y(p);
    for (;;) {
        for (std::size_t i = 0; i < p; ++i) {
            const double lo = geometry.box_lower()[i], hi = geometry.box_upper()[i];
            y[i] = lo + (hi - lo) * static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1);
        }
        if (geometry.contains(y)) out.push_back(y);
        std::size_t i = 0;
        while (i < p && ++idx[i] == per_axis) idx[i++] = 0;
        if (i == p) break;
    }
    return out;
}

}  // namespace sasfield
