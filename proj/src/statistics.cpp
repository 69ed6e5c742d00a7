#include "sasfield/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace sasfield {

double median(std::vector<double> values)
{
    if (values.empty()) throw std::invalid_argument("median: empty sample");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double mean(std::span<const double> values)
{
    if (values.empty()) throw std::invalid_argument("mean: empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double standard_error(std::span<const double> values)
{
    if (values.size() < 2) throw std::invalid_argument("standard_error: need at least two values");
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    const double n = static_cast<double>(values.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

double kolmogorov_survival(double x)
{
    if (x <= 0.0) return 1.0;
    if (x < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_one_sample(std::vector<double> values, const std::function<double(double)>& cdf)
{
    if (values.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

namespace {

long long concordance(std::span<const double> x, std::span<const double> y)
{
    long long s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double a = (x[j] - x[i]) * (y[j] - y[i]);
            s += (a > 0) - (a < 0);
        }
    return s;
}

}  // namespace

TestResult kendall_tau_decreasing(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("kendall_tau: need two paired samples of size >= 2");
    const long long s = concordance(x, y);
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    TestResult r{static_cast<double>(s) / pairs, 1.0};
    if (n <= 8) {
        std::vector<double> xs(n), perm(n);
        std::iota(xs.begin(), xs.end(), 0.0);
        std::iota(perm.begin(), perm.end(), 0.0);
        std::size_t total = 0, at_most = 0;
        do {
            ++total;
            if (concordance(xs, perm) <= s) ++at_most;
        } while (std::next_permutation(perm.begin(), perm.end()));
        r.p_value = static_cast<double>(at_most) / static_cast<double>(total);
    } else {
        const double nn = static_cast<double>(n);
        const double sd = std::sqrt(nn * (nn - 1.0) * (2.0 * nn + 5.0) / 18.0);
        r.p_value = boost::math::cdf(boost::math::normal(), static_cast<double>(s) / sd);
    }
    return r;
}

TestResult chi_square_independence(const std::vector<std::vector<double>>& table)
{
    std::vector<double> rows, cols;
    const std::size_t c = table.empty() ? 0 : table[0].size();
    cols.assign(c, 0.0);
    for (const auto& row : table) {
        if (row.size() != c) throw std::invalid_argument("chi_square_independence: ragged table");
        rows.push_back(std::accumulate(row.begin(), row.end(), 0.0));
        for (std::size_t j = 0; j < c; ++j) cols[j] += row[j];
    }
    const double total = std::accumulate(rows.begin(), rows.end(), 0.0);
    std::size_t live_rows = 0, live_cols = 0;
    for (double v : rows) live_rows += v > 0;
    for (double v : cols) live_cols += v > 0;
    if (live_rows < 2 || live_cols < 2) throw std::invalid_argument("chi_square_independence: degenerate table");
    double stat = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i)
        for (std::size_t j = 0; j < c; ++j) {
            if (rows[i] == 0 || cols[j] == 0) continue;
            const double e = rows[i] * cols[j] / total;
            stat += (table[i][j] - e) * (table[i][j] - e) / e;
        }
    const double dof = static_cast<double>((live_rows - 1) * (live_cols - 1));
    return {stat, boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat))};
}

double frechet_scale_mle(std::span<const double> values, double alpha)
{
    if (values.empty()) throw std::invalid_argument("frechet_scale_mle: empty sample");
    double s = 0.0;
    for (double v : values) {
        if (!(v > 0.0)) throw std::invalid_argument("frechet_scale_mle: values must be positive");
        s += std::pow(v, -alpha);
    }
    return std::pow(static_cast<double>(values.size()) / s, 1.0 / alpha);
}

double frechet_cdf(double x, double alpha, double sigma)
{
    if (x <= 0.0) return 0.0;
    return std::exp(-std::pow(x / sigma, -alpha));
}

double regression_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("regression_slope: need >= 2 pairs");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("regression_slope: constant regressor");
    return sxy / sxx;
}

}  // namespace sasfield
