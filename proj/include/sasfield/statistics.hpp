// Small statistical toolkit for the Monte Carlo checks.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sasfield {

double median(std::vector<double> values);
double mean(std::span<const double> values);
/// Standard error of the mean (sample standard deviation / sqrt(n)).
double standard_error(std::span<const double> values);

/// Kolmogorov limiting distribution P(K > x).
double kolmogorov_survival(double x);

struct TestResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

/// sup |F_n - F| with an asymptotic p-value (Stephens' small-sample correction).
TestResult ks_one_sample(std::vector<double> values, const std::function<double(double)>& cdf);
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kendall's tau between x and y with a one-sided p-value for tau < 0
/// (exact permutation distribution for n <= 8, normal approximation above).
TestResult kendall_tau_decreasing(std::span<const double> x, std::span<const double> y);

/// Pearson chi-square test of independence for an r x c table of counts.
/// Rows or columns with zero total are dropped.
TestResult chi_square_independence(const std::vector<std::vector<double>>& table);

/// Maximum-likelihood scale of a Frechet law exp(-(x/sigma)^{-alpha}) with known alpha.
double frechet_scale_mle(std::span<const double> values, double alpha);
double frechet_cdf(double x, double alpha, double sigma);

/// Least-squares slope of y on x.
double regression_slope(std::span<const double> x, std::span<const double> y);

}  // namespace sasfield
