#pragma once

#include <functional>
#include <span>

namespace levytrunc {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Complementary Kolmogorov distribution Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov test: sup |F_a - F_b| with the asymptotic p-value
/// Q((sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) D), ne = n m / (n + m). Throws on an empty sample.
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
TestResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);

struct QuantileEstimate {
    double value = 0.0;
    /// Half the width of the order-statistic interval k +/- sqrt(M p (1 - p)).
    double standard_error = 0.0;
};

QuantileEstimate sample_quantile(std::span<const double> x, double prob);

} // namespace levytrunc
