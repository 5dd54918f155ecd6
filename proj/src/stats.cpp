#include "levytrunc/stats.hpp"

#include "levytrunc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace levytrunc {

double kolmogorov_q(double lambda) {
    if (!(lambda > 0.0)) {
        return 1.0;
    }
    if (lambda < 1.18) {
        // Dual (theta-function) series, accurate for small lambda.
        const double y = std::exp(-1.23370055013616983 / (lambda * lambda));
        const double pks = 2.25675833419102515 * std::sqrt(-std::log(y)) *
                           (y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49));
        return std::clamp(1.0 - pks, 0.0, 1.0);
    }
    const double x = std::exp(-2.0 * lambda * lambda);
    return std::clamp(2.0 * (x - std::pow(x, 4) + std::pow(x, 9)), 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw DataError("KS two-sample test requires nonempty samples");
    }
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == x) {
            ++i;
        }
        while (j < sb.size() && sb[j] == x) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

TestResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) {
        throw DataError("KS one-sample test requires a nonempty sample");
    }
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double f = cdf(s[k]);
        d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
    }
    const double en = std::sqrt(n);
    return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

double mean(std::span<const double> x) {
    if (x.empty()) {
        return 0.0;
    }
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m) * (v - m);
    }
    return ss / static_cast<double>(x.size() - 1);
}

QuantileEstimate sample_quantile(std::span<const double> x, double prob) {
    if (x.empty()) {
        throw ConfigError("quantile of an empty sample");
    }
    if (!(prob > 0.0 && prob < 1.0)) {
        throw ConfigError("quantile probability must lie in (0, 1)");
    }
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    const double m = static_cast<double>(s.size());
    auto at = [&s](double rank) {
        const auto k = static_cast<std::ptrdiff_t>(std::ceil(rank)) - 1;
        return s[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(s.size()) - 1))];
    };
    const double spread = std::sqrt(m * prob * (1.0 - prob));
    QuantileEstimate q;
    q.value = at(m * prob);
    q.standard_error = 0.5 * (at(m * prob + spread) - at(m * prob - spread));
    return q;
}

} // namespace levytrunc
