#pragma once

// Reference computations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

// Composite Simpson rule with `intervals` (even) panels.
template <class F>
double simpson(F f, double a, double b, std::size_t intervals = 200000) {
    if (intervals % 2 == 1) {
        ++intervals;
    }
    const double h = (b - a) / static_cast<double>(intervals);
    double sum = f(a) + f(b);
    for (std::size_t k = 1; k < intervals; ++k) {
        sum += (k % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(k));
    }
    return sum * h / 3.0;
}

// int_0^inf x^2 / (1 + x^2) e^{-x} dx, truncated where e^{-x} < 1e-26.
inline double exp_jump_poly2_total() {
    return simpson([](double x) { return x * x / (1.0 + x * x) * std::exp(-x); }, 0.0, 60.0);
}

// int_0^1 x^4 / (1 + x^2)^2 e^{-x} dx.
inline double exp_jump_poly2_squared_to_one() {
    return simpson([](double x) { return std::pow(x * x / (1.0 + x * x), 2) * std::exp(-x); }, 0.0, 1.0, 20000);
}

// int_0^t (x^2 / (1 + x^2))^2 e^{-x} dx for t >= 0.
inline double exp_jump_poly2_squared(double t) {
    return simpson([](double x) { return std::pow(x * x / (1.0 + x * x), 2) * std::exp(-x); }, 0.0, t, 200000);
}

// sup over all thresholds of |F_a - F_b|, evaluated at every sample point.
inline double ks_brute_force(const std::vector<double>& a, const std::vector<double>& b) {
    auto ecdf = [](const std::vector<double>& s, double t) {
        return static_cast<double>(std::count_if(s.begin(), s.end(), [t](double x) { return x <= t; })) /
               static_cast<double>(s.size());
    };
    double d = 0.0;
    for (const auto* s : {&a, &b}) {
        for (double t : *s) {
            d = std::max(d, std::abs(ecdf(a, t) - ecdf(b, t)));
        }
    }
    return d;
}

} // namespace oracle
