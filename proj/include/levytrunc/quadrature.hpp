#pragma once

#include <functional>
#include <span>

namespace levytrunc {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    // Split point isolating the origin; (0, split) is integrated in log coordinates.
    double singularity_split = 1e-6;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod on [a, b]; either end may be infinite.
QuadratureResult integrate_interval(const Integrand& f, double a, double b, const QuadratureConfig& cfg);

// Integral over (a, b) with 0 <= a < b <= inf. The piece below cfg.singularity_split uses the
// substitution x = e^u, the rest is split at 1 and at every breakpoint inside (a, b).
// Throws QuadratureError when the accumulated error estimate misses both tolerances.
QuadratureResult integrate_positive(const Integrand& f, double a, double b, const QuadratureConfig& cfg,
                                    std::span<const double> breakpoints = {});

} // namespace levytrunc
