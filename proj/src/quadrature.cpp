#include "levytrunc/quadrature.hpp"

#include "levytrunc/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace levytrunc {

namespace {

constexpr unsigned kMaxDepth = 18;

QuadratureResult gk21(const Integrand& f, double a, double b, const QuadratureConfig& cfg) {
    if (!(a < b)) {
        return {};
    }
    // Boost's recursion compares an unscaled panel error with a scaled tolerance, so narrow
    // intervals recurse to the depth limit. Mapping onto [-1, 1] keeps the two consistent.
    const bool finite = std::isfinite(a) && std::isfinite(b);
    const double mid = finite ? 0.5 * (a + b) : 0.0;
    const double half = finite ? 0.5 * (b - a) : 1.0;
    auto guarded = [&f, finite, mid, half](double s) {
        const double y = finite ? f(mid + half * s) * half : f(s);
        return std::isnan(y) ? 0.0 : y;
    };
    const double lo = finite ? -1.0 : a;
    const double hi = finite ? 1.0 : b;
    double error = 0.0;
    double l1 = 0.0;
    // Boost's stopping rule is relative to the L1 norm; ask for more than we need so that the
    // absolute tolerance is met on small integrals too.
    const double tol = std::max(cfg.rel_tol * 1e-2, 4 * std::numeric_limits<double>::epsilon());
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 21>::integrate(guarded, lo, hi, kMaxDepth, tol, &error, &l1);
    return {value, error};
}

void check(const QuadratureResult& r, const QuadratureConfig& cfg) {
    if (!std::isfinite(r.value)) {
        throw QuadratureError("quadrature produced a non-finite value", r.error);
    }
    if (r.error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(r.value))) {
        throw QuadratureError("adaptive quadrature did not converge", r.error);
    }
}

} // namespace

void QuadratureConfig::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw ConfigError("quadrature tolerances must be > 0");
    }
    if (!(singularity_split > 0.0) || !(singularity_split < 1.0)) {
        throw ConfigError("singularity_split must lie in (0, 1)");
    }
}

QuadratureResult integrate_interval(const Integrand& f, double a, double b, const QuadratureConfig& cfg) {
    const auto r = gk21(f, a, b, cfg);
    check(r, cfg);
    return r;
}

QuadratureResult integrate_positive(const Integrand& f, double a, double b, const QuadratureConfig& cfg,
                                    std::span<const double> breakpoints) {
    if (a < 0.0) {
        throw ConfigError("integrate_positive requires a >= 0");
    }
    QuadratureResult total;
    if (!(a < b)) {
        return total;
    }
    const double split = cfg.singularity_split;

    if (a < split) {
        const double upper = std::min(b, split);
        const double ua = a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
        const double ub = std::log(upper);
        auto in_log = [&f](double u) {
            const double x = std::exp(u);
            if (x == 0.0) {
                return 0.0;
            }
            return f(x) * x;
        };
        const auto r = gk21(in_log, ua, ub, cfg);
        total.value += r.value;
        total.error += r.error;
    }

    std::vector<double> cuts{std::max(a, split)};
    for (double c : breakpoints) {
        if (c > cuts.front() && c < b) {
            cuts.push_back(c);
        }
    }
    // Decade cuts keep each panel within one scale of the origin singularity.
    for (int k = 0;; --k) {
        const double c = std::pow(10.0, k);
        if (!(c > 2.0 * cuts.front())) {
            break;
        }
        if (c < b) {
            cuts.push_back(c);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    // Slivers a few ulps wide make the adaptive rule recurse to its depth limit.
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return y - x <= 1e-12 * std::max(std::abs(x), std::abs(y)); }),
               cuts.end());
    if (std::isfinite(b) && b - cuts.back() <= 1e-12 * std::abs(b)) {
        cuts.back() = b;
    } else {
        cuts.push_back(b);
    }
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto r = gk21(f, cuts[i], cuts[i + 1], cfg);
        total.value += r.value;
        total.error += r.error;
    }
    check(total, cfg);
    return total;
}

} // namespace levytrunc
