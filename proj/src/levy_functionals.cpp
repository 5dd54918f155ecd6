#include "levytrunc/levy_functionals.hpp"

#include "levytrunc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace levytrunc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

QuadratureResult integrate_measure(const LevyModel& model, const std::function<double(double)>& g, double a,
                                   double b, const QuadratureConfig& cfg, std::span<const double> abs_breakpoints) {
    QuadratureResult total;
    if (model.is_zero() || !(a < b)) {
        return total;
    }
    const Support& s = model.support();

    // Positive half-line: x in (max(a, 0), min(b, upper)).
    if (s.has_positive()) {
        const double lo = std::max({a, 0.0, s.lower});
        const double hi = std::min(b, s.upper);
        if (lo < hi) {
            auto f = [&](double x) {
                const double gx = g(x);
                return gx == 0.0 ? 0.0 : gx * model.density(x);
            };
            const auto r = integrate_positive(f, lo, hi, cfg, abs_breakpoints);
            total.value += r.value;
            total.error += r.error;
        }
    }
    // Negative half-line, mirrored: y = -x in (max(-b, 0), min(-a, -lower)).
    if (s.has_negative()) {
        const double lo = std::max({-b, 0.0, -s.upper});
        const double hi = std::min(-a, -s.lower);
        if (lo < hi) {
            auto f = [&](double y) {
                const double gx = g(-y);
                return gx == 0.0 ? 0.0 : gx * model.density(-y);
            };
            const auto r = integrate_positive(f, lo, hi, cfg, abs_breakpoints);
            total.value += r.value;
            total.error += r.error;
        }
    }
    return total;
}

double nu_side_tail(const LevyModel& model, double v, bool positive, const QuadratureConfig& cfg) {
    if (v < 0.0 || std::isnan(v)) {
        throw ConfigError("tail threshold must be >= 0");
    }
    if (std::isinf(v) || model.is_zero()) {
        return 0.0;
    }
    if (v == 0.0 && !model.finite_activity()) {
        throw InfiniteMassError("nu({|x| > 0}) is infinite for " + model.name());
    }
    if (const auto& tail = model.closed_form_tail()) {
        return positive ? tail->positive(v) : tail->negative(v);
    }
    auto one = [](double) { return 1.0; };
    return positive ? integrate_measure(model, one, v, kInf, cfg).value
                    : integrate_measure(model, one, -kInf, -v, cfg).value;
}

double nu_tail_mass(const LevyModel& model, double v, const QuadratureConfig& cfg) {
    return nu_side_tail(model, v, true, cfg) + nu_side_tail(model, v, false, cfg);
}

double n_rho(const LevyModel& model, const RhoFunction& rho, double t, const QuadratureConfig& cfg,
             std::span<const double> abs_breakpoints) {
    if (std::isnan(t)) {
        throw ConfigError("n_rho evaluated at NaN");
    }
    return integrate_measure(model, [&rho](double x) { return rho(x); }, -kInf, t, cfg, abs_breakpoints).value;
}

double time_change(const LevyModel& model, const RhoFunction& rho, double t, const QuadratureConfig& cfg) {
    if (std::isnan(t)) {
        throw ConfigError("time_change evaluated at NaN");
    }
    return integrate_measure(model, [&rho](double x) {
        const double r = rho(x);
        return r * r;
    }, -kInf, t, cfg).value;
}

double h_cov(const LevyModel& model, const RhoFunction& rho, double u, double v, const QuadratureConfig& cfg) {
    return time_change(model, rho, std::min(u, v), cfg);
}

double d_rho(const LevyModel& model, const RhoFunction& rho, double u, double v, const QuadratureConfig& cfg) {
    if (u == v) {
        return 0.0;
    }
    const double hi = std::max(u, v);
    const double lo = std::min(u, v);
    double diff = h_cov(model, rho, hi, hi, cfg) - h_cov(model, rho, lo, lo, cfg);
    if (diff < 0.0) {
        if (diff < -cfg.abs_tol) {
            throw NumericalError("d_rho: time change decreased by " + std::to_string(-diff));
        }
        diff = 0.0;
    }
    return std::sqrt(diff);
}

double truncated_second_moment(const LevyModel& model, double u, const QuadratureConfig& cfg) {
    if (u < 0.0) {
        throw ConfigError("truncation level must be >= 0");
    }
    if (u == 0.0) {
        return 0.0;
    }
    return integrate_measure(model, [u](double x) { return std::abs(x) <= u ? x * x : 0.0; }, -u, u, cfg).value;
}

double band_first_moment(const LevyModel& model, double lo, double hi, const QuadratureConfig& cfg) {
    if (!(lo >= 0.0) || !(hi >= lo)) {
        throw ConfigError("band_first_moment requires 0 <= lo <= hi");
    }
    if (lo == hi) {
        return 0.0;
    }
    auto id = [](double x) { return x; };
    return integrate_measure(model, id, lo, hi, cfg).value + integrate_measure(model, id, -hi, -lo, cfg).value;
}

} // namespace levytrunc
