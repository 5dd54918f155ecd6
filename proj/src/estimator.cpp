#include "levytrunc/estimator.hpp"

#include "levytrunc/errors.hpp"
#include "levytrunc/levy_functionals.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levytrunc {

StepFunction::StepFunction(std::vector<double> sorted_locations, std::span<const double> weights)
    : locations_(std::move(sorted_locations)), cumulative_(weights.size()) {
    if (locations_.size() != weights.size()) {
        throw ConfigError("step function needs one weight per location");
    }
    std::partial_sum(weights.begin(), weights.end(), cumulative_.begin());
}

double StepFunction::operator()(double t) const {
    const auto k = std::upper_bound(locations_.begin(), locations_.end(), t) - locations_.begin();
    return k == 0 ? 0.0 : cumulative_[static_cast<std::size_t>(k - 1)];
}

TruncatedLDF TruncatedLDF::estimate(std::span<const double> increments, const ObservationScheme& scheme,
                                    const RhoFunction& rho) {
    if (!(scheme.v_n() > 0.0)) {
        throw ConfigError("estimator requires v_n > 0");
    }
    TruncatedLDF ldf;
    ldf.n_ = increments.size();
    ldf.delta_n_ = scheme.delta_n();
    ldf.v_n_ = scheme.v_n();
    for (double x : increments) {
        if (std::abs(x) > ldf.v_n_) {
            ldf.kept_.push_back(x);
        }
    }
    std::sort(ldf.kept_.begin(), ldf.kept_.end());
    const double horizon = ldf.horizon();
    ldf.rho_values_.reserve(ldf.kept_.size());
    std::vector<double> weights;
    std::vector<double> sq_weights;
    weights.reserve(ldf.kept_.size());
    sq_weights.reserve(ldf.kept_.size());
    for (double x : ldf.kept_) {
        const double r = rho(x);
        ldf.rho_values_.push_back(r);
        weights.push_back(r / horizon);
        sq_weights.push_back(r * r / horizon);
    }
    ldf.value_ = StepFunction(ldf.kept_, weights);
    ldf.variance_ = StepFunction(ldf.kept_, sq_weights);
    return ldf;
}

StepFunction TruncatedLDF::reweighted(const std::function<double(double)>& w) const {
    std::vector<double> weights(kept_.size());
    const double horizon = this->horizon();
    for (std::size_t k = 0; k < kept_.size(); ++k) {
        weights[k] = rho_values_[k] * w(kept_[k]) / horizon;
    }
    return StepFunction(kept_, weights);
}

TruncatedLDF estimate(const IncrementPath& path, const RhoFunction& rho) {
    return TruncatedLDF::estimate(path.increments, path.scheme, rho);
}

double empirical_process(const TruncatedLDF& ldf, const LevyModel& model, const RhoFunction& rho, double t,
                         const QuadratureConfig& cfg) {
    return std::sqrt(ldf.horizon()) * (ldf(t) - n_rho(model, rho, t, cfg));
}

CutoffPsi::CutoffPsi(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("cutoff alpha must be finite and > 0");
    }
}

double CutoffPsi::psi(double x) {
    if (x <= 0.5) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    const double rising = std::exp(-1.0 / (x - 0.5));
    const double falling = std::exp(-1.0 / (1.0 - x));
    return rising / (rising + falling);
}

std::pair<double, double> split_n_rho(const LevyModel& model, const RhoFunction& rho, const CutoffPsi& cutoff,
                                      double t, const QuadratureConfig& cfg) {
    const double a = cutoff.alpha();
    const double breaks[] = {0.5 * a, a};
    const double large = integrate_measure(model, [&](double x) {
        const double r = rho(x);
        return r == 0.0 ? 0.0 : r * cutoff.large(x);
    }, -std::numeric_limits<double>::infinity(), t, cfg, breaks).value;
    const double small = integrate_measure(model, [&](double x) {
        const double r = rho(x);
        return r == 0.0 ? 0.0 : r * cutoff.small(x);
    }, -std::numeric_limits<double>::infinity(), t, cfg, breaks).value;
    return {large, small};
}

Decomposition decompose(const TruncatedLDF& ldf, const RhoFunction& rho, const CutoffPsi& cutoff,
                        const LevyModel& model, double t, const QuadratureConfig& cfg) {
    double large_sum = 0.0;
    double small_sum = 0.0;
    const auto kept = ldf.kept();
    const auto rho_values = ldf.rho_values();
    for (std::size_t k = 0; k < kept.size() && kept[k] <= t; ++k) {
        large_sum += rho_values[k] * cutoff.large(kept[k]);
        small_sum += rho_values[k] * cutoff.small(kept[k]);
    }
    const auto [n_large, n_small] = split_n_rho(model, rho, cutoff, t, cfg);
    const double horizon = ldf.horizon();
    const double scale = std::sqrt(horizon);
    return {scale * (large_sum / horizon - n_large), scale * (small_sum / horizon - n_small)};
}

Decomposition decompose(const IncrementPath& path, const RhoFunction& rho, const CutoffPsi& cutoff,
                        const LevyModel& model, double t, const QuadratureConfig& cfg) {
    return decompose(estimate(path, rho), rho, cutoff, model, t, cfg);
}

Band confidence_band(const TruncatedLDF& ldf, double t, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw ConfigError("confidence level must lie in (0, 1)");
    }
    const double center = ldf(t);
    const double h = std::max(0.0, ldf.plugin_variance(t));
    const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + level));
    const double half = z * std::sqrt(h / ldf.horizon());
    return {center - half, center + half};
}

} // namespace levytrunc
