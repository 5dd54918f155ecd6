#include "levytrunc/levy_model.hpp"

#include "levytrunc/errors.hpp"
#include "levytrunc/levy_functionals.hpp"
#include "levytrunc/rng.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <utility>

namespace levytrunc {

std::string to_string(SamplerKind kind) {
    switch (kind) {
    case SamplerKind::inverse_cdf:
        return "inverse_cdf";
    case SamplerKind::rejection:
        return "rejection";
    case SamplerKind::exact_family:
        return "exact_family";
    }
    return "unknown";
}

std::string to_string(LevyFamily family) {
    switch (family) {
    case LevyFamily::zero:
        return "zero";
    case LevyFamily::exp_jump:
        return "exp_jump";
    case LevyFamily::stable_tempered:
        return "stable_tempered";
    case LevyFamily::variance_gamma:
        return "variance_gamma";
    case LevyFamily::custom:
        return "custom";
    }
    return "unknown";
}

double TemperedEnvelope::operator()(double x) const {
    if (x == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double c = x > 0.0 ? c_pos : c_neg;
    if (c == 0.0) {
        return 0.0;
    }
    const double ax = std::abs(x);
    return c * std::pow(ax, -(1.0 + index)) * std::exp(-lambda * ax);
}

namespace {

// Upper incomplete gamma Gamma(s, z) for s > -2, z > 0.
double upper_gamma(double s, double z) {
    if (s > 0.0) {
        return boost::math::tgamma(s, z);
    }
    if (s == 0.0) {
        return boost::math::expint(1, z);
    }
    return (upper_gamma(s + 1.0, z) - std::pow(z, s) * std::exp(-z)) / s;
}

void require(bool ok, const std::string& msg) {
    if (!ok) {
        throw ConfigError(msg);
    }
}

double number(const nlohmann::json& j, const char* key, std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) {
            return *fallback;
        }
        throw ConfigError(std::string("model spec is missing '") + key + "'");
    }
    const auto& v = j.at(key);
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        std::size_t pos = 0;
        const double d = std::stod(s, &pos);
        require(pos == s.size(), "invalid decimal string '" + s + "'");
        return d;
    }
    return v.get<double>();
}

} // namespace

LevyModel LevyModel::zero() {
    LevyModel m;
    m.family_ = LevyFamily::zero;
    m.name_ = "zero";
    m.params_ = nlohmann::json::object();
    m.density_ = [](double) { return 0.0; };
    m.support_ = Support{};
    m.beta_ = 1.0;
    m.closed_tail_ = ClosedFormTail{[](double) { return 0.0; }, [](double) { return 0.0; }, {}, {}};
    m.sampler_kind_ = SamplerKind::exact_family;
    m.finite_activity_ = true;
    return m;
}

LevyModel LevyModel::exp_jump(double c, double lambda) {
    require(c > 0.0 && std::isfinite(c), "exp_jump requires finite c > 0");
    require(lambda > 0.0 && std::isfinite(lambda), "exp_jump requires finite lambda > 0");
    LevyModel m;
    m.family_ = LevyFamily::exp_jump;
    m.name_ = "exp_jump";
    m.params_ = {{"c", c}, {"lambda", lambda}};
    m.density_ = [c, lambda](double x) { return c * std::exp(-lambda * x); };
    m.support_ = Support{0.0, std::numeric_limits<double>::infinity()};
    // Bounded near 0, so h <= K |x|^{-(1+beta)} holds for every beta in (0, 2).
    m.beta_ = 1.0;
    m.envelope_ = TemperedEnvelope{c, 0.0, -1.0, lambda};
    ClosedFormTail tail;
    tail.positive = [c, lambda](double v) { return c / lambda * std::exp(-lambda * v); };
    tail.negative = [](double) { return 0.0; };
    tail.positive_inverse = [c, lambda](double mass) { return -std::log(mass * lambda / c) / lambda; };
    m.closed_tail_ = std::move(tail);
    m.sampler_kind_ = SamplerKind::inverse_cdf;
    m.finite_activity_ = true;
    m.validate(QuadratureConfig{});
    return m;
}

LevyModel LevyModel::stable_tempered(double c_pos, double c_neg, double beta, double lambda) {
    require(c_pos >= 0.0 && c_neg >= 0.0 && c_pos + c_neg > 0.0, "stable_tempered requires c_pos, c_neg >= 0, not both 0");
    require(beta > 0.0 && beta < 2.0, "stable_tempered requires 0 < beta < 2");
    require(lambda > 0.0 && std::isfinite(lambda), "stable_tempered requires finite lambda > 0");
    LevyModel m;
    m.family_ = LevyFamily::stable_tempered;
    m.name_ = "stable_tempered";
    m.params_ = {{"c_pos", c_pos}, {"c_neg", c_neg}, {"beta", beta}, {"lambda", lambda}};
    m.density_ = [c_pos, c_neg, beta, lambda](double x) {
        const double ax = std::abs(x);
        return (x > 0.0 ? c_pos : c_neg) * std::pow(ax, -(1.0 + beta)) * std::exp(-lambda * ax);
    };
    m.support_ = Support{c_neg > 0.0 ? -std::numeric_limits<double>::infinity() : 0.0,
                         c_pos > 0.0 ? std::numeric_limits<double>::infinity() : 0.0};
    m.beta_ = beta;
    m.envelope_ = TemperedEnvelope{c_pos, c_neg, beta, lambda};
    auto side = [beta, lambda](double c) -> SideTail {
        return [c, beta, lambda](double v) {
            if (c == 0.0) {
                return 0.0;
            }
            if (v == 0.0) {
                return std::numeric_limits<double>::infinity();
            }
            if (std::isinf(v)) {
                return 0.0;
            }
            return c * std::pow(lambda, beta) * upper_gamma(-beta, lambda * v);
        };
    };
    m.closed_tail_ = ClosedFormTail{side(c_pos), side(c_neg), {}, {}};
    m.sampler_kind_ = SamplerKind::exact_family;
    m.finite_activity_ = false;
    m.validate(QuadratureConfig{});
    return m;
}

LevyModel LevyModel::variance_gamma(double c, double lambda, double declared_beta) {
    require(c > 0.0 && std::isfinite(c), "variance_gamma requires finite c > 0");
    require(lambda > 0.0 && std::isfinite(lambda), "variance_gamma requires finite lambda > 0");
    require(declared_beta > 0.0 && declared_beta < 2.0, "variance_gamma declared beta must lie in (0, 2)");
    LevyModel m;
    m.family_ = LevyFamily::variance_gamma;
    m.name_ = "variance_gamma";
    m.params_ = {{"c", c}, {"lambda", lambda}, {"beta", declared_beta}};
    m.density_ = [c, lambda](double x) {
        const double ax = std::abs(x);
        return c * std::exp(-lambda * ax) / ax;
    };
    m.support_ = Support{};
    m.beta_ = declared_beta;
    m.envelope_ = TemperedEnvelope{c, c, 0.0, lambda};
    SideTail tail = [c, lambda](double v) {
        if (v == 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        if (std::isinf(v)) {
            return 0.0;
        }
        return c * boost::math::expint(1, lambda * v);
    };
    m.closed_tail_ = ClosedFormTail{tail, tail, {}, {}};
    m.sampler_kind_ = SamplerKind::exact_family;
    m.finite_activity_ = false;
    m.validate(QuadratureConfig{});
    return m;
}

LevyModel LevyModel::custom(CustomSpec spec, const QuadratureConfig& cfg) {
    require(static_cast<bool>(spec.density), "custom model requires a density");
    require(spec.support.lower <= 0.0 && spec.support.upper >= 0.0 && spec.support.lower < spec.support.upper,
            "custom model support must be an interval around the origin");
    require(spec.beta > 0.0 && spec.beta < 2.0, "custom model beta must lie in (0, 2)");
    require(spec.sampler_kind != SamplerKind::exact_family, "exact_family is reserved for catalogue models");
    require(spec.sampler_kind != SamplerKind::inverse_cdf || spec.closed_form_tail.has_value(),
            "inverse_cdf sampling requires a closed-form tail");
    LevyModel m;
    m.family_ = LevyFamily::custom;
    m.name_ = spec.name.empty() ? "custom" : spec.name;
    m.params_ = nlohmann::json::object();
    m.density_ = std::move(spec.density);
    m.support_ = spec.support;
    m.beta_ = spec.beta;
    m.tail_exponent_ = spec.tail_exponent;
    m.envelope_ = spec.envelope;
    m.closed_tail_ = std::move(spec.closed_form_tail);
    m.sampler_kind_ = spec.sampler_kind;
    m.finite_activity_ = spec.finite_activity;
    m.validate(cfg);
    return m;
}

void LevyModel::validate(const QuadratureConfig& cfg) const {
    cfg.validate();
    if (envelope_.index < -1.0 || envelope_.lambda < 0.0) {
        throw ConfigError(name_ + ": envelope requires index >= -1 and lambda >= 0");
    }
    // Nonnegativity, envelope domination (covers the near-zero growth bound) and boundedness on
    // annuli, spot-checked on a log grid.
    constexpr int kPoints = 300;
    for (int i = 0; i <= kPoints; ++i) {
        const double mag = std::pow(10.0, -8.0 + 11.0 * i / kPoints);
        for (double x : {mag, -mag}) {
            if (!support_.contains(x)) {
                continue;
            }
            const double h = density_(x);
            if (!(h >= 0.0) || !std::isfinite(h)) {
                throw ConfigError(name_ + ": density must be finite and >= 0 (x = " + std::to_string(x) + ")");
            }
            if (h > envelope_(x) * (1.0 + 1e-9)) {
                throw ConfigError(name_ + ": density exceeds its declared envelope at x = " + std::to_string(x));
            }
        }
    }

    QuadratureConfig loose = cfg;
    loose.rel_tol = std::max(cfg.rel_tol, 1e-6);
    const auto levy_integral = integrate_measure(*this, [](double x) { return std::min(1.0, x * x); },
                                                 -std::numeric_limits<double>::infinity(),
                                                 std::numeric_limits<double>::infinity(), loose);
    if (!std::isfinite(levy_integral.value)) {
        throw ConfigError(name_ + ": int (1 ^ x^2) nu(dx) is not finite");
    }

    if (closed_tail_) {
        for (double v : {0.05, 0.5, 2.0}) {
            for (bool positive : {true, false}) {
                const double closed = positive ? closed_tail_->positive(v) : closed_tail_->negative(v);
                const double lo = positive ? v : -std::numeric_limits<double>::infinity();
                const double hi = positive ? std::numeric_limits<double>::infinity() : -v;
                const double quad =
                    integrate_measure(*this, [](double) { return 1.0; }, lo, hi, cfg).value;
                if (std::abs(closed - quad) > 1e-6 * std::max(std::abs(closed), 1e-300) &&
                    std::abs(closed - quad) > cfg.abs_tol) {
                    throw ConfigError(name_ + ": closed-form tail disagrees with quadrature at v = " +
                                      std::to_string(v) + " (" + std::to_string(closed) + " vs " +
                                      std::to_string(quad) + ")");
                }
            }
        }
    }
}

nlohmann::json LevyModel::to_json() const {
    if (family_ == LevyFamily::custom) {
        throw ConfigError("custom model '" + name_ + "' cannot be serialized");
    }
    auto ext = [](double x) -> nlohmann::json {
        if (std::isinf(x)) {
            return x > 0 ? "inf" : "-inf";
        }
        return x;
    };
    nlohmann::json j = params_;
    j["family"] = to_string(family_);
    j["support"] = {ext(support_.lower), ext(support_.upper)};
    j["tail_exponent"] = ext(tail_exponent_);
    j["sampler_kind"] = to_string(sampler_kind_);
    j["finite_activity"] = finite_activity_;
    return j;
}

LevyModel LevyModel::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family")) {
        throw ConfigError("model spec must be an object with a 'family' field");
    }
    const auto family = j.at("family").get<std::string>();
    if (family == "zero") {
        return zero();
    }
    if (family == "exp_jump") {
        return exp_jump(number(j, "c", 1.0), number(j, "lambda", 1.0));
    }
    if (family == "stable_tempered") {
        const double c = number(j, "c", 1.0);
        return stable_tempered(number(j, "c_pos", c), number(j, "c_neg", c), number(j, "beta"),
                               number(j, "lambda", 1.0));
    }
    if (family == "variance_gamma") {
        return variance_gamma(number(j, "c", 1.0), number(j, "lambda", 1.0), number(j, "beta", 0.1));
    }
    throw ConfigError("unknown model family '" + family + "'");
}

std::uint64_t LevyModel::hash() const {
    return fnv1a(to_json().dump());
}

} // namespace levytrunc
