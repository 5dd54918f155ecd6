#include "levytrunc/rho.hpp"

#include "levytrunc/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

namespace levytrunc {

RhoFunction::RhoFunction(RhoKind kind, std::string name, Fn rho, Fn drho, double p, double bound)
    : kind_(kind), name_(std::move(name)), rho_(std::move(rho)), drho_(std::move(drho)), p_(p), bound_(bound) {}

RhoFunction RhoFunction::poly(double p) {
    if (!(p >= 2.0) || !std::isfinite(p)) {
        throw ConfigError("poly rho requires finite p >= 2");
    }
    auto rho = [p](double x) {
        const double a = std::pow(std::abs(x), p);
        if (std::isinf(a)) {
            return 1.0;
        }
        return a / (1.0 + a);
    };
    auto drho = [p](double x) {
        const double ax = std::abs(x);
        if (ax == 0.0) {
            return 0.0;
        }
        const double a = std::pow(ax, p);
        if (std::isinf(a)) {
            return 0.0;
        }
        const double d = p * std::pow(ax, p - 1.0) / ((1.0 + a) * (1.0 + a));
        return x < 0.0 ? -d : d;
    };
    RhoFunction r(RhoKind::poly_p, "poly:p=" + nlohmann::json(p).dump(), rho, drho, p, std::max(1.0, p));
    r.validate();
    return r;
}

RhoFunction RhoFunction::exp_bump(double p) {
    if (!(p > 2.0) || !std::isfinite(p)) {
        throw ConfigError("exp_bump rho requires finite p > 2");
    }
    auto rho = [](double x) { return x == 0.0 ? 0.0 : std::exp(-1.0 / std::abs(x)); };
    auto drho = [](double x) {
        if (x == 0.0) {
            return 0.0;
        }
        const double d = std::exp(-1.0 / std::abs(x)) / (x * x);
        return x < 0.0 ? -d : d;
    };
    // sup_x e^{-1/x} x^{-(p+1)} is attained at x = 1/(p+1).
    const double log_k = (p + 1.0) * std::log(p + 1.0) - (p + 1.0);
    if (log_k > std::log(std::numeric_limits<double>::max())) {
        throw ConfigError("exp_bump derivative bound overflows for p = " + std::to_string(p));
    }
    RhoFunction r(RhoKind::exp_bump, "exp_bump:p=" + nlohmann::json(p).dump(), rho, drho, p,
                  std::max(1.0, std::exp(log_k)));
    r.validate();
    return r;
}

RhoFunction RhoFunction::custom(std::string name, Fn rho, Fn drho, double p, double bound, bool validate) {
    RhoFunction r(RhoKind::custom, std::move(name), std::move(rho), std::move(drho), p, bound);
    if (validate) {
        r.validate();
    }
    return r;
}

void RhoFunction::validate() const {
    if (!(bound_ > 0.0)) {
        throw ConfigError("rho bound K must be > 0");
    }
    if (rho_(0.0) != 0.0) {
        throw ConfigError("rho(0) must be 0 for " + name_);
    }
    const double log_k = std::log(bound_) + 1e-9;
    constexpr int kPoints = 400;
    for (int i = 0; i <= kPoints; ++i) {
        const double mag = std::pow(10.0, -8.0 + 11.0 * i / kPoints);
        for (double x : {mag, -mag}) {
            const double v = rho_(x);
            if (!(v >= 0.0) || v > bound_ * (1.0 + 1e-12)) {
                throw ConfigError(name_ + ": rho(x) outside [0, K] at x = " + std::to_string(x));
            }
            // Positivity is only observable where rho does not underflow.
            if (mag >= 1e-2 && !(v > 0.0)) {
                throw ConfigError(name_ + ": rho(x) must be > 0 for x != 0 (x = " + std::to_string(x) + ")");
            }
            const double d = std::abs(drho_(x));
            if (d != 0.0 && std::log(d) - (p_ - 1.0) * std::log(mag) > log_k) {
                throw ConfigError(name_ + ": |rho'(x)| exceeds K |x|^(p-1) at x = " + std::to_string(x));
            }
        }
    }
}

RhoFunction RhoFunction::squared() const {
    auto rho = rho_;
    auto drho = drho_;
    return RhoFunction(RhoKind::custom, name_ + "^2", [rho](double x) {
        const double v = rho(x);
        return v * v;
    }, [rho, drho](double x) { return 2.0 * rho(x) * drho(x); }, p_, bound_ * bound_);
}

RhoFunction RhoFunction::weighted(std::string name, Fn w) const {
    auto rho = rho_;
    return RhoFunction(RhoKind::custom, std::move(name), [rho, w](double x) {
        const double v = rho(x);
        return v == 0.0 ? 0.0 : v * w(x);
    }, [](double) { return std::numeric_limits<double>::quiet_NaN(); }, p_, bound_);
}

namespace {

double parse_number(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("invalid number '" + std::string(s) + "' in rho spec");
    }
    return v;
}

} // namespace

RhoFunction RhoFunction::parse(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view kind = spec.substr(0, colon);
    std::optional<double> p;
    if (colon != std::string_view::npos) {
        std::string_view rest = spec.substr(colon + 1);
        if (rest.substr(0, 2) != "p=") {
            throw ConfigError("rho spec parameters must be of the form p=<value>: " + std::string(spec));
        }
        p = parse_number(rest.substr(2));
    }
    if (kind == "poly" || kind == "poly_p") {
        if (!p) {
            throw ConfigError("poly rho requires p, e.g. poly:p=5");
        }
        return poly(*p);
    }
    if (kind == "exp_bump") {
        return exp_bump(p.value_or(4.0));
    }
    throw ConfigError("unknown rho kind '" + std::string(kind) + "'");
}

nlohmann::json RhoFunction::to_json() const {
    switch (kind_) {
    case RhoKind::poly_p:
        return {{"kind", "poly_p"}, {"p", p_}};
    case RhoKind::exp_bump:
        return {{"kind", "exp_bump"}, {"p", p_}};
    case RhoKind::custom:
        break;
    }
    throw ConfigError("custom rho '" + name_ + "' cannot be serialized");
}

RhoFunction RhoFunction::from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        return parse(j.get<std::string>());
    }
    const auto kind = j.at("kind").get<std::string>();
    auto number = [&j](const char* key, double fallback) {
        if (!j.contains(key)) {
            return fallback;
        }
        const auto& v = j.at(key);
        return v.is_string() ? parse_number(v.get<std::string>()) : v.get<double>();
    };
    if (kind == "poly_p" || kind == "poly") {
        if (!j.contains("p")) {
            throw ConfigError("poly rho requires p");
        }
        return poly(number("p", 0.0));
    }
    if (kind == "exp_bump") {
        return exp_bump(number("p", 4.0));
    }
    throw ConfigError("unknown rho kind '" + kind + "'");
}

} // namespace levytrunc
