#pragma once

#include <json.hpp>

#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace levytrunc {

enum class RhoKind { exp_bump, poly_p, custom };

/// Weight function rho of the Levy distribution function N_rho(t) = int rho(x) 1{x <= t} nu(dx).
///
/// Built-in kinds are validated at construction: rho(0) = 0, 0 <= rho <= K, rho > 0 away from the
/// origin and |rho'(x)| <= K |x|^(p-1) on a log-spaced grid over [1e-8, 1e3] (both signs).
class RhoFunction {
public:
    using Fn = std::function<double(double)>;

    /// rho(x) = |x|^p / (1 + |x|^p).
    static RhoFunction poly(double p);
    /// rho(x) = exp(-1/|x|), rho(0) = 0. Any growth order p > 2 is admissible.
    static RhoFunction exp_bump(double p = 4.0);
    /// User-supplied weight. `validate = false` is meant for test fixtures such as rho(x) = x^2.
    static RhoFunction custom(std::string name, Fn rho, Fn drho, double p, double bound, bool validate = true);

    /// Parses "poly:p=5", "poly_p:p=5", "exp_bump" or "exp_bump:p=6".
    static RhoFunction parse(std::string_view spec);
    static RhoFunction from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    double operator()(double x) const { return rho_(x); }
    double derivative(double x) const { return drho_(x); }

    double p() const noexcept { return p_; }
    double bound() const noexcept { return bound_; }
    RhoKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    /// rho^2 as a (non-validated) custom weight, used for time changes and plug-in variances.
    RhoFunction squared() const;
    /// rho(x) * w(x) as a (non-validated) custom weight.
    RhoFunction weighted(std::string name, Fn w) const;

private:
    RhoFunction(RhoKind kind, std::string name, Fn rho, Fn drho, double p, double bound);
    void validate() const;

    RhoKind kind_;
    std::string name_;
    Fn rho_;
    Fn drho_;
    double p_;
    double bound_;
};

} // namespace levytrunc
