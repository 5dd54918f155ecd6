#pragma once

#include "levytrunc/levy_model.hpp"
#include "levytrunc/pathsim.hpp"
#include "levytrunc/quadrature.hpp"
#include "levytrunc/rho.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace levytrunc {

/// Evaluation grid: quantiles of rho^2 dnu, an explicit list, or an evenly spaced range, merged
/// with any `include` points.
struct GridSpec {
    enum class Kind { quantile, explicit_values, linspace };
    Kind kind = Kind::quantile;
    std::size_t points = 41;
    double lo = 0.01;
    double hi = 0.99;
    std::vector<double> values;
    std::vector<double> include;

    nlohmann::json to_json() const;
    static GridSpec from_json(const nlohmann::json& j);
};

/// Everything a CLT experiment needs; one top-level seed drives all randomness.
struct ExperimentConfig {
    nlohmann::json model;
    nlohmann::json rho;
    nlohmann::json scheme;
    CoefficientSpec coefficients;
    std::size_t replications = 1000;
    std::size_t limit_replications = 10000;
    GridSpec grid;
    std::vector<double> alphas{1.0, 0.5, 0.25};
    std::uint64_t seed = 1;
    std::string output_dir = "report";
    double zeta = 0.02;
    double tau = 0.05;
    bool allow_nonconforming = false;
    std::optional<double> u_cut;
    SmallJumpMode small_jumps = SmallJumpMode::gaussian;
    bool compensate = false;
    unsigned threads = 0;
    QuadratureConfig quadrature;

    LevyModel build_model() const { return LevyModel::from_json(model); }
    RhoFunction build_rho() const { return RhoFunction::from_json(rho); }
    ObservationScheme build_scheme() const { return ObservationScheme::from_json(scheme); }

    /// Canonical serialization: keys sorted, doubles printed round-trip exact.
    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    /// Hex FNV-1a of the canonical serialization.
    std::string hash() const;
};

} // namespace levytrunc
