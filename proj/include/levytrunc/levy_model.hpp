#pragma once

#include "levytrunc/quadrature.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace levytrunc {

enum class SamplerKind { inverse_cdf, rejection, exact_family };
enum class LevyFamily { zero, exp_jump, stable_tempered, variance_gamma, custom };

std::string to_string(SamplerKind kind);
std::string to_string(LevyFamily family);

/// Open interval (lower, upper) with the origin removed. lower < 0 < upper is the union of two
/// half-lines; lower = 0 means jumps are positive only.
struct Support {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    bool contains(double x) const noexcept { return x != 0.0 && x > lower && x < upper; }
    bool has_positive() const noexcept { return upper > 0.0; }
    bool has_negative() const noexcept { return lower < 0.0; }
};

/// Dominating envelope h(x) <= c_side |x|^{-(1+index)} exp(-lambda |x|), used by the rejection
/// sampler and for the near-zero growth check. index >= -1, lambda >= 0.
struct TemperedEnvelope {
    double c_pos = 0.0;
    double c_neg = 0.0;
    double index = 0.0;
    double lambda = 0.0;

    double operator()(double x) const;
};

/// Per-side tail mass nu((v, inf)) or nu((-inf, -v)) as a function of v >= 0.
using SideTail = std::function<double(double)>;
/// Per-side inverse of the tail: given mass m in (0, tail(0)) returns v with tail(v) = m.
using SideInverseTail = std::function<double(double)>;

struct ClosedFormTail {
    SideTail positive;
    SideTail negative;
    std::optional<SideInverseTail> positive_inverse;
    std::optional<SideInverseTail> negative_inverse;
};

/// Levy measure nu(dx) = h(x) dx with the metadata the simulator and the functionals need.
/// Immutable after construction; every factory validates the density.
class LevyModel {
public:
    struct CustomSpec {
        std::string name;
        std::function<double(double)> density;
        Support support;
        double beta = 1.0;
        double tail_exponent = std::numeric_limits<double>::infinity();
        TemperedEnvelope envelope;
        std::optional<ClosedFormTail> closed_form_tail;
        SamplerKind sampler_kind = SamplerKind::rejection;
        bool finite_activity = false;
    };

    /// nu = 0.
    static LevyModel zero();
    /// h(x) = c exp(-lambda x) 1{x > 0}; finite activity with total mass c / lambda.
    static LevyModel exp_jump(double c = 1.0, double lambda = 1.0);
    /// h(x) = c_pm |x|^{-(1+beta)} exp(-lambda |x|).
    static LevyModel stable_tempered(double c_pos, double c_neg, double beta, double lambda);
    /// h(x) = c exp(-lambda |x|) / |x|. `declared_beta` is the blow-up index reported for the
    /// condition algebra; the density satisfies h <= K |x|^{-(1+b)} near 0 for every b > 0.
    static LevyModel variance_gamma(double c, double lambda, double declared_beta = 0.1);
    static LevyModel custom(CustomSpec spec, const QuadratureConfig& cfg = {});

    static LevyModel from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /// FNV-1a over the canonical JSON serialization.
    std::uint64_t hash() const;

    double density(double x) const { return support_.contains(x) ? density_(x) : 0.0; }

    LevyFamily family() const noexcept { return family_; }
    const std::string& name() const noexcept { return name_; }
    const Support& support() const noexcept { return support_; }
    double beta() const noexcept { return beta_; }
    double tail_exponent() const noexcept { return tail_exponent_; }
    const TemperedEnvelope& envelope() const noexcept { return envelope_; }
    const std::optional<ClosedFormTail>& closed_form_tail() const noexcept { return closed_tail_; }
    SamplerKind sampler_kind() const noexcept { return sampler_kind_; }
    bool finite_activity() const noexcept { return finite_activity_; }
    bool is_zero() const noexcept { return family_ == LevyFamily::zero; }

private:
    LevyModel() = default;
    void validate(const QuadratureConfig& cfg) const;

    LevyFamily family_ = LevyFamily::zero;
    std::string name_;
    nlohmann::json params_;
    std::function<double(double)> density_;
    Support support_;
    double beta_ = 0.0;
    double tail_exponent_ = std::numeric_limits<double>::infinity();
    TemperedEnvelope envelope_;
    std::optional<ClosedFormTail> closed_tail_;
    SamplerKind sampler_kind_ = SamplerKind::rejection;
    bool finite_activity_ = false;
};

} // namespace levytrunc
