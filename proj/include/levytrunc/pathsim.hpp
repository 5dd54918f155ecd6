#pragma once

#include "levytrunc/levy_model.hpp"
#include "levytrunc/quadrature.hpp"
#include "levytrunc/rng.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace levytrunc {

/// Deterministic coefficient t -> value: either a constant or level + amplitude sin(2 pi t / period)
/// clamped to [-clamp, clamp].
struct TimeFunction {
    enum class Kind { constant, sinusoid };
    Kind kind = Kind::constant;
    double level = 0.0;
    double amplitude = 0.0;
    double period = 1.0;
    double clamp = std::numeric_limits<double>::infinity();

    static TimeFunction constant(double value) { return {Kind::constant, value, 0.0, 1.0}; }
    double operator()(double t) const;

    nlohmann::json to_json() const;
    static TimeFunction from_json(const nlohmann::json& j);
};

struct CoefficientSpec {
    TimeFunction drift;
    TimeFunction vol;
    /// Sup bound A on |b| and |sigma|, checked on the simulation grid.
    double bound = 1.0;

    static CoefficientSpec constant(double drift, double vol, double bound = 1.0);

    nlohmann::json to_json() const;
    static CoefficientSpec from_json(const nlohmann::json& j);
};

/// Regular sampling grid i * delta_n, i = 0..n, with truncation level v_n = gamma * delta_n^(1/8).
class ObservationScheme {
public:
    ObservationScheme() = default;

    static ObservationScheme from_delta(std::size_t n, double delta_n, double gamma);
    /// delta_n = n^{-y}.
    static ObservationScheme from_rate(std::size_t n, double y, double gamma);
    /// Accepts {"n", "gamma"} plus either "delta" or "y".
    static ObservationScheme from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    std::size_t n() const noexcept { return n_; }
    double delta_n() const noexcept { return delta_n_; }
    double gamma() const noexcept { return gamma_; }
    double v_n() const noexcept { return v_n_; }
    const std::optional<double>& y() const noexcept { return y_; }
    /// y implied by delta_n = n^{-y}, whether or not the scheme was specified by y.
    double effective_y() const;
    double horizon() const noexcept { return static_cast<double>(n_) * delta_n_; }

    /// Same grid with a different truncation level; v_n = +inf disables every jump.
    ObservationScheme with_truncation(double v_n) const;

private:
    ObservationScheme(std::size_t n, double delta_n, double gamma, std::optional<double> y);

    std::size_t n_ = 0;
    double delta_n_ = 0.0;
    double gamma_ = 0.0;
    double v_n_ = 0.0;
    std::optional<double> y_;
};

enum class SmallJumpMode { gaussian, off };

struct SimulationOptions {
    /// Jumps with |x| > u_cut are simulated exactly. Default: 0 for finite-activity models,
    /// min(v_n / 10, 1e-3) otherwise.
    std::optional<double> u_cut;
    SmallJumpMode small_jumps = SmallJumpMode::gaussian;
    /// Subtract the compensator of jumps in (u_cut, 1] from the drift, as in the canonical
    /// decomposition with truncation at 1. Off by default: b then absorbs that deterministic term.
    bool compensate = false;
    std::uint64_t replication = 0;
    QuadratureConfig quadrature;
};

/// Increments Delta_i X together with every simulated jump |x| > u_cut, stored per interval.
struct IncrementPath {
    std::vector<double> increments;
    /// jump_offsets[i] .. jump_offsets[i+1] index the jumps that fell into interval i.
    std::vector<std::size_t> jump_offsets;
    std::vector<double> jump_times;
    std::vector<double> jump_sizes;
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    ObservationScheme scheme;
    double u_cut = 0.0;
    SmallJumpMode small_jumps = SmallJumpMode::gaussian;
    /// Variance per unit time of the Gaussian replacing jumps |x| <= u_cut.
    double small_jump_variance_rate = 0.0;
    /// int_{|x| <= u_cut} x^2 nu / int x^2 nu.
    double discarded_moment_ratio = 0.0;

    std::size_t size() const noexcept { return increments.size(); }
    std::size_t n_large_jumps(std::size_t i) const { return jump_offsets[i + 1] - jump_offsets[i]; }
    std::span<const double> jump_sizes_in(std::size_t i) const;
    std::span<const double> jump_times_in(std::size_t i) const;
};

/// Sampler for the normalized restriction of nu to {lo < |x| <= hi}.
class JumpSampler {
public:
    JumpSampler(const LevyModel& model, double lo, double hi = std::numeric_limits<double>::infinity(),
                const QuadratureConfig& cfg = {});

    double mass() const noexcept { return mass_pos_ + mass_neg_; }
    double operator()(Engine& engine) const;

private:
    struct Side {
        double c = 0.0;
        double tail_lo = 0.0;
        double tail_hi = 0.0;
        // Envelope pieces: power law on (lo, split), exponential on (split, hi).
        double split = 0.0;
        double mass_power = 0.0;
        double mass_exp = 0.0;
    };

    double sample_side(Engine& engine, bool positive) const;
    double sample_inverse(Engine& engine, bool positive) const;
    double sample_rejection(Engine& engine, bool positive) const;
    Side make_side(double c, bool positive) const;

    const LevyModel* model_;
    double lo_;
    double hi_;
    double mass_pos_ = 0.0;
    double mass_neg_ = 0.0;
    Side pos_;
    Side neg_;
};

/// Draws one jump from the normalized restriction of nu to {lo < |x| <= hi}.
double sample_jump_size(const LevyModel& model, double lo, double hi, Engine& engine);

IncrementPath simulate_increments(const LevyModel& model, const CoefficientSpec& coeffs,
                                  const ObservationScheme& scheme, std::uint64_t seed,
                                  const SimulationOptions& options = {});

/// Increments of L^(n) = (x 1{|x| > v_n}) * mu: Poisson(delta_n nu(|x| > v_n)) jumps per interval.
IncrementPath simulate_truncated_levy(const LevyModel& model, const ObservationScheme& scheme, std::uint64_t seed,
                                      std::uint64_t replication = 0);

/// CSV with header "index,increment,n_large_jumps".
void write_path_csv(const IncrementPath& path, std::ostream& os);
nlohmann::json path_metadata(const IncrementPath& path, const LevyModel& model);

} // namespace levytrunc
