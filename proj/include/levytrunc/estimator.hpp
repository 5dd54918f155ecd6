#pragma once

#include "levytrunc/levy_model.hpp"
#include "levytrunc/pathsim.hpp"
#include "levytrunc/quadrature.hpp"
#include "levytrunc/rho.hpp"

#include <functional>
#include <span>
#include <vector>

namespace levytrunc {

/// Right-continuous nondecreasing-in-index step function t -> sum_{x_k <= t} w_k over sorted
/// locations x_k. Evaluation is a binary search.
class StepFunction {
public:
    StepFunction() = default;
    StepFunction(std::vector<double> sorted_locations, std::span<const double> weights);

    double operator()(double t) const;
    double total() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
    std::size_t jumps() const noexcept { return locations_.size(); }

private:
    std::vector<double> locations_;
    std::vector<double> cumulative_;
};

/// Truncated empirical Levy distribution function
///   t -> (1 / (n delta_n)) sum_i rho(Delta_i X) 1{Delta_i X <= t} 1{|Delta_i X| > v_n}.
/// An increment with |x| == v_n is excluded.
class TruncatedLDF {
public:
    static TruncatedLDF estimate(std::span<const double> increments, const ObservationScheme& scheme,
                                 const RhoFunction& rho);

    double operator()(double t) const { return value_(t); }
    double total() const noexcept { return value_.total(); }
    /// Plug-in H(t, t): (1 / (n delta_n)) sum rho^2(x) 1{x <= t} over kept increments.
    double plugin_variance(double t) const { return variance_(t); }

    /// Kept increments, sorted ascending, and rho at each of them.
    std::span<const double> kept() const noexcept { return kept_; }
    std::span<const double> rho_values() const noexcept { return rho_values_; }
    /// t -> (1 / (n delta_n)) sum_{kept x <= t} rho(x) w(x).
    StepFunction reweighted(const std::function<double(double)>& w) const;

    std::size_t n() const noexcept { return n_; }
    double delta_n() const noexcept { return delta_n_; }
    double v_n() const noexcept { return v_n_; }
    double horizon() const noexcept { return static_cast<double>(n_) * delta_n_; }

private:
    std::vector<double> kept_;
    std::vector<double> rho_values_;
    StepFunction value_;
    StepFunction variance_;
    std::size_t n_ = 0;
    double delta_n_ = 0.0;
    double v_n_ = 0.0;
};

TruncatedLDF estimate(const IncrementPath& path, const RhoFunction& rho);

/// G(t) = sqrt(n delta_n) (ldf(t) - N_rho(t)).
double empirical_process(const TruncatedLDF& ldf, const LevyModel& model, const RhoFunction& rho, double t,
                         const QuadratureConfig& cfg = {});

/// Smooth cutoff with 1{x >= 1} <= psi(x) <= 1{x >= 1/2}, built from phi(s) = exp(-1/s) 1{s > 0}
/// as psi(x) = phi(x - 1/2) / (phi(x - 1/2) + phi(1 - x)).
class CutoffPsi {
public:
    explicit CutoffPsi(double alpha);

    static double psi(double x);
    /// psi_alpha(x) = psi(|x| / alpha): weight of the large-jump part.
    double large(double x) const { return psi(std::abs(x) / alpha_); }
    /// 1 - psi_alpha(x): weight of the small-jump part.
    double small(double x) const { return 1.0 - large(x); }
    double alpha() const noexcept { return alpha_; }

private:
    double alpha_;
};

struct Decomposition {
    double g_alpha = 0.0;
    double g_alpha_prime = 0.0;
};

/// Split G(t) into the parts built from rho psi_alpha and rho (1 - psi_alpha), each centered at its
/// own Levy distribution function.
Decomposition decompose(const TruncatedLDF& ldf, const RhoFunction& rho, const CutoffPsi& cutoff,
                        const LevyModel& model, double t, const QuadratureConfig& cfg = {});
Decomposition decompose(const IncrementPath& path, const RhoFunction& rho, const CutoffPsi& cutoff,
                        const LevyModel& model, double t, const QuadratureConfig& cfg = {});

/// N_{rho psi_alpha}(t) and N_{rho (1 - psi_alpha)}(t).
std::pair<double, double> split_n_rho(const LevyModel& model, const RhoFunction& rho, const CutoffPsi& cutoff,
                                      double t, const QuadratureConfig& cfg = {});

struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

/// Pointwise band ldf(t) -/+ z_{(1+level)/2} sqrt(H^(t, t) / (n delta_n)).
Band confidence_band(const TruncatedLDF& ldf, double t, double level);

} // namespace levytrunc
