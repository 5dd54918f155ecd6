#pragma once

#include "levytrunc/experiment_config.hpp"
#include "levytrunc/levy_model.hpp"
#include "levytrunc/quadrature.hpp"
#include "levytrunc/rho.hpp"
#include "levytrunc/rng.hpp"
#include "levytrunc/stats.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace levytrunc {

/// The limit process B(c(t)) on a grid: a Brownian motion run on the time change
/// c(t) = int rho^2 1{x <= t} dnu.
class LimitSampler {
public:
    LimitSampler(std::vector<double> grid, std::vector<double> time_change, double total_mass,
                 double abs_tol = QuadratureConfig{}.abs_tol);
    static LimitSampler from_model(const LevyModel& model, const RhoFunction& rho, std::vector<double> grid,
                                   const QuadratureConfig& cfg = {});

    const std::vector<double>& grid() const noexcept { return grid_; }
    const std::vector<double>& time_change() const noexcept { return c_; }
    double total_mass() const noexcept { return total_; }

    std::vector<double> sample(Engine& engine) const;

private:
    std::vector<double> grid_;
    std::vector<double> c_;
    double total_ = 0.0;
};

/// Path of the limit process with stream (seed, replication).
std::vector<double> sample_limit_path(const LimitSampler& sampler, std::uint64_t seed, std::uint64_t replication = 0);

/// Grid of `points` t values at the quantiles lo..hi of the finite measure rho^2 dnu.
std::vector<double> quantile_grid(const LevyModel& model, const RhoFunction& rho, std::size_t points, double lo,
                                  double hi, const QuadratureConfig& cfg = {});
std::vector<double> build_grid(const GridSpec& spec, const LevyModel& model, const RhoFunction& rho,
                               const QuadratureConfig& cfg = {});

struct MarginalStat {
    double t = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double h = 0.0;
    TestResult normality;
};

struct SmallJumpStat {
    double alpha = 0.0;
    std::vector<double> sups;
    QuantileEstimate q95;
};

struct CltReport {
    nlohmann::json config;
    std::string config_hash;
    double effective_y = 0.0;
    bool conforming = false;
    std::vector<std::string> warnings;
    bool degenerate = false;
    bool partial = false;
    std::size_t completed = 0;

    std::vector<double> grid;
    std::vector<MarginalStat> marginals;
    /// Row-major grid.size() x grid.size().
    std::vector<double> cov_empirical;
    std::vector<double> cov_theory;
    std::vector<double> cov_se;

    std::vector<double> sup_finite;
    std::vector<double> sup_limit;
    TestResult sup_ks;
    std::vector<SmallJumpStat> small_jumps;

    /// G(t_j) per completed replication, row-major completed x grid.size().
    std::vector<double> g_values;

    std::size_t index_of(double t) const;
    nlohmann::json to_json() const;
    /// Writes report.json, marginals.csv, covariance.csv and sup_stats.csv into `dir`.
    void write(const std::string& dir) const;
};

/// Simulates the configured replications, evaluates G on the grid and compares with the limit:
/// marginal normality against N(0, H(t, t)), covariances against H(u, v), KS between finite-n and
/// limit sup statistics, and 95th percentiles of sup |G'^(alpha)|. Setting `cancel` stops the
/// remaining replications and marks the report partial.
CltReport run_clt_experiment(const ExperimentConfig& config, const std::atomic<bool>* cancel = nullptr);

enum class BiasMethod { exact_one_jump, monte_carlo };

struct BiasRow {
    double delta = 0.0;
    double v_n = 0.0;
    double error = 0.0;
    /// error / delta^(1/8).
    double ratio = 0.0;
    double argsup = 0.0;
    /// Monte Carlo standard error at the argsup (0 for the exact method).
    double standard_error = 0.0;
};

struct BiasStudyConfig {
    double gamma = 1.0;
    std::vector<double> deltas;
    BiasMethod method = BiasMethod::exact_one_jump;
    std::size_t mc_samples = 1000000;
    std::uint64_t seed = 1;
    /// Extra evaluation points; +/-inf, +/-v_n and a default grid are always included.
    std::vector<double> t_grid;
    QuadratureConfig quadrature;
};

/// Delta = 2^-k for k = kmin..kmax.
std::vector<double> dyadic_ladder(int kmin, int kmax);

/// For each delta: sup_t |delta^-1 E[f(L_delta) 1{L_delta <= t}] - N_f(t)| over the evaluation grid,
/// with L the compound Poisson process of jumps |x| > gamma delta^(1/8). The exact method keeps the
/// one-jump term e^{-delta nu(F)} int_F f 1{x <= t} dnu and needs a finite-activity model.
std::vector<BiasRow> bias_study(const LevyModel& model, const std::function<double(double)>& f,
                                const BiasStudyConfig& config);

} // namespace levytrunc
