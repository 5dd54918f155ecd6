#include "levytrunc/limitlaw.hpp"

#include "levytrunc/conditions.hpp"
#include "levytrunc/errors.hpp"
#include "levytrunc/estimator.hpp"
#include "levytrunc/levy_functionals.hpp"
#include "levytrunc/parallel.hpp"
#include "levytrunc/pathsim.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace levytrunc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::json finite_or_null(double x) {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

} // namespace

LimitSampler::LimitSampler(std::vector<double> grid, std::vector<double> time_change, double total_mass,
                           double abs_tol)
    : grid_(std::move(grid)), c_(std::move(time_change)), total_(total_mass) {
    if (grid_.size() != c_.size() || grid_.empty()) {
        throw ConfigError("limit sampler needs one time-change value per grid point");
    }
    if (!std::is_sorted(grid_.begin(), grid_.end())) {
        throw ConfigError("limit sampler grid must be sorted");
    }
    if (c_.front() < -abs_tol) {
        throw NumericalError("negative time change at the first grid point");
    }
    for (std::size_t j = 1; j < c_.size(); ++j) {
        if (c_[j] - c_[j - 1] < -abs_tol) {
            throw NumericalError("time change decreases between grid points " + std::to_string(j - 1) + " and " +
                                 std::to_string(j));
        }
    }
    if (c_.back() > total_ + abs_tol) {
        throw NumericalError("time change exceeds the total mass c_rho");
    }
}

LimitSampler LimitSampler::from_model(const LevyModel& model, const RhoFunction& rho, std::vector<double> grid,
                                      const QuadratureConfig& cfg) {
    std::sort(grid.begin(), grid.end());
    std::vector<double> c(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        c[j] = levytrunc::time_change(model, rho, grid[j], cfg);
    }
    return LimitSampler(std::move(grid), std::move(c), levytrunc::time_change(model, rho, kInf, cfg), cfg.abs_tol);
}

std::vector<double> LimitSampler::sample(Engine& engine) const {
    boost::random::normal_distribution<double> normal;
    std::vector<double> path(c_.size());
    double level = 0.0;
    double previous = 0.0;
    for (std::size_t j = 0; j < c_.size(); ++j) {
        const double var = std::max(0.0, c_[j] - previous);
        level += std::sqrt(var) * normal(engine);
        path[j] = level;
        previous = std::max(previous, c_[j]);
    }
    return path;
}

std::vector<double> sample_limit_path(const LimitSampler& sampler, std::uint64_t seed, std::uint64_t replication) {
    Engine engine = make_engine(seed, replication, Substream::limit);
    return sampler.sample(engine);
}

std::vector<double> quantile_grid(const LevyModel& model, const RhoFunction& rho, std::size_t points, double lo,
                                  double hi, const QuadratureConfig& cfg) {
    if (points < 2) {
        throw ConfigError("quantile grid needs at least 2 points");
    }
    const double total = time_change(model, rho, kInf, cfg);
    std::vector<double> grid(points);
    if (!(total > 0.0)) {
        for (std::size_t k = 0; k < points; ++k) {
            grid[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(points - 1);
        }
        return grid;
    }
    const Support& s = model.support();
    for (std::size_t k = 0; k < points; ++k) {
        const double q = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
        const double target = q * total;
        double a = std::max(s.lower, -1.0);
        double b = std::min(s.upper, 1.0);
        while (time_change(model, rho, a, cfg) > target) {
            a *= 2.0;
        }
        while (time_change(model, rho, b, cfg) < target) {
            b = b <= 0.0 ? 1.0 : 2.0 * b;
        }
        for (int it = 0; it < 60 && b - a > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
            const double mid = 0.5 * (a + b);
            if (time_change(model, rho, mid, cfg) < target) {
                a = mid;
            } else {
                b = mid;
            }
        }
        grid[k] = 0.5 * (a + b);
    }
    return grid;
}

std::vector<double> build_grid(const GridSpec& spec, const LevyModel& model, const RhoFunction& rho,
                               const QuadratureConfig& cfg) {
    std::vector<double> grid;
    switch (spec.kind) {
    case GridSpec::Kind::quantile:
        grid = quantile_grid(model, rho, spec.points, spec.lo, spec.hi, cfg);
        break;
    case GridSpec::Kind::explicit_values:
        grid = spec.values;
        break;
    case GridSpec::Kind::linspace:
        for (std::size_t k = 0; k < spec.points; ++k) {
            grid.push_back(spec.lo + (spec.hi - spec.lo) * static_cast<double>(k) / static_cast<double>(spec.points - 1));
        }
        break;
    }
    grid.insert(grid.end(), spec.include.begin(), spec.include.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

std::size_t CltReport::index_of(double t) const {
    const auto it = std::find(grid.begin(), grid.end(), t);
    if (it == grid.end()) {
        throw ConfigError("t = " + std::to_string(t) + " is not on the report grid");
    }
    return static_cast<std::size_t>(it - grid.begin());
}

CltReport run_clt_experiment(const ExperimentConfig& config, const std::atomic<bool>* cancel) {
    const LevyModel model = config.build_model();
    const RhoFunction rho = config.build_rho();
    const ObservationScheme scheme = config.build_scheme();
    const QuadratureConfig& qcfg = config.quadrature;

    CltReport report;
    report.config = config.to_json();
    report.config_hash = config.hash();

    const PrimaryConstants pc = derive_primary(model.beta(), config.zeta, config.tau);
    report.effective_y = scheme.effective_y();
    const SchemeCheckReport check = check_scheme(pc, report.effective_y);
    report.conforming = check.passed;
    if (!report.conforming) {
        if (!config.allow_nonconforming) {
            throw ConfigError("scheme with y = " + std::to_string(report.effective_y) +
                              " is outside the window (" + std::to_string(pc.t1) + ", " + std::to_string(pc.t2) +
                              "); set allow_nonconforming to run it anyway");
        }
        report.warnings.push_back("NON-CONFORMING SCHEME: delta_n = n^-y with y = " +
                                  std::to_string(report.effective_y) + " violates " +
                                  std::to_string(check.violated.size()) + " sampling condition(s); window is (" +
                                  std::to_string(pc.t1) + ", " + std::to_string(pc.t2) + ")");
    }

    report.grid = build_grid(config.grid, model, rho, qcfg);
    const auto& grid = report.grid;
    const std::size_t nj = grid.size();
    std::vector<double> n_values(nj);
    std::vector<double> c_values(nj);
    for (std::size_t j = 0; j < nj; ++j) {
        n_values[j] = n_rho(model, rho, grid[j], qcfg);
        c_values[j] = time_change(model, rho, grid[j], qcfg);
    }
    const double c_total = time_change(model, rho, kInf, qcfg);

    std::vector<CutoffPsi> cutoffs;
    std::vector<std::vector<double>> n_small(config.alphas.size(), std::vector<double>(nj));
    for (std::size_t a = 0; a < config.alphas.size(); ++a) {
        cutoffs.emplace_back(config.alphas[a]);
        for (std::size_t j = 0; j < nj; ++j) {
            n_small[a][j] = split_n_rho(model, rho, cutoffs[a], grid[j], qcfg).second;
        }
    }

    const std::size_t m = config.replications;
    std::vector<double> g(m * nj, 0.0);
    std::vector<double> sup_g(m, 0.0);
    std::vector<std::vector<double>> sup_small(cutoffs.size(), std::vector<double>(m, 0.0));
    std::vector<char> done(m, 0);

    SimulationOptions options;
    options.u_cut = config.u_cut;
    options.small_jumps = config.small_jumps;
    options.compensate = config.compensate;
    options.quadrature = qcfg;

    parallel_for(m, [&](std::size_t r) {
        if (cancel != nullptr && cancel->load()) {
            return;
        }
        SimulationOptions opt = options;
        opt.replication = r;
        const IncrementPath path = simulate_increments(model, config.coefficients, scheme, config.seed, opt);
        const TruncatedLDF ldf = estimate(path, rho);
        const double scale = std::sqrt(ldf.horizon());
        double sup = 0.0;
        for (std::size_t j = 0; j < nj; ++j) {
            const double value = scale * (ldf(grid[j]) - n_values[j]);
            g[r * nj + j] = value;
            sup = std::max(sup, std::abs(value));
        }
        sup_g[r] = sup;
        for (std::size_t a = 0; a < cutoffs.size(); ++a) {
            const CutoffPsi& cut = cutoffs[a];
            const StepFunction small = ldf.reweighted([&cut](double x) { return cut.small(x); });
            double s = 0.0;
            for (std::size_t j = 0; j < nj; ++j) {
                s = std::max(s, std::abs(scale * (small(grid[j]) - n_small[a][j])));
            }
            sup_small[a][r] = s;
        }
        done[r] = 1;
    }, config.threads);

    std::vector<std::size_t> completed;
    for (std::size_t r = 0; r < m; ++r) {
        if (done[r]) {
            completed.push_back(r);
        }
    }
    report.completed = completed.size();
    report.partial = completed.size() < m;
    const std::size_t mc = completed.size();
    if (mc < 2) {
        throw NumericalError("fewer than two replications completed");
    }

    report.g_values.resize(mc * nj);
    for (std::size_t k = 0; k < mc; ++k) {
        std::copy_n(g.begin() + static_cast<std::ptrdiff_t>(completed[k] * nj), nj,
                    report.g_values.begin() + static_cast<std::ptrdiff_t>(k * nj));
        report.sup_finite.push_back(sup_g[completed[k]]);
    }
    report.degenerate = !(c_total > 0.0) &&
                        std::all_of(report.g_values.begin(), report.g_values.end(), [](double v) { return v == 0.0; });

    std::vector<double> means(nj);
    std::vector<double> column(mc);
    const boost::math::normal_distribution<double> std_normal;
    for (std::size_t j = 0; j < nj; ++j) {
        for (std::size_t k = 0; k < mc; ++k) {
            column[k] = report.g_values[k * nj + j];
        }
        MarginalStat ms;
        ms.t = grid[j];
        ms.mean = mean(column);
        ms.variance = variance(column);
        ms.h = c_values[j];
        if (ms.h > 0.0) {
            const double sd = std::sqrt(ms.h);
            ms.normality = ks_one_sample(column, [&](double x) { return boost::math::cdf(std_normal, x / sd); });
        } else {
            ms.normality = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
        }
        means[j] = ms.mean;
        report.marginals.push_back(ms);
    }

    report.cov_empirical.assign(nj * nj, 0.0);
    report.cov_theory.assign(nj * nj, 0.0);
    report.cov_se.assign(nj * nj, 0.0);
    std::vector<double> products(mc);
    for (std::size_t u = 0; u < nj; ++u) {
        for (std::size_t v = u; v < nj; ++v) {
            for (std::size_t k = 0; k < mc; ++k) {
                products[k] = (report.g_values[k * nj + u] - means[u]) * (report.g_values[k * nj + v] - means[v]);
            }
            const double cov = mean(products) * static_cast<double>(mc) / static_cast<double>(mc - 1);
            const double se = std::sqrt(variance(products) / static_cast<double>(mc));
            const double theory = c_values[std::min(u, v)];
            for (auto [a, b] : {std::pair{u, v}, std::pair{v, u}}) {
                report.cov_empirical[a * nj + b] = cov;
                report.cov_theory[a * nj + b] = theory;
                report.cov_se[a * nj + b] = se;
            }
        }
    }

    const LimitSampler sampler(grid, c_values, c_total, qcfg.abs_tol);
    report.sup_limit.assign(config.limit_replications, 0.0);
    parallel_for(config.limit_replications, [&](std::size_t r) {
        const auto path = sample_limit_path(sampler, config.seed, r);
        double sup = 0.0;
        for (double v : path) {
            sup = std::max(sup, std::abs(v));
        }
        report.sup_limit[r] = sup;
    }, config.threads);
    if (report.degenerate || config.limit_replications == 0) {
        report.sup_ks = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    } else {
        report.sup_ks = ks_two_sample(report.sup_finite, report.sup_limit);
    }

    for (std::size_t a = 0; a < cutoffs.size(); ++a) {
        SmallJumpStat s;
        s.alpha = config.alphas[a];
        for (std::size_t k : completed) {
            s.sups.push_back(sup_small[a][k]);
        }
        s.q95 = sample_quantile(s.sups, 0.95);
        report.small_jumps.push_back(std::move(s));
    }
    return report;
}

nlohmann::json CltReport::to_json() const {
    nlohmann::json marg = nlohmann::json::array();
    for (const auto& m : marginals) {
        marg.push_back({{"t", m.t},
                        {"mean", m.mean},
                        {"variance", m.variance},
                        {"h", m.h},
                        {"variance_ratio", finite_or_null(m.variance / m.h)},
                        {"normality_statistic", finite_or_null(m.normality.statistic)},
                        {"normality_p_value", finite_or_null(m.normality.p_value)}});
    }
    nlohmann::json small = nlohmann::json::array();
    for (const auto& s : small_jumps) {
        small.push_back({{"alpha", s.alpha}, {"q95", s.q95.value}, {"q95_se", s.q95.standard_error}});
    }
    double worst_z = 0.0;
    for (std::size_t k = 0; k < cov_empirical.size(); ++k) {
        if (cov_se[k] > 0.0) {
            worst_z = std::max(worst_z, std::abs(cov_empirical[k] - cov_theory[k]) / cov_se[k]);
        }
    }
    return {{"config", config},
            {"config_hash", config_hash},
            {"effective_y", effective_y},
            {"conforming", conforming},
            {"warnings", warnings},
            {"degenerate", degenerate},
            {"partial", partial},
            {"completed_replications", completed},
            {"grid", grid},
            {"marginals", marg},
            {"covariance_max_abs_z", worst_z},
            {"sup_statistic_ks", {{"statistic", finite_or_null(sup_ks.statistic)},
                                  {"p_value", finite_or_null(sup_ks.p_value)},
                                  {"finite_n_samples", sup_finite.size()},
                                  {"limit_samples", sup_limit.size()}}},
            {"small_jump_sup_q95", small}};
}

void CltReport::write(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream os(fs::path(dir) / "report.json");
        os << to_json().dump(2) << '\n';
    }
    {
        std::ofstream os(fs::path(dir) / "marginals.csv");
        os << "t,mean,variance,h,variance_ratio,normality_statistic,normality_p_value\n";
        for (const auto& m : marginals) {
            os << fmt17(m.t) << ',' << fmt17(m.mean) << ',' << fmt17(m.variance) << ',' << fmt17(m.h) << ','
               << fmt17(m.variance / m.h) << ',' << fmt17(m.normality.statistic) << ',' << fmt17(m.normality.p_value)
               << '\n';
        }
    }
    {
        std::ofstream os(fs::path(dir) / "covariance.csv");
        os << "u,v,empirical,theory,standard_error\n";
        const std::size_t nj = grid.size();
        for (std::size_t a = 0; a < nj; ++a) {
            for (std::size_t b = 0; b < nj; ++b) {
                os << fmt17(grid[a]) << ',' << fmt17(grid[b]) << ',' << fmt17(cov_empirical[a * nj + b]) << ','
                   << fmt17(cov_theory[a * nj + b]) << ',' << fmt17(cov_se[a * nj + b]) << '\n';
            }
        }
    }
    {
        std::ofstream os(fs::path(dir) / "sup_stats.csv");
        os << "source,alpha,replication,value\n";
        for (std::size_t k = 0; k < sup_finite.size(); ++k) {
            os << "finite_n,," << k << ',' << fmt17(sup_finite[k]) << '\n';
        }
        for (std::size_t k = 0; k < sup_limit.size(); ++k) {
            os << "limit,," << k << ',' << fmt17(sup_limit[k]) << '\n';
        }
        for (const auto& s : small_jumps) {
            for (std::size_t k = 0; k < s.sups.size(); ++k) {
                os << "small_jump," << fmt17(s.alpha) << ',' << k << ',' << fmt17(s.sups[k]) << '\n';
            }
        }
    }
}

std::vector<double> dyadic_ladder(int kmin, int kmax) {
    if (kmin > kmax) {
        throw ConfigError("dyadic ladder needs kmin <= kmax");
    }
    std::vector<double> deltas;
    for (int k = kmin; k <= kmax; ++k) {
        deltas.push_back(std::ldexp(1.0, -k));
    }
    return deltas;
}

std::vector<BiasRow> bias_study(const LevyModel& model, const std::function<double(double)>& f,
                                const BiasStudyConfig& config) {
    if (!(config.gamma > 0.0)) {
        throw ConfigError("bias study needs gamma > 0");
    }
    if (config.method == BiasMethod::exact_one_jump && !model.finite_activity()) {
        throw ConfigError("exact one-jump conditioning needs a finite-activity model");
    }
    if (config.method == BiasMethod::monte_carlo && config.mc_samples < 2) {
        throw ConfigError("Monte Carlo bias study needs at least 2 samples");
    }
    const QuadratureConfig& cfg = config.quadrature;
    std::vector<double> base = config.t_grid;
    if (base.empty()) {
        for (int k = 0; k <= 400; ++k) {
            base.push_back(-10.0 + 0.05 * k);
        }
    }

    std::vector<BiasRow> rows;
    for (std::size_t d = 0; d < config.deltas.size(); ++d) {
        const double delta = config.deltas[d];
        if (!(delta > 0.0)) {
            throw ConfigError("bias study deltas must be > 0");
        }
        BiasRow row;
        row.delta = delta;
        row.v_n = config.gamma * std::pow(delta, kTruncationExponent);
        const double v = row.v_n;
        std::vector<double> ts = base;
        ts.insert(ts.end(), {-kInf, kInf, -v, v});
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        const double mass = nu_tail_mass(model, v, cfg);
        const double breaks[] = {v};
        auto f_large = [&](double x) { return std::abs(x) > v ? f(x) : 0.0; };

        if (config.method == BiasMethod::exact_one_jump) {
            const double survive = std::exp(-delta * mass);
            for (double t : ts) {
                const double target = integrate_measure(model, f, -kInf, t, cfg, breaks).value;
                const double one_jump = mass > 0.0 ? survive * integrate_measure(model, f_large, -kInf, t, cfg, breaks).value : 0.0;
                const double err = std::abs(one_jump - target);
                if (err > row.error || (row.error == 0.0 && t == ts.front())) {
                    row.error = err;
                    row.argsup = t;
                }
            }
        } else {
            const std::size_t k_samples = config.mc_samples;
            std::vector<std::pair<double, double>> draws(k_samples);
            Engine engine = make_engine(config.seed, d, Substream::bias);
            std::optional<JumpSampler> sampler;
            if (mass > 0.0) {
                sampler.emplace(model, v, kInf, cfg);
            }
            boost::random::poisson_distribution<int, double> count(mass > 0.0 ? delta * mass : 1.0);
            for (auto& draw : draws) {
                double level = 0.0;
                if (sampler) {
                    const int jumps = count(engine);
                    for (int i = 0; i < jumps; ++i) {
                        level += (*sampler)(engine);
                    }
                }
                draw = {level, f(level)};
            }
            std::sort(draws.begin(), draws.end());
            std::size_t idx = 0;
            double sum = 0.0;
            double sum_sq = 0.0;
            const double kk = static_cast<double>(k_samples);
            for (double t : ts) {
                while (idx < draws.size() && draws[idx].first <= t) {
                    sum += draws[idx].second;
                    sum_sq += draws[idx].second * draws[idx].second;
                    ++idx;
                }
                const double est = sum / kk / delta;
                const double var = std::max(0.0, sum_sq / kk - (sum / kk) * (sum / kk));
                const double target = integrate_measure(model, f, -kInf, t, cfg, breaks).value;
                const double err = std::abs(est - target);
                if (err > row.error || t == ts.front()) {
                    row.error = std::max(row.error, err);
                    if (err >= row.error) {
                        row.argsup = t;
                        row.standard_error = std::sqrt(var / kk) / delta;
                    }
                }
            }
        }
        row.ratio = row.error / std::pow(delta, kTruncationExponent);
        rows.push_back(row);
    }
    return rows;
}

} // namespace levytrunc
