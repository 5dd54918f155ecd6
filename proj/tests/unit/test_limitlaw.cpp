#include "levytrunc/errors.hpp"
#include "levytrunc/estimator.hpp"
#include "levytrunc/levy_functionals.hpp"
#include "levytrunc/limitlaw.hpp"
#include "levytrunc/stats.hpp"

#include "../support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

using namespace levytrunc;
using Catch::Approx;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.model = {{"family", "stable_tempered"}, {"c", 1}, {"beta", 0.5}, {"lambda", 1}};
    c.rho = {{"kind", "poly_p"}, {"p", 5}};
    c.scheme = {{"n", 20000}, {"delta", 1e-3}, {"gamma", 0.25}};
    c.coefficients = CoefficientSpec::constant(0.0, 0.3);
    c.replications = 40;
    c.limit_replications = 200;
    c.grid.points = 11;
    c.allow_nonconforming = true;
    c.seed = 5;
    return c;
}
} // namespace

TEST_CASE("KS two-sample examples") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    CHECK(ks_two_sample(a, a).statistic == 0.0);
    const std::vector<double> neg{-3.0, -2.0, -0.5};
    const std::vector<double> pos{1.5, 4.0};
    CHECK(ks_two_sample(neg, pos).statistic == 1.0);
    const std::vector<double> b{1.5, 2.5, 3.5};
    CHECK(ks_two_sample(a, b).statistic == Approx(1.0 / 3.0).margin(1e-15));
    CHECK(oracle::ks_brute_force(a, b) == Approx(1.0 / 3.0).margin(1e-15));
    CHECK_THROWS_AS(ks_two_sample(std::vector<double>{}, a), DataError);
}

TEST_CASE("KS statistic agrees with brute force on random samples") {
    Engine engine = make_engine(3, 0, Substream::fixture);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 20; ++k) {
        std::vector<double> a(17 + k);
        std::vector<double> b(11 + 2 * k);
        for (auto& x : a) {
            x = std::round(4.0 * nd(engine)) / 4.0;
        }
        for (auto& x : b) {
            x = std::round(4.0 * nd(engine) + 1.0) / 4.0;
        }
        CHECK(ks_two_sample(a, b).statistic == Approx(oracle::ks_brute_force(a, b)).margin(1e-14));
    }
}

TEST_CASE("Kolmogorov tail function") {
    CHECK(kolmogorov_q(0.0) == 1.0);
    CHECK(kolmogorov_q(1.36) == Approx(0.0494).margin(2e-4));
    CHECK(kolmogorov_q(1.63) == Approx(0.0098).margin(2e-4));
    CHECK(kolmogorov_q(10.0) < 1e-80);
}

TEST_CASE("sample quantile") {
    std::vector<double> x(1000);
    for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = static_cast<double>(k);
    }
    const auto q = sample_quantile(x, 0.95);
    CHECK(q.value == Approx(949.05).margin(1.0));
    CHECK(q.standard_error > 0.0);
}

TEST_CASE("limit sampler trivial cases") {
    Engine engine = make_engine(1, 0, Substream::fixture);
    const LimitSampler zero({-1.0, 0.0, 1.0}, {0.0, 0.0, 0.0}, 0.0);
    for (double v : zero.sample(engine)) {
        CHECK(v == 0.0);
    }
    const LimitSampler flat({0.0, 1.0}, {1.0, 1.0}, 1.0);
    const auto path = flat.sample(engine);
    CHECK(path[0] == path[1]);
    CHECK_THROWS_AS(LimitSampler({0.0, 1.0}, {1.0, 0.5}, 1.0), NumericalError);
    CHECK_THROWS_AS(LimitSampler({0.0, 1.0}, {0.5, 2.0}, 1.0), NumericalError);
}

TEST_CASE("limit sampler covariance matches h_cov") {
    const auto model = LevyModel::exp_jump();
    const auto rho = RhoFunction::poly(2);
    const auto grid = quantile_grid(model, rho, 50, 0.01, 0.99);
    const auto sampler = LimitSampler::from_model(model, rho, grid);
    const std::size_t m = 10000;
    const std::size_t j = grid.size();
    std::vector<double> values(m * j);
    for (std::size_t r = 0; r < m; ++r) {
        const auto p = sample_limit_path(sampler, 77, r);
        std::copy(p.begin(), p.end(), values.begin() + static_cast<std::ptrdiff_t>(r * j));
    }
    int failures = 0;
    std::vector<double> prod(m);
    for (std::size_t u = 0; u < j; u += 7) {
        for (std::size_t v = u; v < j; v += 5) {
            for (std::size_t r = 0; r < m; ++r) {
                prod[r] = values[r * j + u] * values[r * j + v];
            }
            const double se = std::sqrt(variance(prod) / m);
            const double target = h_cov(model, rho, grid[u], grid[v]);
            failures += std::abs(mean(prod) - target) > 3.0 * se ? 1 : 0;
        }
    }
    CHECK(failures <= 1);
}

TEST_CASE("quantile grid places the requested mass below each point") {
    const auto model = LevyModel::stable_tempered(1.0, 1.0, 0.5, 1.0);
    const auto rho = RhoFunction::poly(5);
    const auto grid = quantile_grid(model, rho, 41, 0.01, 0.99);
    const double total = time_change(model, rho, kInf);
    REQUIRE(grid.size() == 41);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double q = 0.01 + 0.98 * static_cast<double>(k) / 40.0;
        CHECK(time_change(model, rho, grid[k]) / total == Approx(q).margin(1e-8));
    }
}

TEST_CASE("limit variances increase toward H as alpha decreases") {
    const auto model = LevyModel::stable_tempered(1.0, 1.0, 0.5, 1.0);
    const auto rho = RhoFunction::poly(5);
    for (double t : {-2.0, -0.5, 0.3, 1.0, 3.0}) {
        double prev = -1.0;
        for (double alpha : {1.0, 0.5, 0.1}) {
            const CutoffPsi cut(alpha);
            const auto w = rho.weighted("large", [&cut](double x) { return cut.large(x); });
            const double h = h_cov(model, w, t, t);
            CHECK(h >= prev);
            prev = h;
        }
        CHECK(prev <= h_cov(model, rho, t, t));
    }
}

TEST_CASE("CLT experiment is reproducible from its config") {
    const auto config = small_config();
    const auto a = run_clt_experiment(config);
    const auto b = run_clt_experiment(config);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(a.g_values == b.g_values);
    CHECK(a.sup_limit == b.sup_limit);
    CHECK_FALSE(a.conforming);
    CHECK_FALSE(a.warnings.empty());
    CHECK(a.completed == config.replications);
}

TEST_CASE("non-conforming schemes need the override") {
    auto config = small_config();
    config.allow_nonconforming = false;
    CHECK_THROWS_AS(run_clt_experiment(config), ConfigError);
}

TEST_CASE("degenerate model flags the report") {
    auto config = small_config();
    config.model = {{"family", "zero"}};
    config.coefficients = CoefficientSpec::constant(0.0, 0.0);
    config.replications = 5;
    const auto report = run_clt_experiment(config);
    CHECK(report.degenerate);
    for (double g : report.g_values) {
        CHECK(g == 0.0);
    }
}

TEST_CASE("cancelling before any replication completes is an error") {
    std::atomic<bool> cancel{true};
    auto config = small_config();
    config.replications = 10;
    CHECK_THROWS_AS(run_clt_experiment(config, &cancel), NumericalError);
}

TEST_CASE("bias study trivial cases") {
    const auto model = LevyModel::exp_jump();
    BiasStudyConfig cfg;
    cfg.gamma = 1.0;
    cfg.deltas = dyadic_ladder(4, 6);
    for (const auto& row : bias_study(model, [](double) { return 0.0; }, cfg)) {
        CHECK(row.error == 0.0);
    }
    // Truncation above all the mass: the estimator side vanishes, the error is sup_t N_f(t).
    const auto f = RhoFunction::poly(2);
    const auto bounded = LevyModel::custom({"uniform-jumps",
                                            [](double) { return 1.0; },
                                            {0.0, 0.5},
                                            1.0,
                                            std::numeric_limits<double>::infinity(),
                                            {1.0, 0.0, -1.0, 0.0},
                                            std::nullopt,
                                            SamplerKind::rejection,
                                            true});
    cfg.deltas = {0.5};
    const auto rows = bias_study(bounded, [&f](double x) { return f(x); }, cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].v_n > 0.5);
    CHECK(rows[0].error == Approx(n_rho(bounded, f, kInf)).epsilon(1e-12));
}

TEST_CASE("bias ratio stays bounded across the dyadic ladder") {
    const auto model = LevyModel::exp_jump();
    const auto f = RhoFunction::poly(2);
    BiasStudyConfig cfg;
    cfg.gamma = 1.0;
    cfg.deltas = dyadic_ladder(4, 14);
    const auto rows = bias_study(model, [&f](double x) { return f(x); }, cfg);
    REQUIRE(rows.size() == 11);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k].ratio <= rows[k - 1].ratio * (1.0 + 1e-9));
        CHECK(rows[k].error < rows[k - 1].error);
    }
    CHECK(rows.front().ratio < 1.0);
}

TEST_CASE("Monte Carlo bias agrees with the exact method") {
    const auto model = LevyModel::exp_jump();
    const auto f = RhoFunction::poly(2);
    BiasStudyConfig cfg;
    cfg.gamma = 1.0;
    cfg.deltas = {0.25};
    cfg.t_grid = {0.5, 1.0, 2.0};
    const auto exact = bias_study(model, [&f](double x) { return f(x); }, cfg);
    cfg.method = BiasMethod::monte_carlo;
    cfg.mc_samples = 400000;
    const auto mc = bias_study(model, [&f](double x) { return f(x); }, cfg);
    // The exact method keeps only the one-jump term; |f| <= 1 bounds the rest by delta nu(F)^2.
    const double mass = nu_tail_mass(model, mc[0].v_n);
    CHECK(std::abs(mc[0].error - exact[0].error) <= 4.0 * mc[0].standard_error + 0.25 * mass * mass);
}
