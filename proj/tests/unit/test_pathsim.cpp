#include "levytrunc/errors.hpp"
#include "levytrunc/levy_functionals.hpp"
#include "levytrunc/pathsim.hpp"
#include "levytrunc/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

using namespace levytrunc;
using Catch::Approx;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

SimulationOptions pure_jumps() {
    SimulationOptions opt;
    opt.u_cut = 0.0;
    opt.small_jumps = SmallJumpMode::off;
    return opt;
}
} // namespace

TEST_CASE("scheme truncation level") {
    const auto s = ObservationScheme::from_delta(1000, 0.01, 0.5);
    CHECK(s.v_n() == 0.5 * std::pow(0.01, 0.125));
    CHECK(s.horizon() == Approx(10.0));
    const auto r = ObservationScheme::from_rate(1000, 0.6, 1.0);
    CHECK(r.delta_n() == Approx(std::pow(1000.0, -0.6)));
    CHECK(r.effective_y() == Approx(0.6));
    CHECK_THROWS_AS(ObservationScheme::from_delta(10, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(ObservationScheme::from_delta(10, 0.1, 0.0), ConfigError);
    const auto j = nlohmann::json::parse(R"({"n": 10, "delta": 0.1})");
    CHECK_THROWS_AS(ObservationScheme::from_json(j), ConfigError);
}

TEST_CASE("simulation is deterministic in the seed") {
    const auto model = LevyModel::stable_tempered(1.0, 1.0, 0.5, 1.0);
    const auto scheme = ObservationScheme::from_delta(5000, 1e-3, 0.25);
    const auto coeffs = CoefficientSpec::constant(0.1, 0.3);
    const auto a = simulate_increments(model, coeffs, scheme, 99);
    const auto b = simulate_increments(model, coeffs, scheme, 99);
    CHECK(a.increments == b.increments);
    CHECK(a.jump_sizes == b.jump_sizes);
    const auto c = simulate_increments(model, coeffs, scheme, 100);
    CHECK(a.increments != c.increments);
}

TEST_CASE("pure jump increments are sums of logged jumps") {
    const auto model = LevyModel::exp_jump();
    const auto scheme = ObservationScheme::from_delta(2000, 0.05, 0.5);
    const auto path = simulate_increments(model, CoefficientSpec::constant(0.0, 0.0), scheme, 3, pure_jumps());
    double total_inc = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        double s = 0.0;
        for (double x : path.jump_sizes_in(i)) {
            s += x;
        }
        CHECK(path.increments[i] == s);
        total_inc += path.increments[i];
        const auto times = path.jump_times_in(i);
        for (std::size_t k = 1; k < times.size(); ++k) {
            CHECK(times[k] > times[k - 1]);
        }
    }
    const double total_jumps = std::accumulate(path.jump_sizes.begin(), path.jump_sizes.end(), 0.0);
    CHECK(total_inc == Approx(total_jumps).epsilon(1e-12));
}

TEST_CASE("logged jumps exceed u_cut") {
    const auto model = LevyModel::stable_tempered(1.0, 1.0, 0.5, 1.0);
    const auto scheme = ObservationScheme::from_delta(20000, 1e-3, 0.25);
    SimulationOptions opt;
    opt.u_cut = 0.01;
    const auto path = simulate_increments(model, CoefficientSpec::constant(0.0, 0.2), scheme, 5, opt);
    for (double x : path.jump_sizes) {
        CHECK(std::abs(x) > 0.01);
    }
    CHECK(path.discarded_moment_ratio > 0.0);
    CHECK(path.discarded_moment_ratio < 1.0);
    CHECK(path.small_jump_variance_rate == Approx(truncated_second_moment(model, 0.01)).epsilon(1e-10));
}

TEST_CASE("total jump count matches n delta nu(R)") {
    const auto model = LevyModel::exp_jump(2.0, 1.0);
    const auto scheme = ObservationScheme::from_delta(100, 0.05, 0.5);
    const std::size_t m = 10000;
    std::vector<double> counts(m);
    for (std::size_t r = 0; r < m; ++r) {
        auto opt = pure_jumps();
        opt.replication = r;
        counts[r] = static_cast<double>(
            simulate_increments(model, CoefficientSpec::constant(0.0, 0.0), scheme, 11, opt).jump_sizes.size());
    }
    const double expected = 100 * 0.05 * 2.0;
    CHECK(std::abs(mean(counts) - expected) <= 3.0 * std::sqrt(expected / m));
}

TEST_CASE("diffusion-only increments have variance sigma^2 delta") {
    const auto scheme = ObservationScheme::from_delta(10000, 0.01, 1.0);
    const auto path = simulate_increments(LevyModel::zero(), CoefficientSpec::constant(0.0, 0.3), scheme, 17);
    const double target = 0.09 * 0.01;
    const double se = target * std::sqrt(2.0 / (path.size() - 1.0));
    CHECK(std::abs(variance(path.increments) - target) <= 3.0 * se);
    CHECK(path.jump_sizes.empty());
}

TEST_CASE("distinct replications are uncorrelated") {
    const auto model = LevyModel::variance_gamma(1.0, 1.0);
    const auto scheme = ObservationScheme::from_delta(20000, 1e-3, 0.5);
    const auto coeffs = CoefficientSpec::constant(0.0, 0.2);
    std::vector<IncrementPath> paths;
    for (std::uint64_t r = 0; r < 4; ++r) {
        SimulationOptions opt;
        opt.replication = r;
        paths.push_back(simulate_increments(model, coeffs, scheme, 1, opt));
    }
    for (std::size_t a = 0; a < paths.size(); ++a) {
        for (std::size_t b = a + 1; b < paths.size(); ++b) {
            const auto& x = paths[a].increments;
            const auto& y = paths[b].increments;
            const double mx = mean(x);
            const double my = mean(y);
            double sxy = 0.0;
            double sxx = 0.0;
            double syy = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                sxy += (x[i] - mx) * (y[i] - my);
                sxx += (x[i] - mx) * (x[i] - mx);
                syy += (y[i] - my) * (y[i] - my);
            }
            CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 4.0 / std::sqrt(static_cast<double>(x.size())));
        }
    }
}

TEST_CASE("coefficient bound is enforced") {
    const auto scheme = ObservationScheme::from_delta(100, 0.01, 1.0);
    CHECK_THROWS_AS(simulate_increments(LevyModel::zero(), CoefficientSpec::constant(0.0, 2.0, 1.0), scheme, 1),
                    ConfigError);
    CoefficientSpec wave;
    wave.drift.kind = TimeFunction::Kind::sinusoid;
    wave.drift.level = 0.0;
    wave.drift.amplitude = 0.5;
    wave.drift.period = 0.3;
    wave.bound = 0.4;
    CHECK_THROWS_AS(simulate_increments(LevyModel::zero(), wave, scheme, 1), ConfigError);
}

TEST_CASE("truncated Levy increments") {
    const auto model = LevyModel::exp_jump();
    const auto base = ObservationScheme::from_delta(100000, 0.1, 1.0);
    const auto none = simulate_truncated_levy(model, base.with_truncation(kInf), 4);
    CHECK(std::all_of(none.increments.begin(), none.increments.end(), [](double x) { return x == 0.0; }));

    const auto at_one = simulate_truncated_levy(model, base.with_truncation(1.0), 4);
    std::vector<double> counts(at_one.size());
    for (std::size_t i = 0; i < at_one.size(); ++i) {
        counts[i] = static_cast<double>(at_one.n_large_jumps(i));
    }
    const double lam = 0.1 * std::exp(-1.0);
    CHECK(std::abs(mean(counts) - lam) <= 3.0 * std::sqrt(lam / static_cast<double>(counts.size())));
}

TEST_CASE("truncated Levy coupling is bit-identical") {
    const auto model = LevyModel::stable_tempered(1.0, 1.0, 0.5, 1.0);
    const auto scheme = ObservationScheme::from_delta(20000, 1e-3, 0.3);
    SimulationOptions opt;
    opt.u_cut = scheme.v_n();
    opt.small_jumps = SmallJumpMode::off;
    opt.replication = 2;
    const auto full = simulate_increments(model, CoefficientSpec::constant(0.0, 0.0), scheme, 8, opt);
    const auto trunc = simulate_truncated_levy(model, scheme, 8, 2);
    CHECK(full.increments == trunc.increments);
    CHECK(full.jump_sizes == trunc.jump_sizes);
}

TEST_CASE("jump size sampler") {
    Engine engine = make_engine(5, 0, Substream::fixture);
    const auto exp = LevyModel::exp_jump();
    std::vector<double> xs(100000);
    for (auto& x : xs) {
        x = sample_jump_size(exp, 1.0, kInf, engine);
    }
    CHECK(std::abs(mean(xs) - 2.0) <= 3.0 / std::sqrt(static_cast<double>(xs.size())));
    CHECK_THROWS(sample_jump_size(LevyModel::zero(), 1.0, kInf, engine));

    const auto stable = LevyModel::stable_tempered(1.0, 1.0, 0.5, 1.0);
    std::vector<double> positive;
    std::size_t n_pos = 0;
    const std::size_t m = 40000;
    for (std::size_t k = 0; k < m; ++k) {
        const double x = sample_jump_size(stable, 0.1, kInf, engine);
        REQUIRE(std::abs(x) > 0.1);
        if (x > 0.0) {
            ++n_pos;
            positive.push_back(x);
        }
    }
    CHECK(std::abs(static_cast<double>(n_pos) / m - 0.5) <= 3.0 * 0.5 / std::sqrt(static_cast<double>(m)));
    const double tail = nu_side_tail(stable, 0.1, true);
    const auto ks = ks_one_sample(positive, [&](double x) { return 1.0 - nu_side_tail(stable, x, true) / tail; });
    CHECK(ks.p_value > 0.001);
}

TEST_CASE("annulus sampling stays inside the annulus") {
    Engine engine = make_engine(6, 0, Substream::fixture);
    const auto vg = LevyModel::variance_gamma(1.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const double x = sample_jump_size(vg, 0.2, 0.7, engine);
        CHECK(std::abs(x) > 0.2);
        CHECK(std::abs(x) <= 0.7);
    }
}

TEST_CASE("path CSV layout") {
    const auto scheme = ObservationScheme::from_delta(3, 0.1, 1.0);
    const auto path = simulate_increments(LevyModel::exp_jump(), CoefficientSpec::constant(0.0, 0.0), scheme, 1,
                                          pure_jumps());
    std::ostringstream os;
    write_path_csv(path, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "index,increment,n_large_jumps");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
    }
    CHECK(rows == 3);
    const auto meta = path_metadata(path, LevyModel::exp_jump());
    CHECK(meta.contains("seed"));
    CHECK(meta.contains("model_hash"));
}
