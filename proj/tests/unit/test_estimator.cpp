#include "levytrunc/estimator.hpp"
#include "levytrunc/levy_functionals.hpp"
#include "levytrunc/pathsim.hpp"

#include "../support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

using namespace levytrunc;
using Catch::Approx;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

RhoFunction square() {
    return RhoFunction::custom(
        "square", [](double x) { return x * x; }, [](double x) { return 2.0 * x; }, 2.0, 1.0, false);
}

ObservationScheme hand_scheme() { return ObservationScheme::from_delta(4, 0.25, 1.0).with_truncation(0.1); }

const std::vector<double> kHand{0.5, -0.01, 2.0, 0.003};
} // namespace

TEST_CASE("hand example") {
    const auto ldf = TruncatedLDF::estimate(kHand, hand_scheme(), square());
    CHECK(ldf(1.0) == 0.25);
    CHECK(ldf(3.0) == 4.25);
    CHECK(ldf(-kInf) == 0.0);
    CHECK(ldf(kInf) == 4.25);
    CHECK(ldf.total() == 4.25);
    CHECK(ldf.plugin_variance(3.0) == 16.0625);
    CHECK(ldf.kept().size() == 2);
}

TEST_CASE("step function is right-continuous and nondecreasing") {
    const auto ldf = TruncatedLDF::estimate(kHand, hand_scheme(), square());
    CHECK(ldf(0.5) == 0.25);
    CHECK(ldf(std::nextafter(0.5, 0.0)) == 0.0);
    CHECK(ldf(2.0) == 4.25);
    CHECK(ldf(std::nextafter(2.0, 0.0)) == 0.25);
}

TEST_CASE("an increment exactly at v_n is excluded") {
    const std::vector<double> inc{0.1, -0.1, 0.2};
    const auto ldf = TruncatedLDF::estimate(inc, ObservationScheme::from_delta(3, 1.0, 1.0).with_truncation(0.1),
                                            square());
    CHECK(ldf.kept().size() == 1);
    CHECK(ldf.total() == 0.2 * 0.2 / 3.0);
}

TEST_CASE("all increments below v_n give the zero function") {
    const std::vector<double> inc{0.01, -0.02, 0.05};
    const auto ldf = TruncatedLDF::estimate(inc, ObservationScheme::from_delta(3, 1.0, 1.0).with_truncation(0.1),
                                            RhoFunction::poly(5));
    CHECK(ldf.kept().empty());
    for (double t : {-kInf, -1.0, 0.0, 1.0, kInf}) {
        CHECK(ldf(t) == 0.0);
    }
    const Band band = confidence_band(ldf, 1.0, 0.95);
    CHECK(band.lo == 0.0);
    CHECK(band.hi == 0.0);
    CHECK(empirical_process(ldf, LevyModel::zero(), RhoFunction::poly(5), 0.3) == 0.0);
}

TEST_CASE("empirical process centers at N_rho") {
    const auto ldf = TruncatedLDF::estimate(kHand, hand_scheme(), square());
    const double n1 = oracle::simpson([](double x) { return x * x / (1.0 + x * x) * std::exp(-x); }, 0.0, 1.0, 20000);
    const double g = empirical_process(ldf, LevyModel::exp_jump(), RhoFunction::poly(2), 1.0);
    CHECK(g == Approx(0.25 - n1).margin(1e-9));
}

TEST_CASE("cutoff psi") {
    CHECK(CutoffPsi::psi(0.4) == 0.0);
    CHECK(CutoffPsi::psi(0.5) == 0.0);
    CHECK(CutoffPsi::psi(1.0) == 1.0);
    CHECK(CutoffPsi::psi(1.2) == 1.0);
    const double mid = CutoffPsi::psi(0.75);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    double prev = 0.0;
    for (int k = 0; k <= 4000; ++k) {
        const double x = -1.0 + 0.001 * k;
        const double v = CutoffPsi::psi(x);
        CHECK(v >= (x >= 1.0 ? 1.0 : 0.0));
        CHECK(v <= (x >= 0.5 ? 1.0 : 0.0));
        CHECK(v >= prev);
        if (x > 0.55 && x < 0.95) {
            CHECK(v > prev);
        }
        prev = v;
    }
    const CutoffPsi cut(0.3);
    for (double x : {-1.0, -0.2, 0.0, 0.17, 0.25, 2.0}) {
        CHECK(cut.large(x) + cut.small(x) == 1.0);
        CHECK(cut.large(x) == cut.large(-x));
    }
}

TEST_CASE("decomposition identity on random triples") {
    const auto model = LevyModel::stable_tempered(1.0, 1.0, 0.5, 1.0);
    const auto rho = RhoFunction::poly(5);
    const auto coeffs = CoefficientSpec::constant(0.0, 0.3);
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> t_dist(-3.0, 3.0);
    std::uniform_real_distribution<double> a_dist(0.05, 2.0);
    for (int k = 0; k < 20; ++k) {
        SimulationOptions opt;
        opt.replication = static_cast<std::uint64_t>(k);
        const auto path = simulate_increments(model, coeffs, ObservationScheme::from_delta(10000, 1e-3, 0.25), 9, opt);
        const auto ldf = estimate(path, rho);
        const double t = t_dist(gen);
        const CutoffPsi cut(a_dist(gen));
        const auto parts = decompose(ldf, rho, cut, model, t);
        CHECK(std::abs(parts.g_alpha + parts.g_alpha_prime - empirical_process(ldf, model, rho, t)) <= 2e-10);
    }
}

TEST_CASE("tiny alpha leaves only the centering in the small-jump part") {
    const auto model = LevyModel::exp_jump();
    const auto rho = RhoFunction::poly(5);
    const auto ldf = TruncatedLDF::estimate(kHand, hand_scheme(), rho);
    const CutoffPsi cut(1e-3);
    const double t = 1.5;
    const auto parts = decompose(ldf, rho, cut, model, t);
    const double small_centering = split_n_rho(model, rho, cut, t).second;
    CHECK(ldf.reweighted([&cut](double x) { return cut.small(x); })(kInf) == 0.0);
    CHECK(parts.g_alpha_prime == Approx(-std::sqrt(ldf.horizon()) * small_centering).margin(1e-14));
    CHECK(small_centering < 1e-10);
}

TEST_CASE("pointwise band coverage") {
    const auto model = LevyModel::exp_jump();
    const auto rho = RhoFunction::poly(2);
    const auto scheme = ObservationScheme::from_delta(100000, 1e-3, 0.25);
    const double truth = n_rho(model, rho, 1.0);
    const int m = 1000;
    int covered = 0;
    for (int r = 0; r < m; ++r) {
        SimulationOptions opt;
        opt.replication = static_cast<std::uint64_t>(r);
        const auto path = simulate_increments(model, CoefficientSpec::constant(0.0, 0.0), scheme, 21, opt);
        const auto band = confidence_band(estimate(path, rho), 1.0, 0.9);
        covered += band.lo <= truth && truth <= band.hi ? 1 : 0;
    }
    const double coverage = static_cast<double>(covered) / m;
    CHECK(coverage >= 0.87);
    CHECK(coverage <= 0.93);
}
