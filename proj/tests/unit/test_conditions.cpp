#include "levytrunc/conditions.hpp"
#include "levytrunc/errors.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace levytrunc;
using Catch::Approx;

TEST_CASE("primary constants by hand arithmetic") {
    const auto pc = derive_primary(0.5, 0.02, 0.05);
    // p = 8 * 2.5 * 1.05 / 0.2
    CHECK(pc.p == Approx(105.0).margin(1e-12));
    CHECK(pc.t1 == Approx(1.0 / 1.05).margin(1e-12));
    CHECK(pc.t2 == Approx(1.0 / 1.02).margin(1e-12));
    CHECK(pc.m == 5);
    CHECK(pc.varpi == 0.125);
    // (8 + 7 - 1) / 2 = 7, floor + 1 = 8
    CHECK(derive_primary(1.0, 0.02, 0.05).m == 8);
}

TEST_CASE("domain violations name the inequality") {
    CHECK_THROWS_WITH(derive_primary(0.5, 0.02, 0.07), Catch::Matchers::ContainsSubstring("tau must be < 1/16"));
    CHECK_THROWS_AS(derive_primary(0.5, 0.05, 0.02), ConfigError);
    CHECK_THROWS_AS(derive_primary(0.0, 0.02, 0.05), ConfigError);
    CHECK_THROWS_AS(derive_primary(2.0, 0.02, 0.05), ConfigError);
    CHECK_THROWS_AS(derive_primary(0.5, 0.0, 0.05), ConfigError);
}

TEST_CASE("alternate constants by hand arithmetic") {
    const auto ac = derive_alternate(derive_primary(0.5, 0.02, 0.05));
    CHECK(ac.r == 0.5);
    CHECK(ac.varpi_r == Approx(0.1275).margin(1e-12));
    CHECK(ac.varpi_v == Approx(0.01).margin(1e-12));
    CHECK(ac.q == Approx(0.1025).margin(1e-12));
    CHECK(ac.epsilon == Approx(1.25).margin(1e-12));
    CHECK(ac.ell_tilde == Approx(0.625).margin(1e-12));
    CHECK(ac.ell == Approx(1.625).margin(1e-12));
    // (2 + r ell) / (ell - 1) = (8 + 7 beta - beta^2) / (3 - beta) = 4.5 at beta = 0.5
    CHECK((2.0 + ac.r * ac.ell) / (ac.ell - 1.0) == Approx(4.5).margin(1e-12));
}

TEST_CASE("scheme check examples") {
    const auto pc = derive_primary(0.5, 0.02, 0.05);
    const auto good = check_scheme(pc, 0.96);
    CHECK(good.passed);
    CHECK(good.violated.empty());
    const auto low = check_scheme(pc, 0.5);
    CHECK_FALSE(low.passed);
    CHECK(std::find(low.violated.begin(), low.violated.end(), "y <= t1") != low.violated.end());
    const auto edge = check_scheme(pc, pc.t1);
    CHECK_FALSE(edge.passed);
    const auto high = check_scheme(pc, pc.t2);
    CHECK_FALSE(high.passed);
    CHECK(check_scheme(pc, conforming_y(pc)).passed);
    CHECK(conforming_y(pc) == Approx(0.5 * (pc.t1 + pc.t2)));
}

TEST_CASE("passed iff nothing violated, over a sweep of y") {
    const auto pc = derive_primary(1.3, 0.01, 0.04);
    for (int k = 1; k < 200; ++k) {
        const auto r = check_scheme(pc, 0.01 * k);
        CHECK(r.passed == r.violated.empty());
        const auto failing = std::count_if(r.margins.begin(), r.margins.end(),
                                           [](const auto& kv) { return !(kv.second > 0.0); });
        CHECK(static_cast<std::size_t>(failing) == r.violated.size());
    }
}

TEST_CASE("inequality chain and side conditions hold on a 10x10x10 grid") {
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            for (int k = 0; k < 10; ++k) {
                const double beta = 2.0 * (i + 0.5) / 10.0;
                const double tau = (j + 0.5) / 10.0 / 16.0;
                const double zeta = tau * (k + 0.5) / 10.0;
                const auto pc = derive_primary(beta, zeta, tau);
                const auto ac = derive_alternate(pc);
                for (const auto& [name, slack] : inequality_chain(pc, ac)) {
                    INFO(name << " at beta=" << beta << " zeta=" << zeta << " tau=" << tau);
                    CHECK(slack > 0.0);
                }
                CHECK(pc.p > 4.0 + beta);
                CHECK(pc.p > std::max(2.0, 1.0 + 3.0 * ac.r));
                CHECK(pc.m >= 4);
                CHECK(pc.m <= 18);
                CHECK(std::abs(ac.q - (zeta / 8.0 + 2.0 * tau)) <= 1e-12);
                CHECK(0.0 < ac.varpi_v);
                CHECK(ac.varpi_v < pc.varpi);
                CHECK(pc.varpi < ac.varpi_r);
                CHECK(0.0 < pc.t1);
                CHECK(pc.t1 < pc.t2);
                CHECK(pc.t2 < 1.0);
            }
        }
    }
}

TEST_CASE("(1 + 2 varpi) / (1/2 - varpi) = 10/3") {
    const double w = kTruncationExponent;
    CHECK((1.0 + 2.0 * w) / (0.5 - w) == 10.0 / 3.0);
}

TEST_CASE("derivation is deterministic") {
    const auto a = derive_alternate(derive_primary(0.77, 0.013, 0.051));
    const auto b = derive_alternate(derive_primary(0.77, 0.013, 0.051));
    CHECK(to_json(a).dump() == to_json(b).dump());
}
