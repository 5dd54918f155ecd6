#include "levytrunc/conditions.hpp"

#include "levytrunc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace levytrunc {

namespace {

// floor() that treats values within 1e-12 of an integer as that integer, so that exact rational
// arguments such as 14/2 are not pushed below the integer by rounding.
int stable_floor(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-12) {
        return static_cast<int>(r);
    }
    return static_cast<int>(std::floor(x));
}

} // namespace

PrimaryConstants derive_primary(double beta, double zeta, double tau) {
    if (!(beta > 0.0)) {
        throw ConfigError("beta must be > 0");
    }
    if (!(beta < 2.0)) {
        throw ConfigError("beta must be < 2");
    }
    if (!(zeta > 0.0)) {
        throw ConfigError("zeta must be > 0");
    }
    if (!(zeta < tau)) {
        throw ConfigError("zeta must be < tau");
    }
    if (!(tau < 1.0 / 16.0)) {
        throw ConfigError("tau must be < 1/16");
    }
    PrimaryConstants pc;
    pc.beta = beta;
    pc.zeta = zeta;
    pc.tau = tau;
    pc.p = 8.0 * (1.0 + 3.0 * beta) * (1.0 + tau) / (1.0 - 16.0 * tau);
    pc.t1 = 1.0 / (1.0 + tau);
    pc.t2 = 1.0 / (1.0 + zeta);
    pc.m = std::max(stable_floor((8.0 + 7.0 * beta - beta * beta) / (3.0 - beta)) + 1, 4);
    if (!(0.0 < pc.t1 && pc.t1 < pc.t2 && pc.t2 < 1.0)) {
        throw NumericalError("0 < t1 < t2 < 1 violated");
    }
    if (pc.m < 4 || pc.m > 18) {
        throw NumericalError("moment order m outside {4, ..., 18}");
    }
    return pc;
}

AlternateConstants derive_alternate(const PrimaryConstants& pc) {
    AlternateConstants ac;
    const double beta = pc.beta;
    const double varpi = pc.varpi;
    ac.r = beta;
    ac.varpi_r = (1.0 + pc.zeta) / 8.0;
    ac.varpi_v = (1.0 - 16.0 * pc.tau) / (8.0 * (1.0 + 3.0 * beta));
    ac.q = ac.varpi_r - (1.0 + 3.0 * beta) * ac.varpi_v;
    ac.epsilon = (3.0 - beta) / 2.0;

    // General definition of ell_tilde; with the constants above it reduces to (3 - beta) / 4.
    const double r = ac.r;
    double lt = std::min(ac.epsilon, (1.0 - 2.0 * r * varpi) / (2.0 * r * varpi));
    if (r > 1.0) {
        lt = std::min(lt, (2.0 * (pc.p - r) * varpi - 1.0) / (2.0 * (r - 1.0) * varpi));
    }
    ac.ell_tilde = lt / 2.0;
    ac.ell = 1.0 + ac.ell_tilde;
    ac.m_alt = stable_floor(std::max((2.0 + r * ac.ell) / (ac.ell - 1.0), (1.0 + 2.0 * varpi) / (0.5 - varpi))) + 1;

    auto ensure = [](bool ok, const char* what) {
        if (!ok) {
            throw NumericalError(std::string("derived constants violate ") + what);
        }
    };
    ensure(std::abs(ac.q - (pc.zeta / 8.0 + 2.0 * pc.tau)) <= 1e-12, "q = zeta/8 + 2 tau");
    ensure(std::abs(ac.ell_tilde - (3.0 - beta) / 4.0) <= 1e-12, "ell_tilde = (3 - beta)/4");
    ensure(0.0 < ac.varpi_v && ac.varpi_v < varpi && varpi < ac.varpi_r, "0 < varpi_v < varpi < varpi_r");
    ensure(1.0 / (2.0 * (pc.p - r)) < varpi, "1/(2(p - r)) < varpi");
    ensure(varpi < 0.5 && (r == 0.0 || varpi < 1.0 / (4.0 * r)), "varpi < 1/2 ^ 1/(4r)");
    ensure(pc.p > std::max(2.0, 1.0 + 3.0 * r), "p > 2 v (1 + 3r)");
    ensure(ac.m_alt <= pc.m, "m_alt <= m");
    for (const auto& [name, slack] : inequality_chain(pc, ac)) {
        ensure(slack > 0.0, name.c_str());
    }
    return ac;
}

std::vector<std::pair<std::string, double>> inequality_chain(const PrimaryConstants& pc,
                                                              const AlternateConstants& ac) {
    const double a = 1.0 + 2.0 * ac.varpi_r - 2.0 * pc.varpi;
    const double inv_t2 = 1.0 / pc.t2;
    const double inv_t1 = 1.0 / pc.t1;
    const double upper = std::min({2.0 * pc.p * ac.varpi_v - 1.0, 1.0 + ac.q / 2.0, 1.0 + 2.0 * pc.varpi});
    const double top = 2.0 - 2.0 * ac.r * pc.varpi * (1.0 + ac.epsilon);
    return {
        {"1 < 1+2varpi_r-2varpi", a - 1.0},
        {"1+2varpi_r-2varpi < 1/t2", inv_t2 - a},
        {"1/t2 < 1/t1", inv_t1 - inv_t2},
        {"1/t1 < min(2p varpi_v-1, 1+q/2, 1+2varpi)", upper - inv_t1},
        {"min(...) < 2-2r varpi(1+eps)", top - upper},
    };
}

SchemeCheckReport check_scheme(const PrimaryConstants& pc, double y) {
    const AlternateConstants ac = derive_alternate(pc);
    SchemeCheckReport rep;
    rep.y = y;
    auto record = [&rep](const std::string& name, double slack, const std::string& violation) {
        rep.margins[name] = slack;
        if (!(slack > 0.0)) {
            rep.violated.push_back(violation);
        }
    };
    record("y > t1", y - pc.t1, "y <= t1");
    record("y < t2", pc.t2 - y, "y >= t2");
    // n Delta_n^a -> 0  <=>  y a > 1;  -> inf  <=>  y a < 1.
    auto to_zero = [&](const std::string& name, double a) { record(name, y * a - 1.0, name + " fails"); };
    auto to_inf = [&](const std::string& name, double a) { record(name, 1.0 - y * a, name + " fails"); };
    record("(1) Delta_n -> 0", y, "(1) Delta_n -> 0 fails");
    to_inf("(2) n Delta_n -> inf", 1.0);
    to_zero("(3) n Delta_n^(1+q/2) -> 0", 1.0 + ac.q / 2.0);
    to_zero("(4) n Delta_n^(1+2varpi) -> 0", 1.0 + 2.0 * pc.varpi);
    to_zero("(5) n Delta_n^(2p varpi_v-1) -> 0", 2.0 * pc.p * ac.varpi_v - 1.0);
    to_zero("(6) n Delta_n^(2(1-r varpi(1+eps))) -> 0", 2.0 * (1.0 - ac.r * pc.varpi * (1.0 + ac.epsilon)));
    to_inf("(7) n Delta_n^(1+2(varpi_r-varpi)) -> inf", 1.0 + 2.0 * (ac.varpi_r - pc.varpi));
    rep.passed = rep.violated.empty();
    return rep;
}

double conforming_y(const PrimaryConstants& pc) { return 0.5 * (pc.t1 + pc.t2); }

nlohmann::json to_json(const PrimaryConstants& pc) {
    return {{"beta", pc.beta}, {"zeta", pc.zeta}, {"tau", pc.tau}, {"p", pc.p},
            {"varpi", pc.varpi}, {"t1", pc.t1}, {"t2", pc.t2}, {"m", pc.m}};
}

nlohmann::json to_json(const AlternateConstants& ac) {
    return {{"r", ac.r}, {"varpi_r", ac.varpi_r}, {"varpi_v", ac.varpi_v}, {"q", ac.q},
            {"epsilon", ac.epsilon}, {"ell_tilde", ac.ell_tilde}, {"ell", ac.ell}, {"m_alt", ac.m_alt}};
}

nlohmann::json to_json(const SchemeCheckReport& r) {
    return {{"y", r.y}, {"passed", r.passed}, {"violated", r.violated}, {"margins", r.margins}};
}

nlohmann::json constants_report(const PrimaryConstants& pc, const AlternateConstants& ac,
                                const std::optional<SchemeCheckReport>& scheme) {
    nlohmann::json chain = nlohmann::json::object();
    for (const auto& [name, slack] : inequality_chain(pc, ac)) {
        chain[name] = slack;
    }
    nlohmann::json j = {{"primary", to_json(pc)},
                        {"alternate", to_json(ac)},
                        {"inequality_chain", chain},
                        {"conforming_y", conforming_y(pc)}};
    j["scheme"] = scheme ? to_json(*scheme) : nlohmann::json(nullptr);
    return j;
}

std::string constants_table(const PrimaryConstants& pc, const AlternateConstants& ac,
                            const std::optional<SchemeCheckReport>& scheme) {
    std::ostringstream os;
    char buf[160];
    auto row = [&](const std::string& name, double v) {
        std::snprintf(buf, sizeof buf, "  %-44s %.12g\n", name.c_str(), v);
        os << buf;
    };
    os << "primary constants\n";
    row("beta", pc.beta);
    row("zeta", pc.zeta);
    row("tau", pc.tau);
    row("p", pc.p);
    row("varpi", pc.varpi);
    row("t1", pc.t1);
    row("t2", pc.t2);
    row("m", pc.m);
    os << "derived constants\n";
    row("r", ac.r);
    row("varpi_r", ac.varpi_r);
    row("varpi_v", ac.varpi_v);
    row("q", ac.q);
    row("epsilon", ac.epsilon);
    row("ell_tilde", ac.ell_tilde);
    row("ell", ac.ell);
    row("m_alt", ac.m_alt);
    os << "inequality chain (slack)\n";
    for (const auto& [name, slack] : inequality_chain(pc, ac)) {
        row(name, slack);
    }
    if (scheme) {
        os << "scheme Delta_n = n^-y, y = " << scheme->y << ": " << (scheme->passed ? "PASS" : "FAIL") << "\n";
        for (const auto& [name, slack] : scheme->margins) {
            row(name, slack);
        }
        for (const auto& v : scheme->violated) {
            os << "  violated: " << v << "\n";
        }
    }
    return os.str();
}

} // namespace levytrunc
