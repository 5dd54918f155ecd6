#include "levytrunc/experiment_config.hpp"

#include "levytrunc/errors.hpp"
#include "levytrunc/rng.hpp"

#include <cstdio>

namespace levytrunc {

nlohmann::json GridSpec::to_json() const {
    nlohmann::json j;
    switch (kind) {
    case Kind::quantile:
        j = {{"kind", "quantile"}, {"points", points}, {"lo", lo}, {"hi", hi}};
        break;
    case Kind::explicit_values:
        j = {{"kind", "explicit"}, {"values", values}};
        break;
    case Kind::linspace:
        j = {{"kind", "linspace"}, {"points", points}, {"from", lo}, {"to", hi}};
        break;
    }
    j["include"] = include;
    return j;
}

GridSpec GridSpec::from_json(const nlohmann::json& j) {
    GridSpec g;
    const auto kind = j.value("kind", std::string("quantile"));
    if (kind == "quantile") {
        g.kind = Kind::quantile;
        g.points = j.value("points", std::size_t{41});
        g.lo = j.value("lo", 0.01);
        g.hi = j.value("hi", 0.99);
        if (!(0.0 < g.lo && g.lo < g.hi && g.hi < 1.0) || g.points < 2) {
            throw ConfigError("quantile grid needs 0 < lo < hi < 1 and at least 2 points");
        }
    } else if (kind == "explicit") {
        g.kind = Kind::explicit_values;
        g.values = j.at("values").get<std::vector<double>>();
        if (g.values.empty()) {
            throw ConfigError("explicit grid needs at least one value");
        }
    } else if (kind == "linspace") {
        g.kind = Kind::linspace;
        g.points = j.at("points").get<std::size_t>();
        g.lo = j.at("from").get<double>();
        g.hi = j.at("to").get<double>();
        if (g.points < 2 || !(g.lo < g.hi)) {
            throw ConfigError("linspace grid needs from < to and at least 2 points");
        }
    } else {
        throw ConfigError("unknown grid kind '" + kind + "'");
    }
    if (j.contains("include")) {
        g.include = j.at("include").get<std::vector<double>>();
    }
    return g;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json sim = {{"small_jumps", small_jumps == SmallJumpMode::gaussian ? "gaussian" : "off"},
                          {"compensate", compensate}};
    sim["u_cut"] = u_cut ? nlohmann::json(*u_cut) : nlohmann::json(nullptr);
    return {{"model", model},
            {"rho", rho},
            {"scheme", scheme},
            {"coefficients", coefficients.to_json()},
            {"replications", replications},
            {"limit_replications", limit_replications},
            {"t_grid", grid.to_json()},
            {"alphas", alphas},
            {"seed", seed},
            {"output_dir", output_dir},
            {"conditions", {{"zeta", zeta}, {"tau", tau}}},
            {"allow_nonconforming", allow_nonconforming},
            {"simulation", sim},
            {"threads", threads},
            {"quadrature",
             {{"abs_tol", quadrature.abs_tol},
              {"rel_tol", quadrature.rel_tol},
              {"singularity_split", quadrature.singularity_split}}}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig c;
        c.model = j.at("model");
        c.rho = j.at("rho");
        c.scheme = j.at("scheme");
        if (j.contains("coefficients")) {
            c.coefficients = CoefficientSpec::from_json(j.at("coefficients"));
        }
        c.replications = j.value("replications", c.replications);
        c.limit_replications = j.value("limit_replications", c.limit_replications);
        if (j.contains("t_grid")) {
            c.grid = GridSpec::from_json(j.at("t_grid"));
        }
        if (j.contains("alphas")) {
            c.alphas = j.at("alphas").get<std::vector<double>>();
        }
        c.seed = j.value("seed", c.seed);
        c.output_dir = j.value("output_dir", c.output_dir);
        if (j.contains("conditions")) {
            c.zeta = j.at("conditions").value("zeta", c.zeta);
            c.tau = j.at("conditions").value("tau", c.tau);
        }
        c.allow_nonconforming = j.value("allow_nonconforming", false);
        if (j.contains("simulation")) {
            const auto& s = j.at("simulation");
            if (s.contains("u_cut") && !s.at("u_cut").is_null()) {
                c.u_cut = s.at("u_cut").get<double>();
            }
            const auto mode = s.value("small_jumps", std::string("gaussian"));
            if (mode != "gaussian" && mode != "off") {
                throw ConfigError("simulation.small_jumps must be 'gaussian' or 'off'");
            }
            c.small_jumps = mode == "gaussian" ? SmallJumpMode::gaussian : SmallJumpMode::off;
            c.compensate = s.value("compensate", false);
        }
        c.threads = j.value("threads", 0u);
        if (j.contains("quadrature")) {
            const auto& q = j.at("quadrature");
            c.quadrature.abs_tol = q.value("abs_tol", c.quadrature.abs_tol);
            c.quadrature.rel_tol = q.value("rel_tol", c.quadrature.rel_tol);
            c.quadrature.singularity_split = q.value("singularity_split", c.quadrature.singularity_split);
        }
        c.quadrature.validate();
        if (c.replications < 2) {
            throw ConfigError("replications must be >= 2");
        }
        for (double a : c.alphas) {
            if (!(a > 0.0)) {
                throw ConfigError("alphas must be > 0");
            }
        }
        // Parse eagerly so that malformed specs surface as config errors.
        (void)c.build_model();
        (void)c.build_rho();
        (void)c.build_scheme();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed experiment config: ") + e.what());
    }
}

std::string ExperimentConfig::hash() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json().dump())));
    return buf;
}

} // namespace levytrunc
