#include "levytrunc/pathsim.hpp"

#include "levytrunc/errors.hpp"
#include "levytrunc/levy_functionals.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace levytrunc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxRejections = 100000;

double uniform_open(Engine& engine) {
    boost::random::uniform_01<double> u;
    double x = u(engine);
    while (x == 0.0) {
        x = u(engine);
    }
    return x;
}

// int_u^w x^{-a} dx for 0 <= u < w <= inf.
double power_integral(double a, double u, double w) {
    if (a == 1.0) {
        return std::log(w / u);
    }
    const double wu = std::isinf(w) ? 0.0 : std::pow(w, 1.0 - a);
    return (wu - std::pow(u, 1.0 - a)) / (1.0 - a);
}

// Inverse CDF of the density proportional to x^{-a} on (u, w).
double sample_power(double a, double u, double w, double uni) {
    if (a == 1.0) {
        return u * std::pow(w / u, uni);
    }
    const double lo = std::pow(u, 1.0 - a);
    const double hi = std::isinf(w) ? 0.0 : std::pow(w, 1.0 - a);
    return std::pow(lo + uni * (hi - lo), 1.0 / (1.0 - a));
}

double json_number(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const auto& v = j.at(key);
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") {
            return kInf;
        }
        return std::stod(s);
    }
    return v.get<double>();
}

} // namespace

double TimeFunction::operator()(double t) const {
    double v = level;
    if (kind == Kind::sinusoid) {
        v += amplitude * std::sin(2.0 * std::numbers::pi * t / period);
    }
    return std::clamp(v, -clamp, clamp);
}

nlohmann::json TimeFunction::to_json() const {
    if (kind == Kind::constant) {
        return {{"kind", "constant"}, {"value", level}};
    }
    nlohmann::json j = {{"kind", "sinusoid"}, {"level", level}, {"amplitude", amplitude}, {"period", period}};
    if (std::isfinite(clamp)) {
        j["clamp"] = clamp;
    }
    return j;
}

TimeFunction TimeFunction::from_json(const nlohmann::json& j) {
    if (j.is_number()) {
        return constant(j.get<double>());
    }
    const auto kind = j.value("kind", std::string("constant"));
    if (kind == "constant") {
        return constant(json_number(j, "value", 0.0));
    }
    if (kind == "sinusoid") {
        TimeFunction f;
        f.kind = Kind::sinusoid;
        f.level = json_number(j, "level", 0.0);
        f.amplitude = json_number(j, "amplitude", 0.0);
        f.period = json_number(j, "period", 1.0);
        f.clamp = json_number(j, "clamp", kInf);
        if (!(f.period > 0.0)) {
            throw ConfigError("sinusoid period must be > 0");
        }
        return f;
    }
    throw ConfigError("unknown coefficient kind '" + kind + "'");
}

CoefficientSpec CoefficientSpec::constant(double drift, double vol, double bound) {
    return {TimeFunction::constant(drift), TimeFunction::constant(vol), bound};
}

nlohmann::json CoefficientSpec::to_json() const {
    return {{"drift", drift.to_json()}, {"vol", vol.to_json()}, {"bound", bound}};
}

CoefficientSpec CoefficientSpec::from_json(const nlohmann::json& j) {
    CoefficientSpec c;
    if (j.contains("drift")) {
        c.drift = TimeFunction::from_json(j.at("drift"));
    }
    if (j.contains("vol")) {
        c.vol = TimeFunction::from_json(j.at("vol"));
    }
    c.bound = json_number(j, "bound", 1.0);
    return c;
}

ObservationScheme::ObservationScheme(std::size_t n, double delta_n, double gamma, std::optional<double> y)
    : n_(n), delta_n_(delta_n), gamma_(gamma), v_n_(gamma * std::pow(delta_n, 0.125)), y_(y) {}

ObservationScheme ObservationScheme::from_delta(std::size_t n, double delta_n, double gamma) {
    if (n < 1) {
        throw ConfigError("scheme requires n >= 1");
    }
    if (!(delta_n > 0.0) || !std::isfinite(delta_n)) {
        throw ConfigError("scheme requires finite delta_n > 0");
    }
    if (!(gamma > 0.0)) {
        throw ConfigError("scheme requires gamma > 0");
    }
    return ObservationScheme(n, delta_n, gamma, std::nullopt);
}

ObservationScheme ObservationScheme::from_rate(std::size_t n, double y, double gamma) {
    if (n < 2) {
        throw ConfigError("rate-specified scheme requires n >= 2");
    }
    if (!(y > 0.0)) {
        throw ConfigError("scheme requires y > 0");
    }
    auto s = from_delta(n, std::pow(static_cast<double>(n), -y), gamma);
    s.y_ = y;
    return s;
}

ObservationScheme ObservationScheme::from_json(const nlohmann::json& j) {
    if (!j.contains("n") || !j.contains("gamma")) {
        throw ConfigError("scheme requires 'n' and an explicit 'gamma'");
    }
    const auto n = j.at("n").get<std::size_t>();
    const double gamma = json_number(j, "gamma", 0.0);
    if (j.contains("delta") == j.contains("y")) {
        throw ConfigError("scheme requires exactly one of 'delta' or 'y'");
    }
    if (j.contains("y")) {
        return from_rate(n, json_number(j, "y", 0.0), gamma);
    }
    return from_delta(n, json_number(j, "delta", 0.0), gamma);
}

nlohmann::json ObservationScheme::to_json() const {
    nlohmann::json j = {{"n", n_}, {"gamma", gamma_}};
    if (y_) {
        j["y"] = *y_;
    } else {
        j["delta"] = delta_n_;
    }
    return j;
}

double ObservationScheme::effective_y() const {
    if (y_) {
        return *y_;
    }
    if (n_ < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return -std::log(delta_n_) / std::log(static_cast<double>(n_));
}

ObservationScheme ObservationScheme::with_truncation(double v_n) const {
    if (!(v_n > 0.0)) {
        throw ConfigError("truncation level must be > 0");
    }
    ObservationScheme s = *this;
    s.v_n_ = v_n;
    return s;
}

std::span<const double> IncrementPath::jump_sizes_in(std::size_t i) const {
    return std::span<const double>(jump_sizes).subspan(jump_offsets[i], n_large_jumps(i));
}

std::span<const double> IncrementPath::jump_times_in(std::size_t i) const {
    return std::span<const double>(jump_times).subspan(jump_offsets[i], n_large_jumps(i));
}

JumpSampler::JumpSampler(const LevyModel& model, double lo, double hi, const QuadratureConfig& cfg)
    : model_(&model), lo_(lo), hi_(hi) {
    if (!(lo >= 0.0) || !(hi > lo)) {
        throw ConfigError("jump region requires 0 <= lo < hi");
    }
    auto side_mass = [&](bool positive) {
        const double a = nu_side_tail(model, lo, positive, cfg);
        const double b = nu_side_tail(model, hi, positive, cfg);
        return std::max(0.0, a - b);
    };
    mass_pos_ = side_mass(true);
    mass_neg_ = side_mass(false);
    if (!(mass() > 0.0) || !std::isfinite(mass())) {
        throw ConfigError("jump region {" + std::to_string(lo) + " < |x| <= " + std::to_string(hi) +
                          "} has mass " + std::to_string(mass()) + "; need 0 < mass < inf");
    }
    if (model.sampler_kind() == SamplerKind::inverse_cdf) {
        for (bool positive : {true, false}) {
            const auto& tail = *model.closed_form_tail();
            Side& s = positive ? pos_ : neg_;
            s.tail_lo = positive ? tail.positive(lo) : tail.negative(lo);
            s.tail_hi = positive ? tail.positive(hi) : tail.negative(hi);
        }
    } else {
        const auto& env = model.envelope();
        pos_ = make_side(env.c_pos, true);
        neg_ = make_side(env.c_neg, false);
    }
}

JumpSampler::Side JumpSampler::make_side(double c, bool positive) const {
    Side s;
    s.c = c;
    if (c == 0.0 || (positive ? mass_pos_ : mass_neg_) == 0.0) {
        return s;
    }
    const auto& env = model_->envelope();
    const double a = 1.0 + env.index;
    const double lambda = env.lambda;
    s.split = lambda > 0.0 ? std::max(lo_, 1.0 / lambda) : kInf;
    const double power_hi = std::min(s.split, hi_);
    if (lo_ == 0.0 && a >= 1.0) {
        throw ConfigError("envelope is not integrable at the origin; use lo > 0");
    }
    s.mass_power = power_hi > lo_ ? c * std::exp(-lambda * lo_) * power_integral(a, lo_, power_hi) : 0.0;
    if (s.split < hi_) {
        s.mass_exp = c * std::pow(s.split, -a) * (std::exp(-lambda * s.split) - std::exp(-lambda * hi_)) / lambda;
    }
    if (!std::isfinite(s.mass_power + s.mass_exp)) {
        throw ConfigError("envelope mass is infinite on the requested region");
    }
    return s;
}

double JumpSampler::operator()(Engine& engine) const {
    boost::random::uniform_01<double> u;
    const bool positive = u(engine) * mass() < mass_pos_;
    return sample_side(engine, positive);
}

double JumpSampler::sample_side(Engine& engine, bool positive) const {
    const double mag = model_->sampler_kind() == SamplerKind::inverse_cdf ? sample_inverse(engine, positive)
                                                                          : sample_rejection(engine, positive);
    return positive ? mag : -mag;
}

double JumpSampler::sample_inverse(Engine& engine, bool positive) const {
    const Side& s = positive ? pos_ : neg_;
    const auto& tail = *model_->closed_form_tail();
    const auto& inverse = positive ? tail.positive_inverse : tail.negative_inverse;
    const SideTail& side_tail = positive ? tail.positive : tail.negative;
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        const double target = s.tail_hi + uniform_open(engine) * (s.tail_lo - s.tail_hi);
        double x = 0.0;
        if (inverse) {
            x = (*inverse)(target);
        } else {
            // Bracket then solve tail(x) = target; tail is decreasing.
            double a = lo_;
            double b = std::isinf(hi_) ? std::max(1.0, 2.0 * lo_) : hi_;
            while (std::isinf(hi_) && side_tail(b) > target) {
                a = b;
                b *= 2.0;
            }
            boost::math::tools::eps_tolerance<double> tol(50);
            std::uintmax_t iters = 200;
            const auto root = boost::math::tools::toms748_solve(
                [&](double v) { return side_tail(v) - target; }, a, b, tol, iters);
            x = 0.5 * (root.first + root.second);
        }
        if (x > lo_ && x <= hi_) {
            return x;
        }
    }
    throw NumericalError("inverse-CDF sampler kept producing values outside the region");
}

double JumpSampler::sample_rejection(Engine& engine, bool positive) const {
    const Side& s = positive ? pos_ : neg_;
    const auto& env = model_->envelope();
    const double a = 1.0 + env.index;
    const double lambda = env.lambda;
    const double total = s.mass_power + s.mass_exp;
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        double x = 0.0;
        double envelope = 0.0;
        if (uniform_open(engine) * total < s.mass_power) {
            x = sample_power(a, lo_, std::min(s.split, hi_), uniform_open(engine));
            envelope = s.c * std::exp(-lambda * lo_) * std::pow(x, -a);
        } else {
            const double span = std::isinf(hi_) ? 1.0 : -std::expm1(-lambda * (hi_ - s.split));
            x = s.split - std::log1p(-uniform_open(engine) * span) / lambda;
            envelope = s.c * std::pow(s.split, -a) * std::exp(-lambda * x);
        }
        if (!(x > lo_) || x > hi_) {
            continue;
        }
        const double h = model_->density(positive ? x : -x);
        if (h > envelope * (1.0 + 1e-9)) {
            throw EnvelopeViolation(model_->name() + ": density " + std::to_string(h) + " exceeds envelope " +
                                    std::to_string(envelope) + " at |x| = " + std::to_string(x));
        }
        if (uniform_open(engine) * envelope <= h) {
            return x;
        }
    }
    throw NumericalError(model_->name() + ": rejection sampler failed after " + std::to_string(kMaxRejections) +
                         " proposals");
}

double sample_jump_size(const LevyModel& model, double lo, double hi, Engine& engine) {
    return JumpSampler(model, lo, hi)(engine);
}

namespace {

struct JumpRecord {
    std::vector<std::size_t> offsets;
    std::vector<double> times;
    std::vector<double> sizes;
};

// Compound Poisson jumps with |x| > u_cut on [0, n delta), arrival by exponential gaps.
JumpRecord simulate_jumps(const LevyModel& model, const ObservationScheme& scheme, double u_cut, std::uint64_t seed,
                          std::uint64_t replication, const QuadratureConfig& cfg) {
    const std::size_t n = scheme.n();
    JumpRecord rec;
    rec.offsets.assign(n + 1, 0);
    if (model.is_zero() || std::isinf(u_cut)) {
        return rec;
    }
    const double rate = nu_tail_mass(model, u_cut, cfg);
    if (!(rate > 0.0)) {
        return rec;
    }
    const JumpSampler sampler(model, u_cut, kInf, cfg);
    Engine engine = make_engine(seed, replication, Substream::jumps);
    boost::random::exponential_distribution<double> gap(rate);
    const double delta = scheme.delta_n();
    const double horizon = scheme.horizon();
    std::vector<std::size_t> counts(n, 0);
    double t = 0.0;
    for (;;) {
        double next = t + gap(engine);
        if (next <= t) {
            next = std::nextafter(t, kInf);
        }
        t = next;
        if (t >= horizon) {
            break;
        }
        const auto i = std::min(n - 1, static_cast<std::size_t>(t / delta));
        rec.times.push_back(t);
        rec.sizes.push_back(sampler(engine));
        ++counts[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        rec.offsets[i + 1] = rec.offsets[i] + counts[i];
    }
    return rec;
}

void add_jumps(IncrementPath& path, JumpRecord rec) {
    for (std::size_t i = 0; i < path.increments.size(); ++i) {
        for (std::size_t k = rec.offsets[i]; k < rec.offsets[i + 1]; ++k) {
            path.increments[i] += rec.sizes[k];
        }
    }
    path.jump_offsets = std::move(rec.offsets);
    path.jump_times = std::move(rec.times);
    path.jump_sizes = std::move(rec.sizes);
}

} // namespace

IncrementPath simulate_increments(const LevyModel& model, const CoefficientSpec& coeffs,
                                  const ObservationScheme& scheme, std::uint64_t seed,
                                  const SimulationOptions& options) {
    const auto& cfg = options.quadrature;
    double u_cut = options.u_cut.value_or(model.finite_activity() ? 0.0 : std::min(scheme.v_n() / 10.0, 1e-3));
    if (!(u_cut >= 0.0) || std::isnan(u_cut)) {
        throw ConfigError("u_cut must be >= 0");
    }
    if (u_cut == 0.0 && !model.finite_activity()) {
        throw ConfigError("u_cut = 0 requires a finite-activity model");
    }
    if (!(coeffs.bound >= 0.0)) {
        throw ConfigError("coefficient bound must be >= 0");
    }

    IncrementPath path;
    path.seed = seed;
    path.replication = options.replication;
    path.scheme = scheme;
    path.u_cut = u_cut;
    path.small_jumps = options.small_jumps;

    const double small_m2 = model.is_zero() ? 0.0 : truncated_second_moment(model, u_cut, cfg);
    const double total_m2 = model.is_zero() ? 0.0 : truncated_second_moment(model, kInf, cfg);
    path.discarded_moment_ratio = total_m2 > 0.0 ? small_m2 / total_m2 : 0.0;
    path.small_jump_variance_rate = options.small_jumps == SmallJumpMode::gaussian ? small_m2 : 0.0;

    double compensator = 0.0;
    if (options.compensate && !model.is_zero() && u_cut < 1.0) {
        compensator = band_first_moment(model, u_cut, 1.0, cfg);
    }

    const std::size_t n = scheme.n();
    const double delta = scheme.delta_n();
    path.increments.assign(n, 0.0);
    Engine engine = make_engine(seed, options.replication, Substream::diffusion);
    boost::random::normal_distribution<double> normal;
    for (std::size_t i = 0; i < n; ++i) {
        const double mid = (static_cast<double>(i) + 0.5) * delta;
        const double b = coeffs.drift(mid);
        const double sigma = coeffs.vol(mid);
        if (std::abs(b) > coeffs.bound || std::abs(sigma) > coeffs.bound) {
            throw ConfigError("coefficients exceed their bound A = " + std::to_string(coeffs.bound) + " at t = " +
                              std::to_string(mid));
        }
        double inc = (b - compensator) * delta;
        const double var = (sigma * sigma + path.small_jump_variance_rate) * delta;
        if (var > 0.0) {
            inc += std::sqrt(var) * normal(engine);
        }
        path.increments[i] = inc;
    }
    add_jumps(path, simulate_jumps(model, scheme, u_cut, seed, options.replication, cfg));
    return path;
}

IncrementPath simulate_truncated_levy(const LevyModel& model, const ObservationScheme& scheme, std::uint64_t seed,
                                      std::uint64_t replication) {
    if (!(scheme.v_n() > 0.0)) {
        throw ConfigError("truncated Levy simulation requires v_n > 0");
    }
    IncrementPath path;
    path.seed = seed;
    path.replication = replication;
    path.scheme = scheme;
    path.u_cut = scheme.v_n();
    path.small_jumps = SmallJumpMode::off;
    path.increments.assign(scheme.n(), 0.0);
    add_jumps(path, simulate_jumps(model, scheme, scheme.v_n(), seed, replication, QuadratureConfig{}));
    return path;
}

void write_path_csv(const IncrementPath& path, std::ostream& os) {
    os << "index,increment,n_large_jumps\n";
    char buf[64];
    for (std::size_t i = 0; i < path.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", path.increments[i]);
        os << i << ',' << buf << ',' << path.n_large_jumps(i) << '\n';
    }
}

nlohmann::json path_metadata(const IncrementPath& path, const LevyModel& model) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(model.hash()));
    return {{"scheme", path.scheme.to_json()},
            {"delta_n", path.scheme.delta_n()},
            {"v_n", path.scheme.v_n()},
            {"seed", path.seed},
            {"replication", path.replication},
            {"model", model.to_json()},
            {"model_hash", hash},
            {"u_cut", path.u_cut},
            {"small_jumps", path.small_jumps == SmallJumpMode::gaussian ? "gaussian" : "off"},
            {"discarded_moment_ratio", path.discarded_moment_ratio},
            {"n_jumps", path.jump_sizes.size()}};
}

} // namespace levytrunc
