#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace levytrunc {

/// Growth index varpi of the truncation level v_n = gamma * Delta_n^varpi.
inline constexpr double kTruncationExponent = 0.125;

/// Constants of the simple sufficient condition on (beta, zeta, tau).
struct PrimaryConstants {
    double beta = 0.0;
    double zeta = 0.0;
    double tau = 0.0;
    double p = 0.0;
    double varpi = kTruncationExponent;
    double t1 = 0.0;
    double t2 = 0.0;
    int m = 0;
};

/// Constants of the general condition, derived from PrimaryConstants.
struct AlternateConstants {
    double r = 0.0;
    double varpi_r = 0.0;
    double varpi_v = 0.0;
    double q = 0.0;
    double epsilon = 0.0;
    double ell_tilde = 0.0;
    double ell = 0.0;
    int m_alt = 0;
};

struct SchemeCheckReport {
    double y = 0.0;
    bool passed = false;
    std::vector<std::string> violated;
    /// Positive slack means the condition holds.
    std::map<std::string, double> margins;
};

/// Throws ConfigError naming the violated inequality unless 0 < beta < 2 and 0 < zeta < tau < 1/16.
PrimaryConstants derive_primary(double beta, double zeta, double tau);

/// Throws NumericalError if any of the implied inequalities fails (an arithmetic bug).
AlternateConstants derive_alternate(const PrimaryConstants& pc);

/// Checks Delta_n = n^{-y} against the window t1 < y < t2 and the seven rate conditions, all in
/// exponent arithmetic: n Delta_n^a -> 0 iff y a > 1 and -> inf iff y a < 1.
SchemeCheckReport check_scheme(const PrimaryConstants& pc, double y);

/// Midpoint of the admissible window.
double conforming_y(const PrimaryConstants& pc);

/// Named slacks of the inequality chain
///   1 < 1 + 2 varpi_r - 2 varpi < 1/t2 < 1/t1 < min(2 p varpi_v - 1, 1 + q/2, 1 + 2 varpi)
///     < 2 - 2 r varpi (1 + epsilon).
std::vector<std::pair<std::string, double>> inequality_chain(const PrimaryConstants& pc,
                                                              const AlternateConstants& ac);

nlohmann::json to_json(const PrimaryConstants& pc);
nlohmann::json to_json(const AlternateConstants& ac);
nlohmann::json to_json(const SchemeCheckReport& r);

/// Full constants report as emitted by `check-conditions`.
nlohmann::json constants_report(const PrimaryConstants& pc, const AlternateConstants& ac,
                                const std::optional<SchemeCheckReport>& scheme);
std::string constants_table(const PrimaryConstants& pc, const AlternateConstants& ac,
                            const std::optional<SchemeCheckReport>& scheme);

} // namespace levytrunc
