#pragma once

#include "levytrunc/levy_model.hpp"
#include "levytrunc/quadrature.hpp"
#include "levytrunc/rho.hpp"

#include <functional>
#include <span>

namespace levytrunc {

/// int g(x) 1{a < x <= b} nu(dx) over the support of nu. Extended reals are allowed for a and b.
/// `abs_breakpoints` are |x| locations where g has kinks or steep transitions.
QuadratureResult integrate_measure(const LevyModel& model, const std::function<double(double)>& g, double a,
                                   double b, const QuadratureConfig& cfg = {},
                                   std::span<const double> abs_breakpoints = {});

/// nu({|x| > v}). v = 0 is only valid for finite-activity models (InfiniteMassError otherwise).
double nu_tail_mass(const LevyModel& model, double v, const QuadratureConfig& cfg = {});

/// nu((v, inf)) when `positive`, nu((-inf, -v)) otherwise.
double nu_side_tail(const LevyModel& model, double v, bool positive, const QuadratureConfig& cfg = {});

/// N_rho(t) = int rho(x) 1{x <= t} nu(dx).
double n_rho(const LevyModel& model, const RhoFunction& rho, double t, const QuadratureConfig& cfg = {},
             std::span<const double> abs_breakpoints = {});

/// Time change c(t) = int rho^2(x) 1{x <= t} nu(dx) of the limit process.
double time_change(const LevyModel& model, const RhoFunction& rho, double t, const QuadratureConfig& cfg = {});

/// Limit covariance H_rho(u, v) = c(min(u, v)).
double h_cov(const LevyModel& model, const RhoFunction& rho, double u, double v, const QuadratureConfig& cfg = {});

/// Intrinsic semimetric d_rho(u, v) = sqrt(c(max) - c(min)). Negative residuals within abs_tol are
/// clamped to 0, larger ones raise NumericalError.
double d_rho(const LevyModel& model, const RhoFunction& rho, double u, double v, const QuadratureConfig& cfg = {});

/// int_{|x| <= u} x^2 nu(dx) (u may be +inf).
double truncated_second_moment(const LevyModel& model, double u, const QuadratureConfig& cfg = {});

/// int_{lo < |x| <= hi} x nu(dx), the compensator of jumps with sizes in that band.
double band_first_moment(const LevyModel& model, double lo, double hi, const QuadratureConfig& cfg = {});

} // namespace levytrunc
