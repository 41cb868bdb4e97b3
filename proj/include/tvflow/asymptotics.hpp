#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tvflow/flow.hpp"
#include "tvflow/profiles.hpp"
#include "tvflow/stepfn.hpp"

namespace tvflow {

struct RescaledState {
  StepFunction w;
  double s = 0.0;
  double T = 0.0;
};

/// s = T log(T / (T - t)).
double rescaled_time(double T, double t);
/// t = T (1 - exp(-s / T)).
double original_time(double T, double s);

/// w(s) = T / (T - t) u(t). Throws AtOrPastExtinction for t >= T.
RescaledState rescale(const Trajectory& traj, double t);

struct StationaryProfile {
  Interval support;
  double T = 0.0;
  double height = 0.0;  ///< 2T / (b - a)
  StepFunction as_step() const;
};

/// Throws ZeroFunction, SignedData, NotCompactlySupported.
StationaryProfile extinction_profile(const StepFunction& u0);

/// || u / (T - t) - 2 chi_[a,b] / (b - a) ||_1 for a state u at time t.
double relative_error(const StepFunction& u, double T, Interval support, double t);
double relative_error(const Trajectory& traj, double t);

/// 2 ||u0||_p / t, the bound on ||d/dt u(t)||_p from homogeneity.
double time_derivative_bound(const StepFunction& u0, double t, double p);

enum class RateMode { NoRate, FastRate };

struct RateFunction {
  std::string name;
  std::function<double(double)> xi;
  std::function<double(double)> xi_inv;
};

RateFunction sqrt_rate();
RateFunction identity_rate();
RateFunction power_rate(double p);
/// "sqrt", "identity" or "pow:<p>". Throws InvalidRateFunction.
RateFunction parse_rate(const std::string& spec);
RateMode parse_rate_mode(const std::string& spec);
const char* to_string(RateMode mode);

/// Checks xi(0) = 0, strict increase on [0, 1], xi_inv o xi = id and the
/// mode's comparison with the identity on a grid. Throws InvalidRateFunction.
void validate_rate(const RateFunction& xi, RateMode mode);

/// c0 = 1 / xi_inv(1/4).
double rate_constant(const RateFunction& xi);

/// c0 xi_inv(x) on [0, 1/4], 1 on [1/4, 3/4], mirrored on [3/4, 1], sampled
/// adaptively until the mass error is below mass_tol.
PiecewiseLinear build_rate_profile(const RateFunction& xi, RateMode mode,
                                   double mass_tol = 1e-6);

/// int_0^1 of the exact profile (adaptive Simpson).
double rate_profile_mass(const RateFunction& xi, double tol = 1e-13);

struct RateSample {
  double t = 0.0;
  double remaining = 0.0;  ///< T - t
  bool applicable = true;  ///< false when T - t > T (time would be negative)
  double error_lower = 0.0;
  double error_upper = 0.0;
  double error_exact = 0.0;  ///< from the explicit level cut
  double bound = 0.0;        ///< 2 xi(T - t), or xi(8 (T - t)) in fast mode
  bool bound_pass = false;
  double sup_lower = 0.0;
  double sup_upper = 0.0;
  bool sup_pass = false;
  double alpha0 = 0.0;           ///< point where u0 = 2 (T - t) on [0, 1/4]
  double alpha0_formula = 0.0;   ///< xi(2 (T - t) / c0)
  double xi_remaining = 0.0;     ///< xi(T - t)
};

struct RateReport {
  std::string xi;
  RateMode mode = RateMode::NoRate;
  double c0 = 0.0;
  double T = 0.0;
  double eps = 0.0;
  double profile_mass_error = 0.0;
  std::vector<RateSample> samples;
};

/// Evolves the rate profile through a certified sandwich of width eps and
/// compares the relative error with the rate bound at each T - t.
RateReport verify_rate(const RateFunction& xi, RateMode mode,
                       const std::vector<double>& remaining, double eps);

}  // namespace tvflow
