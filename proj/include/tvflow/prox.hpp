#pragma once

#include <cstddef>
#include <vector>

#include "tvflow/stepfn.hpp"

namespace tvflow {

/// Dual field z of one implicit-Euler step, sampled at the breakpoints of u0.
///
/// z is affine on every interval of u0 with h * z' = u_h - u0. In Cauchy mode
/// z is constant on the tails; the values there are only pinned where u_h
/// jumps, so exterior_constrained is false.
struct DualCertificate {
  double h = 0.0;
  std::vector<double> positions;
  std::vector<double> z;
  /// z at the domain ends (0 in Neumann mode; tail constants in Cauchy mode).
  double z_left = 0.0;
  double z_right = 0.0;
  bool exterior_constrained = false;
};

struct CertificateResiduals {
  double feasibility = 0.0;  ///< max(0, max|z| - 1)
  double jump_sign = 0.0;    ///< max |z - sign(jump)| over jumps of u_h
  double flux = 0.0;         ///< max |h * slope(z) - (u_h - u0)|
  double boundary = 0.0;     ///< |z| at Neumann ends
  double max() const;
};

struct ProxResult {
  StepFunction u_h;
  DualCertificate certificate;
  double objective = 0.0;
};

/// Exact minimizer of TV(u) + sum_k |I_k| (u_k - u0_k)^2 / (2h) over step
/// functions on the grid of u0. Cauchy tails stay at their values. Throws
/// NonpositiveStep and UnboundedProblem (non-finite data).
ProxResult tv_prox(const StepFunction& u0, double h);

/// TV(u) + int (u - u0)^2 / (2h); +inf if u differs from u0 on a tail.
double prox_objective(const StepFunction& u0, const StepFunction& u, double h);

CertificateResiduals check_certificate(const StepFunction& u0, const ProxResult& result);

/// int_I (uh - u0).
double local_mass_shift(const StepFunction& u0, const StepFunction& uh, Interval I);

struct BruteForceOptions {
  long max_sweeps = 2'000'000;
  double gap_tolerance = 1e-10;
  double step_tolerance = 1e-14;
};

struct BruteForceResult {
  StepFunction u_h;
  std::vector<double> z;
  double duality_gap = 0.0;
  long sweeps = 0;
};

/// Reference solver: cyclic projected coordinate descent on the dual box
/// problem, followed by an exact solve on the identified fused blocks.
/// Throws NotConverged.
BruteForceResult brute_force_prox(const StepFunction& u0, double h,
                                  const BruteForceOptions& options = {});

/// steps-fold iteration of tv_prox.
StepFunction discrete_flow(const StepFunction& u0, double h, std::size_t steps);

/// min_j |a_j - a_{j+1}| * min(|I_j|, |I_{j+1}|) over all adjacent pairs.
double small_step_bound(const StepFunction& u0);

/// Interval values after ell steps of size h by the local extremum rule:
/// maxima drop by 2 ell h / |I|, minima rise by as much, the rest stay.
/// Cauchy tails are kept; Neumann ends move by ell h / |I_end| toward the
/// neighbour.
StepFunction closed_form_steps(const StepFunction& u0, double h, std::size_t steps);

}  // namespace tvflow
