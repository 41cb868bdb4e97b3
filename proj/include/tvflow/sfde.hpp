#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tvflow/profiles.hpp"
#include "tvflow/stepfn.hpp"

namespace tvflow {

struct Atom {
  double x = 0.0;
  double a = 0.0;
  bool operator==(const Atom&) const = default;
};

/// Finite sum of point masses with strictly increasing positions and
/// nonzero weights. Atoms at equal positions are summed.
class DeltaMeasure {
 public:
  DeltaMeasure() = default;
  explicit DeltaMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  bool operator==(const DeltaMeasure&) const = default;

 private:
  std::vector<Atom> atoms_;
};

enum class SfdeMode { Cauchy, Dirichlet };

struct SfdeProblem {
  SfdeMode mode = SfdeMode::Cauchy;
  Interval domain = Interval::whole_line();  ///< [a, b] in Dirichlet mode
};

/// u0(x) = v0((-inf, x]), left tail 0.
StepFunction integrate(const DeltaMeasure& v);
/// Same, as Neumann data on [a, b]. Throws AtomOutsideDomain.
StepFunction integrate_on(const DeltaMeasure& v, Interval domain);
/// Atoms at the breakpoints weighted by the jumps.
DeltaMeasure differentiate(const StepFunction& u);

/// Flow route: differentiate(evolve(integrate(v0), t)).
DeltaMeasure evolve_via_tvf(const DeltaMeasure& v0, double t, const SfdeProblem& problem = {});

/// Direct atom dynamics. |a_i| shrinks at rate
///   2 [s_{i-1} != s_i] / (x_i - x_{i-1}) + 2 [s_{i+1} != s_i] / (x_{i+1} - x_i),
/// missing neighbours contributing nothing in Cauchy mode and 1 / gap to the
/// domain end in Dirichlet mode; rates are recomputed whenever an atom dies.
/// Dirichlet mode needs positive weights (DirichletSignedAtoms).
DeltaMeasure evolve_deltas(const DeltaMeasure& v0, double t, const SfdeProblem& problem = {});

/// Time at which the direct dynamics leave no atoms (inf if never).
double deltas_extinction_time(const DeltaMeasure& v0, const SfdeProblem& problem = {});

double total_mass(const DeltaMeasure& v);
/// Zero total mass (within 1e-12 relative to the total variation).
bool extinguishes(const DeltaMeasure& v);

/// Delta of weight alpha at x = 0 next to a continuous density rho given as a
/// profile, in the configuration where integrating yields one maximum
/// component (holding the atom) followed by one minimum component.
struct MixedProblem {
  DeltaMeasure atoms;
  PiecewiseLinear density;
};

struct MixedReport {
  double t = 0.0;
  double eps = 0.0;
  StepFunction lower;
  StepFunction upper;
  double gap_inf = 0.0;
  double max_level = 0.0;  ///< level of the cut at the maximum
  double min_level = 0.0;  ///< level of the fill at the minimum
  double atom_weight = 0.0;
  bool merged = false;  ///< t >= t1
  double t0 = 0.0;          ///< measured atom extinction time
  double t0_nominal = 0.0;  ///< alpha / 2
  double t1 = 0.0;
  double z_left = 0.0;  ///< left end of the maximum plateau
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 0.0;
  double area_residual = 0.0;
  double B0 = 0.0;
  double B1 = 0.0;
  double B2 = 0.0;
  bool exact_inside_bracket = false;
};

/// Default instance: hat density on [-1, 0], zero on [0, 0.5], negative
/// triangle on [0.5, 1.5], positive triangle on [1.5, 3.5], atom 0.1 at 0.
MixedProblem default_mixed_problem();

/// Certified bracket of the integrated solution plus the level-cut
/// diagnostics; eps = 0 skips the bracket. Throws UnsupportedConfiguration
/// when the data do not have the atom-maximum / minimum layout.
MixedReport evolve_mixed(const MixedProblem& problem, double t, double eps);

}  // namespace tvflow
