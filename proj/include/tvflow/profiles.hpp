#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tvflow/stepfn.hpp"

namespace tvflow {

/// Continuous piecewise-linear profile on [x_0, x_M], zero outside.
/// End values may be nonzero, in which case the profile jumps there.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  /// Throws InvalidProfile on mismatched sizes, unsorted knots or
  /// non-finite entries.
  PiecewiseLinear(std::vector<double> knots, std::vector<double> values);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return knots_.size(); }
  bool empty() const { return knots_.empty(); }

  double operator()(double x) const;
  double mass() const;
  double max_value() const;
  double min_value() const;

  bool operator==(const PiecewiseLinear&) const = default;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// Solution near the single maximum: u(t) = min(u0, h(t)) with
/// int [u0 - h]_+ = 2t.
struct LevelCut {
  double t = 0.0;
  double level = 0.0;
  /// dh/dt = -2 / |{u0 > h}|.
  double rate = 0.0;
  /// [alpha, beta] where u(t) = h.
  Interval plateau;
  /// Support of u0 (the component the cut acts on).
  Interval component;
  /// |int [u0 - h]_+ - 2t|.
  double residual = 0.0;
  PiecewiseLinear state;
};

/// int [u0 - h]_+ dx, exact.
double area_above(const PiecewiseLinear& u0, double h);
/// |{u0 > h}|.
double width_above(const PiecewiseLinear& u0, double h);

/// Throws NotUnimodal (negative values or more than one maximum component)
/// and BeyondExtinction (t outside [0, mass/2]).
LevelCut evolve_unimodal(const PiecewiseLinear& u0, double t);

/// min(u0, h) as a profile.
PiecewiseLinear cut_at(const PiecewiseLinear& u0, double h);

struct Sandwich {
  StepFunction lower;
  StepFunction upper;
};

/// A monotone piece of a profile on [x0, x1] running from y0 to y1, with the
/// inverse map y -> x.
struct MonotonePiece {
  double x0, x1;
  double y0, y1;
  std::function<double(double)> inverse;
};

/// Step functions bracketing a profile made of monotone pieces: each piece is
/// cut at ceil(|y1 - y0| / eps) equally spaced levels. Pieces must be sorted
/// and non-overlapping; gaps between them take the tail values' neighbour.
Sandwich sandwich_monotone_pieces(const std::vector<MonotonePiece>& pieces, double eps,
                                  double left_tail = 0.0, double right_tail = 0.0);

/// lower <= u0 <= upper with ||upper - lower||_inf <= eps. Throws
/// NonpositiveTolerance.
Sandwich sandwich(const PiecewiseLinear& u0, double eps);
/// Step data are their own sandwich.
Sandwich sandwich(const StepFunction& u0, double eps);

struct Bracket {
  StepFunction lower;
  StepFunction upper;
  double gap_inf = 0.0;
};

/// Evolves both halves of the sandwich to time t.
Bracket evolve_continuous(const PiecewiseLinear& u0, double t, double eps);

/// max over knot pairs of |u(x) - u(y)| / |x - y|^alpha.
double holder_seminorm(const PiecewiseLinear& u, double alpha);

/// Pointwise lower <= f <= upper at the knots of f and at the midpoints of
/// the merged grid, within tol.
bool brackets(const Sandwich& s, const PiecewiseLinear& f, double tol);

}  // namespace tvflow
