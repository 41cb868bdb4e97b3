#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace tvflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class BoundaryMode { Cauchy, Neumann };

/// Closed/open interval [lo, hi]; endpoints may be infinite.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  double length() const { return hi - lo; }
  bool bounded() const { return lo > -kInf && hi < kInf; }
  bool operator==(const Interval&) const = default;

  static Interval whole_line() { return {-kInf, kInf}; }
};

enum class ExtremumTag { LocalMax, LocalMin, Monotone, Boundary };

/// Piecewise-constant function with finitely many jumps.
///
/// Interval k is the open interval (x_{k-1}, x_k), where x_{-1} and x_M are
/// the domain ends; there are breakpoints().size() + 1 intervals. In Cauchy
/// mode the domain is the whole line and the first/last intervals are the
/// unbounded tails. In Neumann mode the domain is a bounded [a, b] and all
/// breakpoints lie strictly inside it.
///
/// Instances are always normalized: breakpoints strictly increase and
/// adjacent values differ.
class StepFunction {
 public:
  /// The zero function on the line.
  StepFunction();

  static StepFunction cauchy(std::vector<double> breakpoints, std::vector<double> values);
  static StepFunction neumann(Interval domain, std::vector<double> breakpoints,
                              std::vector<double> values);
  static StepFunction constant(double value);
  /// c * indicator of [lo, hi] on the line.
  static StepFunction indicator(double lo, double hi, double c = 1.0);

  BoundaryMode mode() const { return mode_; }
  Interval domain() const { return domain_; }
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  std::size_t num_intervals() const { return values_.size(); }

  Interval interval(std::size_t k) const;
  double length(std::size_t k) const { return interval(k).length(); }
  bool bounded(std::size_t k) const { return interval(k).bounded(); }

  /// Value at x; at a breakpoint the right limit is returned.
  double operator()(double x) const;

  bool operator==(const StepFunction&) const = default;

 private:
  friend StepFunction normalize(BoundaryMode, Interval, std::vector<double>, std::vector<double>);

  BoundaryMode mode_ = BoundaryMode::Cauchy;
  Interval domain_ = Interval::whole_line();
  std::vector<double> breakpoints_;
  std::vector<double> values_{0.0};
};

/// Builds a normalized step function from raw lists: zero-length intervals
/// are dropped and equal neighbours merged. Throws NonSortedBreakpoints,
/// LengthMismatch, InvalidDomain or NonFiniteValue.
StepFunction normalize(BoundaryMode mode, Interval domain, std::vector<double> breakpoints,
                       std::vector<double> values);

/// Sum of value * length over all intervals. Throws InfiniteMass when a
/// nonzero value sits on an unbounded interval.
double mass(const StepFunction& u);

/// sup - inf of the values on intervals meeting the open interval I.
double oscillation(const StepFunction& u, Interval I);

/// Sum of absolute jumps, tails included.
double total_variation(const StepFunction& u);

std::vector<ExtremumTag> classify(const StepFunction& u);
std::size_t extrema_count(const StepFunction& u);

/// Smallest closed interval containing {u != 0}; nullopt for u = 0. In
/// Cauchy mode a nonzero tail yields an infinite endpoint.
std::optional<Interval> extended_support(const StepFunction& u);

/// ||u - v||_p for p in [1, inf] on the merged breakpoint grid.
double lp_distance(const StepFunction& u, const StepFunction& v, double p);

double sup_norm(const StepFunction& u);
bool is_nonnegative(const StepFunction& u);
/// Cauchy mode with both tails equal to zero.
bool is_compactly_supported(const StepFunction& u);

StepFunction scale(const StepFunction& u, double factor);

/// Union of the breakpoints of u and v, sorted and deduplicated.
std::vector<double> merged_grid(const StepFunction& u, const StepFunction& v);

const char* to_string(ExtremumTag tag);
const char* to_string(BoundaryMode mode);

}  // namespace tvflow
