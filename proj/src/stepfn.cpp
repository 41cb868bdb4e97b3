#include "tvflow/stepfn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tvflow/error.hpp"

namespace tvflow {

namespace {

void check_finite(const std::vector<double>& xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) {
      std::ostringstream os;
      os << what << " contains a non-finite entry";
      fail(ErrorCode::NonFiniteValue, os.str());
    }
  }
}

}  // namespace

StepFunction::StepFunction() = default;

StepFunction StepFunction::cauchy(std::vector<double> breakpoints, std::vector<double> values) {
  return normalize(BoundaryMode::Cauchy, Interval::whole_line(), std::move(breakpoints),
                   std::move(values));
}

StepFunction StepFunction::neumann(Interval domain, std::vector<double> breakpoints,
                                   std::vector<double> values) {
  return normalize(BoundaryMode::Neumann, domain, std::move(breakpoints), std::move(values));
}

StepFunction StepFunction::constant(double value) { return cauchy({}, {value}); }

StepFunction StepFunction::indicator(double lo, double hi, double c) {
  return cauchy({lo, hi}, {0.0, c, 0.0});
}

Interval StepFunction::interval(std::size_t k) const {
  const double lo = k == 0 ? domain_.lo : breakpoints_[k - 1];
  const double hi = k == breakpoints_.size() ? domain_.hi : breakpoints_[k];
  return {lo, hi};
}

double StepFunction::operator()(double x) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

StepFunction normalize(BoundaryMode mode, Interval domain, std::vector<double> breakpoints,
                       std::vector<double> values) {
  if (values.size() != breakpoints.size() + 1) {
    std::ostringstream os;
    os << "expected " << breakpoints.size() + 1 << " values for " << breakpoints.size()
       << " breakpoints, got " << values.size();
    fail(ErrorCode::LengthMismatch, os.str());
  }
  check_finite(breakpoints, "breakpoints");
  check_finite(values, "values");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i] < breakpoints[i - 1]) {
      std::ostringstream os;
      os << "breakpoint " << i << " (" << breakpoints[i] << ") precedes breakpoint " << i - 1
         << " (" << breakpoints[i - 1] << ")";
      fail(ErrorCode::NonSortedBreakpoints, os.str());
    }
  }

  if (mode == BoundaryMode::Cauchy) {
    domain = Interval::whole_line();
  } else {
    if (!std::isfinite(domain.lo) || !std::isfinite(domain.hi) || !(domain.lo < domain.hi))
      fail(ErrorCode::InvalidDomain, "neumann domain must be a bounded interval with a < b");
    for (double x : breakpoints) {
      if (x < domain.lo || x > domain.hi)
        fail(ErrorCode::InvalidDomain, "breakpoint outside the neumann domain");
    }
  }

  // Drop zero-length intervals. A breakpoint equal to a domain end removes the
  // degenerate end interval; repeated breakpoints remove the interval between.
  std::vector<double> xs;
  std::vector<double> vs;
  xs.reserve(breakpoints.size());
  vs.reserve(values.size());
  std::size_t first = 0;
  while (first < breakpoints.size() && breakpoints[first] == domain.lo) ++first;
  vs.push_back(values[first]);
  std::size_t last = breakpoints.size();
  while (last > first && breakpoints[last - 1] == domain.hi) --last;
  for (std::size_t i = first; i < last; ++i) {
    if (!xs.empty() && xs.back() == breakpoints[i]) {
      vs.back() = values[i + 1];
      continue;
    }
    xs.push_back(breakpoints[i]);
    vs.push_back(values[i + 1]);
  }
  if (last < breakpoints.size()) vs.back() = values[last];

  StepFunction out;
  out.mode_ = mode;
  out.domain_ = domain;
  out.breakpoints_.clear();
  out.values_.clear();
  out.values_.push_back(vs[0]);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (vs[i + 1] == out.values_.back()) continue;
    out.breakpoints_.push_back(xs[i]);
    out.values_.push_back(vs[i + 1]);
  }
  return out;
}

double mass(const StepFunction& u) {
  double total = 0.0;
  for (std::size_t k = 0; k < u.num_intervals(); ++k) {
    const double v = u.values()[k];
    if (v == 0.0) continue;
    if (!u.bounded(k)) fail(ErrorCode::InfiniteMass, "nonzero value on an unbounded interval");
    total += v * u.length(k);
  }
  return total;
}

double oscillation(const StepFunction& u, Interval I) {
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t k = 0; k < u.num_intervals(); ++k) {
    const Interval J = u.interval(k);
    if (std::max(J.lo, I.lo) < std::min(J.hi, I.hi)) {
      lo = std::min(lo, u.values()[k]);
      hi = std::max(hi, u.values()[k]);
    }
  }
  if (lo > hi) fail(ErrorCode::EmptyIntersection, "interval does not meet the domain");
  return hi - lo;
}

double total_variation(const StepFunction& u) {
  double tv = 0.0;
  auto vs = u.values();
  for (std::size_t k = 1; k < vs.size(); ++k) tv += std::abs(vs[k] - vs[k - 1]);
  return tv;
}

std::vector<ExtremumTag> classify(const StepFunction& u) {
  auto vs = u.values();
  const std::size_t n = vs.size();
  std::vector<ExtremumTag> tags(n, ExtremumTag::Monotone);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || k + 1 == n) {
      if (u.mode() == BoundaryMode::Neumann) tags[k] = ExtremumTag::Boundary;
      continue;
    }
    if (vs[k] > vs[k - 1] && vs[k] > vs[k + 1]) tags[k] = ExtremumTag::LocalMax;
    else if (vs[k] < vs[k - 1] && vs[k] < vs[k + 1]) tags[k] = ExtremumTag::LocalMin;
  }
  return tags;
}

std::size_t extrema_count(const StepFunction& u) {
  auto tags = classify(u);
  return static_cast<std::size_t>(std::count_if(tags.begin(), tags.end(), [](ExtremumTag t) {
    return t == ExtremumTag::LocalMax || t == ExtremumTag::LocalMin;
  }));
}

std::optional<Interval> extended_support(const StepFunction& u) {
  auto vs = u.values();
  std::size_t first = vs.size();
  std::size_t last = 0;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    if (vs[k] != 0.0) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first == vs.size()) return std::nullopt;
  return Interval{u.interval(first).lo, u.interval(last).hi};
}

std::vector<double> merged_grid(const StepFunction& u, const StepFunction& v) {
  std::vector<double> grid;
  grid.reserve(u.breakpoints().size() + v.breakpoints().size());
  std::merge(u.breakpoints().begin(), u.breakpoints().end(), v.breakpoints().begin(),
             v.breakpoints().end(), std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

double lp_distance(const StepFunction& u, const StepFunction& v, double p) {
  if (u.mode() != v.mode() || u.domain() != v.domain())
    fail(ErrorCode::ModeMismatch, "step functions live on different domains");
  if (!(p >= 1.0)) fail(ErrorCode::InfiniteNorm, "p must be at least 1");
  const auto grid = merged_grid(u, v);
  const Interval dom = u.domain();
  double acc = 0.0;
  for (std::size_t k = 0; k <= grid.size(); ++k) {
    const double lo = k == 0 ? dom.lo : grid[k - 1];
    const double hi = k == grid.size() ? dom.hi : grid[k];
    // A representative point strictly inside the cell.
    double x;
    if (std::isinf(lo) && std::isinf(hi)) x = 0.0;
    else if (std::isinf(lo)) x = hi - 1.0;
    else if (std::isinf(hi)) x = lo + 1.0;
    else x = lo + 0.5 * (hi - lo);
    const double d = std::abs(u(x) - v(x));
    if (std::isinf(p)) {
      acc = std::max(acc, d);
      continue;
    }
    if (d == 0.0) continue;
    if (std::isinf(hi - lo)) fail(ErrorCode::InfiniteNorm, "difference is nonzero on an unbounded cell");
    acc += std::pow(d, p) * (hi - lo);
  }
  if (std::isinf(p) || p == 1.0) return acc;
  return std::pow(acc, 1.0 / p);
}

double sup_norm(const StepFunction& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

bool is_nonnegative(const StepFunction& u) {
  auto vs = u.values();
  return std::all_of(vs.begin(), vs.end(), [](double v) { return v >= 0.0; });
}

bool is_compactly_supported(const StepFunction& u) {
  auto vs = u.values();
  return u.mode() == BoundaryMode::Cauchy && vs.front() == 0.0 && vs.back() == 0.0;
}

StepFunction scale(const StepFunction& u, double factor) {
  std::vector<double> vs(u.values().begin(), u.values().end());
  for (double& v : vs) v *= factor;
  return normalize(u.mode(), u.domain(), {u.breakpoints().begin(), u.breakpoints().end()},
                   std::move(vs));
}

const char* to_string(ExtremumTag tag) {
  switch (tag) {
    case ExtremumTag::LocalMax: return "LocalMax";
    case ExtremumTag::LocalMin: return "LocalMin";
    case ExtremumTag::Monotone: return "Monotone";
    case ExtremumTag::Boundary: return "Boundary";
  }
  return "?";
}

const char* to_string(BoundaryMode mode) {
  return mode == BoundaryMode::Cauchy ? "cauchy" : "neumann";
}

}  // namespace tvflow
