#include "tvflow/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tvflow/error.hpp"
#include "tvflow/flow.hpp"

namespace tvflow {

PiecewiseLinear::PiecewiseLinear(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() != values_.size())
    fail(ErrorCode::InvalidProfile, "knots and values differ in length");
  if (knots_.size() == 1) fail(ErrorCode::InvalidProfile, "a profile needs at least two knots");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i]))
      fail(ErrorCode::InvalidProfile, "profile entries must be finite");
    if (i > 0 && !(knots_[i] > knots_[i - 1]))
      fail(ErrorCode::InvalidProfile, "knots must be strictly increasing");
  }
}

namespace {

// Value of the segment containing `probe`, extended affinely to x.
double segment_value(const PiecewiseLinear& f, double probe, double x) {
  const auto& xs = f.knots();
  const auto& ys = f.values();
  if (xs.empty() || probe < xs.front() || probe > xs.back()) return 0.0;
  auto it = std::upper_bound(xs.begin(), xs.end(), probe);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  if (i == xs.size()) i = xs.size() - 1;
  if (i == 0) i = 1;
  const double x0 = xs[i - 1];
  const double x1 = xs[i];
  const double s = (x - x0) / (x1 - x0);
  return ys[i - 1] + s * (ys[i] - ys[i - 1]);
}

double segment_area_above(double len, double ya, double yb, double h) {
  const double a = ya - h;
  const double b = yb - h;
  if (a >= 0.0 && b >= 0.0) return 0.5 * len * (a + b);
  if (a <= 0.0 && b <= 0.0) return 0.0;
  const double p = std::max(a, b);
  return 0.5 * len * p * p / std::abs(b - a);
}

double segment_width_above(double len, double ya, double yb, double h) {
  const double a = ya - h;
  const double b = yb - h;
  if (a > 0.0 && b > 0.0) return len;
  if (a <= 0.0 && b <= 0.0) return 0.0;
  return len * std::max(a, b) / std::abs(b - a);
}

void require_unimodal(const PiecewiseLinear& u0) {
  std::vector<double> s{0.0};
  for (double y : u0.values()) {
    if (y < 0.0) fail(ErrorCode::NotUnimodal, "profile takes negative values");
    if (y != s.back()) s.push_back(y);
  }
  if (s.back() != 0.0) s.push_back(0.0);
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] < s[i - 1] && s[i] < s[i + 1])
      fail(ErrorCode::NotUnimodal, "profile has more than one maximum component");
  }
}

}  // namespace

double PiecewiseLinear::operator()(double x) const {
  if (knots_.empty() || x < knots_.front() || x > knots_.back()) return 0.0;
  return segment_value(*this, x, x);
}

double PiecewiseLinear::mass() const {
  double m = 0.0;
  for (std::size_t i = 1; i < knots_.size(); ++i)
    m += 0.5 * (knots_[i] - knots_[i - 1]) * (values_[i] + values_[i - 1]);
  return m;
}

double PiecewiseLinear::max_value() const {
  double m = 0.0;
  for (double y : values_) m = std::max(m, y);
  return m;
}

double PiecewiseLinear::min_value() const {
  double m = 0.0;
  for (double y : values_) m = std::min(m, y);
  return m;
}

double area_above(const PiecewiseLinear& u0, double h) {
  const auto& xs = u0.knots();
  const auto& ys = u0.values();
  double a = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    a += segment_area_above(xs[i] - xs[i - 1], ys[i - 1], ys[i], h);
  return a;
}

double width_above(const PiecewiseLinear& u0, double h) {
  const auto& xs = u0.knots();
  const auto& ys = u0.values();
  double w = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    w += segment_width_above(xs[i] - xs[i - 1], ys[i - 1], ys[i], h);
  return w;
}

PiecewiseLinear cut_at(const PiecewiseLinear& u0, double h) {
  const auto& xs = u0.knots();
  const auto& ys = u0.values();
  std::vector<double> kx;
  std::vector<double> ky;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) {
      const double a = ys[i - 1] - h;
      const double b = ys[i] - h;
      if (a * b < 0.0) {
        const double x = xs[i - 1] + (xs[i] - xs[i - 1]) * (a / (a - b));
        if (x > kx.back() && x < xs[i]) {
          kx.push_back(x);
          ky.push_back(h);
        }
      }
    }
    kx.push_back(xs[i]);
    ky.push_back(std::min(ys[i], h));
  }
  if (kx.empty()) return {};
  return PiecewiseLinear(std::move(kx), std::move(ky));
}

LevelCut evolve_unimodal(const PiecewiseLinear& u0, double t) {
  require_unimodal(u0);
  const double T = 0.5 * u0.mass();
  // Times one rounding step past T (e.g. T * n / n) count as T.
  if (t > T && t <= T * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) t = T;
  if (!(t >= 0.0) || t > T) {
    std::ostringstream os;
    os << "time " << t << " outside [0, " << T << "]";
    fail(ErrorCode::BeyondExtinction, os.str());
  }
  LevelCut cut;
  cut.t = t;
  cut.component = u0.empty() ? Interval{0.0, 0.0} : Interval{u0.knots().front(), u0.knots().back()};
  const double target = 2.0 * t;

  std::vector<double> levels{0.0};
  for (double y : u0.values()) levels.push_back(y);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  double h;
  if (t == 0.0) {
    h = levels.back();
  } else if (t == T) {
    h = 0.0;
  } else {
    // A(h) decreases; find the band [L_j, L_{j+1}] with A(L_j) >= 2t > A(L_{j+1}).
    std::size_t j = 0;
    while (j + 2 < levels.size() && area_above(u0, levels[j + 1]) >= target) ++j;
    const double lo = levels[j];
    const double hi = levels[j + 1];
    const double d = hi - lo;
    // The width is affine on the band; read it off two interior points.
    const double w1 = width_above(u0, lo + 0.25 * d);
    const double w3 = width_above(u0, lo + 0.75 * d);
    const double slope = (w3 - w1) / (0.5 * d);
    const double w_lo = w1 - 0.25 * d * slope;
    const double c = area_above(u0, lo) - target;
    const double disc = std::max(0.0, w_lo * w_lo + 2.0 * slope * c);
    const double denom = w_lo + std::sqrt(disc);
    double delta = denom > 0.0 ? 2.0 * c / denom : d;
    h = std::clamp(lo + delta, lo, hi);
    const double w = width_above(u0, h);
    if (w > 0.0) h = std::clamp(h + (area_above(u0, h) - target) / w, lo, hi);
  }

  cut.level = h;
  cut.residual = std::abs(area_above(u0, h) - target);
  const double w = width_above(u0, h);
  cut.rate = w > 0.0 ? -2.0 / w : -kInf;
  cut.state = cut_at(u0, h);

  // Plateau {u0 >= h}.
  const auto& xs = u0.knots();
  const auto& ys = u0.values();
  double alpha = cut.component.lo;
  double beta = cut.component.hi;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] >= h) {
      alpha = xs[i];
      if (i > 0 && ys[i - 1] < h)
        alpha = xs[i - 1] + (xs[i] - xs[i - 1]) * (h - ys[i - 1]) / (ys[i] - ys[i - 1]);
      break;
    }
  }
  for (std::size_t i = xs.size(); i-- > 0;) {
    if (ys[i] >= h) {
      beta = xs[i];
      if (i + 1 < xs.size() && ys[i + 1] < h)
        beta = xs[i] + (xs[i + 1] - xs[i]) * (ys[i] - h) / (ys[i] - ys[i + 1]);
      break;
    }
  }
  cut.plateau = {alpha, beta};
  return cut;
}

Sandwich sandwich_monotone_pieces(const std::vector<MonotonePiece>& pieces, double eps,
                                  double left_tail, double right_tail) {
  if (!(eps > 0.0)) fail(ErrorCode::NonpositiveTolerance, "sandwich tolerance must be positive");
  std::vector<double> xs;
  std::vector<double> lower{left_tail};
  std::vector<double> upper{left_tail};
  for (const MonotonePiece& p : pieces) {
    if (!xs.empty() && p.x0 != xs.back())
      fail(ErrorCode::InvalidProfile, "monotone pieces must be contiguous");
    if (xs.empty()) xs.push_back(p.x0);
    const double dy = p.y1 - p.y0;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(dy) / eps)));
    double x_prev = p.x0;
    double y_prev = p.y0;
    for (std::size_t j = 1; j <= n; ++j) {
      double x;
      double y;
      if (j == n) {
        x = p.x1;
        y = p.y1;
      } else {
        y = p.y0 + dy * static_cast<double>(j) / static_cast<double>(n);
        x = std::clamp(p.inverse(y), x_prev, p.x1);
      }
      lower.push_back(std::min(y_prev, y));
      upper.push_back(std::max(y_prev, y));
      xs.push_back(x);
      x_prev = x;
      y_prev = y;
    }
  }
  lower.push_back(right_tail);
  upper.push_back(right_tail);
  if (xs.empty()) {
    lower = {left_tail};
    upper = {left_tail};
  }
  // The first entry of xs is the left end of the first piece.
  return {StepFunction::cauchy(xs, std::move(lower)), StepFunction::cauchy(xs, std::move(upper))};
}

Sandwich sandwich(const PiecewiseLinear& u0, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::NonpositiveTolerance, "sandwich tolerance must be positive");
  const auto& xs = u0.knots();
  const auto& ys = u0.values();
  std::vector<MonotonePiece> pieces;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double x0 = xs[i - 1];
    const double x1 = xs[i];
    const double y0 = ys[i - 1];
    const double y1 = ys[i];
    pieces.push_back({x0, x1, y0, y1, [=](double y) {
                        return y1 == y0 ? x0 : x0 + (x1 - x0) * (y - y0) / (y1 - y0);
                      }});
  }
  return sandwich_monotone_pieces(pieces, eps);
}

Sandwich sandwich(const StepFunction& u0, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::NonpositiveTolerance, "sandwich tolerance must be positive");
  return {u0, u0};
}

Bracket evolve_continuous(const PiecewiseLinear& u0, double t, double eps) {
  Sandwich s = sandwich(u0, eps);
  Bracket b;
  b.lower = advance(s.lower, t);
  b.upper = advance(s.upper, t);
  b.gap_inf = lp_distance(b.upper, b.lower, kInf);
  return b;
}

double holder_seminorm(const PiecewiseLinear& u, double alpha) {
  const auto& xs = u.knots();
  const auto& ys = u.values();
  double m = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      m = std::max(m, std::abs(ys[j] - ys[i]) / std::pow(xs[j] - xs[i], alpha));
  return m;
}

bool brackets(const Sandwich& s, const PiecewiseLinear& f, double tol) {
  std::vector<double> grid = merged_grid(s.lower, s.upper);
  grid.insert(grid.end(), f.knots().begin(), f.knots().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double a = grid[k];
    const double b = grid[k + 1];
    const double mid = a + 0.5 * (b - a);
    const double lo = s.lower(mid);
    const double hi = s.upper(mid);
    for (double x : {a, b}) {
      const double v = segment_value(f, mid, x);
      if (v < lo - tol || v > hi + tol) return false;
    }
  }
  return true;
}

}  // namespace tvflow
