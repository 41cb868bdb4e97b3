#include "tvflow/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tvflow/error.hpp"

namespace tvflow {

double rescaled_time(double T, double t) { return T * std::log(T / (T - t)); }

double original_time(double T, double s) { return T * (1.0 - std::exp(-s / T)); }

namespace {

void require_before_extinction(double T, double t) {
  if (!(t < T)) {
    std::ostringstream os;
    os << "time " << t << " is not before the extinction time " << T;
    fail(ErrorCode::AtOrPastExtinction, os.str());
  }
}

// int over a cell of |c + d x| for x in [0, L].
double abs_affine_integral(double c, double d, double L) {
  const double e = c + d * L;
  if (c >= 0.0 && e >= 0.0) return 0.5 * L * (c + e);
  if (c <= 0.0 && e <= 0.0) return -0.5 * L * (c + e);
  const double x0 = -c / d;
  return 0.5 * std::abs(c) * x0 + 0.5 * std::abs(e) * (L - x0);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

}  // namespace

RescaledState rescale(const Trajectory& traj, double t) {
  const double T = extinction_time(traj.initial());
  require_before_extinction(T, t);
  RescaledState r;
  r.T = T;
  r.s = rescaled_time(T, t);
  r.w = scale(traj.sample(t), T / (T - t));
  return r;
}

StepFunction StationaryProfile::as_step() const {
  return StepFunction::indicator(support.lo, support.hi, height);
}

StationaryProfile extinction_profile(const StepFunction& u0) {
  const double T = extinction_time(u0);
  auto supp = extended_support(u0);
  if (!supp) fail(ErrorCode::ZeroFunction, "the zero function has no extinction profile");
  StationaryProfile p;
  p.support = *supp;
  p.T = T;
  p.height = 2.0 * T / supp->length();
  return p;
}

double relative_error(const StepFunction& u, double T, Interval support, double t) {
  require_before_extinction(T, t);
  const StepFunction target = StepFunction::indicator(support.lo, support.hi,
                                                      2.0 / support.length());
  return lp_distance(scale(u, 1.0 / (T - t)), target, 1.0);
}

double relative_error(const Trajectory& traj, double t) {
  const StationaryProfile p = extinction_profile(traj.initial());
  require_before_extinction(p.T, t);
  return relative_error(traj.sample(t), p.T, p.support, t);
}

double time_derivative_bound(const StepFunction& u0, double t, double p) {
  if (!(t > 0.0)) return kInf;
  if (std::isinf(p)) return 2.0 * sup_norm(u0) / t;
  double norm = 0.0;
  for (std::size_t k = 0; k < u0.num_intervals(); ++k) {
    const double v = std::abs(u0.values()[k]);
    if (v == 0.0) continue;
    if (!u0.bounded(k)) return kInf;
    norm += std::pow(v, p) * u0.length(k);
  }
  return 2.0 * std::pow(norm, 1.0 / p) / t;
}

RateFunction sqrt_rate() {
  return {"sqrt", [](double s) { return std::sqrt(s); }, [](double y) { return y * y; }};
}

RateFunction identity_rate() {
  return {"identity", [](double s) { return s; }, [](double y) { return y; }};
}

RateFunction power_rate(double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    fail(ErrorCode::InvalidRateFunction, "power rate needs a positive finite exponent");
  std::ostringstream os;
  os << "pow:" << p;
  return {os.str(), [p](double s) { return std::pow(s, p); },
          [p](double y) { return std::pow(y, 1.0 / p); }};
}

RateFunction parse_rate(const std::string& spec) {
  if (spec == "sqrt") return sqrt_rate();
  if (spec == "identity") return identity_rate();
  if (spec.rfind("pow:", 0) == 0) {
    const std::string num = spec.substr(4);
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size())
      fail(ErrorCode::InvalidRateFunction, "cannot parse exponent in '" + spec + "'");
    return power_rate(p);
  }
  fail(ErrorCode::InvalidRateFunction, "unknown rate function '" + spec + "'");
}

RateMode parse_rate_mode(const std::string& spec) {
  if (spec == "no-rate") return RateMode::NoRate;
  if (spec == "fast-rate") return RateMode::FastRate;
  fail(ErrorCode::InvalidRateFunction, "unknown rate mode '" + spec + "'");
}

const char* to_string(RateMode mode) {
  return mode == RateMode::NoRate ? "no-rate" : "fast-rate";
}

void validate_rate(const RateFunction& xi, RateMode mode) {
  if (!xi.xi || !xi.xi_inv) fail(ErrorCode::InvalidRateFunction, "rate function is incomplete");
  if (std::abs(xi.xi(0.0)) > 1e-15) fail(ErrorCode::InvalidRateFunction, "xi(0) must be 0");
  constexpr int n = 1000;
  double prev = xi.xi(0.0);
  for (int i = 1; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    const double v = xi.xi(s);
    if (!(v > prev)) fail(ErrorCode::InvalidRateFunction, "xi must increase strictly on [0, 1]");
    if (std::abs(xi.xi_inv(v) - s) > 1e-9 * (1.0 + s))
      fail(ErrorCode::InvalidRateFunction, "xi_inv is not the inverse of xi");
    if (mode == RateMode::NoRate && v < s - 1e-15)
      fail(ErrorCode::InvalidRateFunction, "no-rate construction needs xi(s) >= s on [0, 1]");
    if (mode == RateMode::FastRate && v > s + 1e-15)
      fail(ErrorCode::InvalidRateFunction, "fast-rate construction needs xi(s) <= s on [0, 1]");
    prev = v;
  }
}

double rate_constant(const RateFunction& xi) { return 1.0 / xi.xi_inv(0.25); }

double rate_profile_mass(const RateFunction& xi, double tol) {
  const double c0 = rate_constant(xi);
  const double rise = integrate([&](double x) { return c0 * xi.xi_inv(x); }, 0.0, 0.25, tol);
  return 2.0 * rise + 0.5;
}

PiecewiseLinear build_rate_profile(const RateFunction& xi, RateMode mode, double mass_tol) {
  validate_rate(xi, mode);
  const double c0 = rate_constant(xi);
  const double exact = rate_profile_mass(xi);
  for (std::size_t n = 8;; n *= 2) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i <= n; ++i) {
      const double x = 0.25 * static_cast<double>(i) / static_cast<double>(n);
      xs.push_back(x);
      ys.push_back(i == n ? 1.0 : c0 * xi.xi_inv(x));
    }
    for (std::size_t i = n + 1; i-- > 0;) {
      xs.push_back(1.0 - xs[i]);
      ys.push_back(ys[i]);
    }
    PiecewiseLinear pl(std::move(xs), std::move(ys));
    if (std::abs(pl.mass() - exact) < mass_tol || n >= (std::size_t{1} << 22)) return pl;
  }
}

RateReport verify_rate(const RateFunction& xi, RateMode mode,
                       const std::vector<double>& remaining, double eps) {
  RateReport rep;
  rep.xi = xi.name;
  rep.mode = mode;
  rep.eps = eps;
  const PiecewiseLinear pl = build_rate_profile(xi, mode);
  rep.c0 = rate_constant(xi);
  rep.T = 0.5 * pl.mass();
  rep.profile_mass_error = std::abs(pl.mass() - rate_profile_mass(xi));

  std::vector<double> rs(remaining);
  std::sort(rs.begin(), rs.end(), std::greater<>());
  std::vector<double> times;
  for (double r : rs)
    if (rep.T - r >= 0.0) times.push_back(rep.T - r);

  const Sandwich s = sandwich(pl, eps);
  const auto lows = states_at(s.lower, times);
  const auto highs = states_at(s.upper, times);
  const StepFunction target = StepFunction::indicator(0.0, 1.0, 2.0);

  std::size_t idx = 0;
  for (double r : rs) {
    RateSample smp;
    smp.remaining = r;
    smp.t = rep.T - r;
    smp.xi_remaining = xi.xi(r);
    smp.bound = mode == RateMode::NoRate ? 2.0 * xi.xi(r) : xi.xi(8.0 * r);
    smp.alpha0_formula = xi.xi(2.0 * r / rep.c0);
    if (smp.t < 0.0) {
      smp.applicable = false;
      rep.samples.push_back(smp);
      continue;
    }
    const StepFunction& lo = lows[idx];
    const StepFunction& hi = highs[idx];
    ++idx;

    // Certified bracket of || u / r - 2 chi ||_1 from lo <= u <= hi.
    std::vector<double> grid = merged_grid(lo, hi);
    grid.push_back(0.0);
    grid.push_back(1.0);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const double a = grid[k];
      const double b = grid[k + 1];
      const double mid = a + 0.5 * (b - a);
      const double g = target(mid);
      const double l = lo(mid) / r - g;
      const double u = hi(mid) / r - g;
      smp.error_lower += std::max({0.0, l, -u}) * (b - a);
      smp.error_upper += std::max(std::abs(l), std::abs(u)) * (b - a);
    }
    smp.sup_lower = sup_norm(lo);
    smp.sup_upper = sup_norm(hi);
    smp.sup_pass = 2.0 * r <= smp.sup_lower && smp.sup_upper <= 4.0 * r;
    smp.bound_pass = mode == RateMode::NoRate ? smp.bound <= smp.error_lower
                                              : smp.error_upper <= smp.bound;

    // Explicit solution min(u0, h(t)) for comparison.
    const LevelCut cut = evolve_unimodal(pl, smp.t);
    const auto& xs = cut.state.knots();
    const auto& ys = cut.state.values();
    double exact = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double L = xs[i] - xs[i - 1];
      const double c = ys[i - 1] / r - 2.0;
      const double e = ys[i] / r - 2.0;
      exact += abs_affine_integral(c, (e - c) / L, L);
    }
    smp.error_exact = exact;

    // alpha0: where the rising part of u0 reaches 2r.
    const double level = 2.0 * r;
    smp.alpha0 = 0.25;
    const auto& px = pl.knots();
    const auto& py = pl.values();
    for (std::size_t i = 1; i < px.size() && px[i] <= 0.25; ++i) {
      if (py[i] >= level) {
        smp.alpha0 = px[i - 1] + (px[i] - px[i - 1]) * (level - py[i - 1]) / (py[i] - py[i - 1]);
        break;
      }
    }
    rep.samples.push_back(smp);
  }
  return rep;
}

}  // namespace tvflow
