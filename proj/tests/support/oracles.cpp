#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace oracle {

using tvflow::BoundaryMode;
using tvflow::StepFunction;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double sgn(double d) { return d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0); }

struct Raw {
  BoundaryMode mode;
  tvflow::Interval dom;
  std::vector<double> x;
  std::vector<double> v;

  double len(std::size_t k) const {
    const double lo = k == 0 ? dom.lo : x[k - 1];
    const double hi = k == x.size() ? dom.hi : x[k];
    return hi - lo;
  }
  bool tail(std::size_t k) const {
    return mode == BoundaryMode::Cauchy && (k == 0 || k == x.size());
  }
  StepFunction build() const {
    if (mode == BoundaryMode::Cauchy) return StepFunction::cauchy(x, v);
    return StepFunction::neumann(dom, x, v);
  }
};

Raw raw(const StepFunction& u) {
  Raw r{u.mode(), u.domain(), {}, {}};
  r.x.assign(u.breakpoints().begin(), u.breakpoints().end());
  r.v.assign(u.values().begin(), u.values().end());
  return r;
}

}  // namespace

StepFunction naive_evolve(const StepFunction& u0, double t) {
  Raw r = raw(u0);
  double now = 0.0;
  for (;;) {
    const std::size_t n = r.v.size();
    std::vector<double> s(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      if (r.tail(k)) continue;
      const double zl = k == 0 ? 0.0 : sgn(r.v[k] - r.v[k - 1]);
      const double zr = k + 1 == n ? 0.0 : sgn(r.v[k + 1] - r.v[k]);
      s[k] = (zr - zl) / r.len(k);
    }
    double dt = inf;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double d = r.v[j + 1] - r.v[j];
      const double closing = -(s[j + 1] - s[j]) * sgn(d);
      if (closing > 0) dt = std::min(dt, std::abs(d) / closing);
    }
    if (now + dt >= t) {
      for (std::size_t k = 0; k < n; ++k) r.v[k] += s[k] * (t - now);
      break;
    }
    for (std::size_t k = 0; k < n; ++k) r.v[k] += s[k] * dt;
    now += dt;
    bool merged = true;
    while (merged) {
      merged = false;
      for (std::size_t j = 0; j + 1 < r.v.size(); ++j) {
        const double scale = std::max({1.0, std::abs(r.v[j]), std::abs(r.v[j + 1])});
        if (std::abs(r.v[j + 1] - r.v[j]) > 1e-11 * scale) continue;
        double val;
        if (r.tail(j)) val = r.v[j];
        else if (r.tail(j + 1)) val = r.v[j + 1];
        else val = (r.v[j] * r.len(j) + r.v[j + 1] * r.len(j + 1)) / (r.len(j) + r.len(j + 1));
        r.v[j] = val;
        r.v.erase(r.v.begin() + static_cast<long>(j) + 1);
        r.x.erase(r.x.begin() + static_cast<long>(j));
        merged = true;
        break;
      }
    }
  }
  return r.build();
}

double objective(const StepFunction& u0, const std::vector<double>& u, double h) {
  const Raw r = raw(u0);
  double tv = 0.0;
  double fit = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (k > 0) tv += std::abs(u[k] - u[k - 1]);
    if (r.tail(k)) {
      if (u[k] != r.v[k]) return inf;
      continue;
    }
    fit += r.len(k) * (u[k] - r.v[k]) * (u[k] - r.v[k]) / (2.0 * h);
  }
  return tv + fit;
}

StepFunction exhaustive_prox(const StepFunction& u0, double h) {
  const Raw r = raw(u0);
  const std::size_t K = r.v.size();
  std::vector<double> best;
  double best_obj = inf;
  for (unsigned cuts = 0; cuts < (1u << (K - 1)); ++cuts) {
    // Blocks [begin, end).
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::size_t start = 0;
    for (std::size_t j = 0; j + 1 < K; ++j) {
      if (cuts & (1u << j)) {
        blocks.emplace_back(start, j + 1);
        start = j + 1;
      }
    }
    blocks.emplace_back(start, K);
    const std::size_t J = blocks.size() - 1;
    for (unsigned signs = 0; signs < (1u << J); ++signs) {
      std::vector<double> u(K);
      bool ok = true;
      for (std::size_t b = 0; b < blocks.size() && ok; ++b) {
        const auto [lo, hi] = blocks[b];
        double fixed = std::numeric_limits<double>::quiet_NaN();
        double sw = 0.0;
        double swa = 0.0;
        for (std::size_t k = lo; k < hi; ++k) {
          if (r.tail(k)) {
            if (!std::isnan(fixed) && fixed != r.v[k]) ok = false;
            fixed = r.v[k];
          } else {
            sw += r.len(k);
            swa += r.len(k) * r.v[k];
          }
        }
        double value = fixed;
        if (std::isnan(fixed)) {
          const double sl = b == 0 ? 0.0 : ((signs >> (b - 1)) & 1u ? 1.0 : -1.0);
          const double sr = b == J ? 0.0 : ((signs >> b) & 1u ? 1.0 : -1.0);
          value = (swa + h * (sr - sl)) / sw;
        }
        for (std::size_t k = lo; k < hi; ++k) u[k] = value;
      }
      if (!ok) continue;
      const double obj = objective(u0, u, h);
      if (obj < best_obj) {
        best_obj = obj;
        best = u;
      }
    }
  }
  Raw out = r;
  out.v = best;
  return out.build();
}

std::vector<double> closed_form_interior(const StepFunction& u0, double h, std::size_t ell) {
  const Raw r = raw(u0);
  std::vector<double> out;
  const double lh = static_cast<double>(ell) * h;
  for (std::size_t k = 1; k + 1 < r.v.size(); ++k) {
    const double a = r.v[k];
    const double l = r.v[k - 1];
    const double n = r.v[k + 1];
    if (a > std::max(l, n)) out.push_back(a - 2.0 * lh / r.len(k));
    else if (a < std::min(l, n)) out.push_back(a + 2.0 * lh / r.len(k));
    else out.push_back(a);
  }
  return out;
}

double smallness_bound(const StepFunction& u0) {
  const Raw r = raw(u0);
  double b = inf;
  for (std::size_t j = 0; j + 1 < r.v.size(); ++j)
    b = std::min(b, std::abs(r.v[j] - r.v[j + 1]) * std::min(r.len(j), r.len(j + 1)));
  return b;
}

std::vector<double> interval_values(const StepFunction& grid, const StepFunction& u) {
  const Raw g = raw(grid);
  std::vector<double> out;
  for (std::size_t k = 0; k < g.v.size(); ++k) {
    double x;
    if (g.x.empty()) x = g.mode == BoundaryMode::Cauchy ? 0.0 : 0.5 * (g.dom.lo + g.dom.hi);
    else if (g.mode == BoundaryMode::Cauchy && k == 0) x = g.x.front() - 1.0;
    else if (g.mode == BoundaryMode::Cauchy && k == g.x.size()) x = g.x.back() + 1.0;
    else {
      const double lo = k == 0 ? g.dom.lo : g.x[k - 1];
      const double hi = k == g.x.size() ? g.dom.hi : g.x[k];
      x = 0.5 * (lo + hi);
    }
    out.push_back(u(x));
  }
  return out;
}

double l1_distance(const StepFunction& u, const StepFunction& v) {
  std::set<double> pts(u.breakpoints().begin(), u.breakpoints().end());
  pts.insert(v.breakpoints().begin(), v.breakpoints().end());
  std::vector<double> xs(pts.begin(), pts.end());
  double total = 0.0;
  if (u.mode() == BoundaryMode::Neumann) {
    xs.insert(xs.begin(), u.domain().lo);
    xs.push_back(u.domain().hi);
  } else if (!xs.empty()) {
    if (u(xs.front() - 1.0) != v(xs.front() - 1.0) || u(xs.back() + 1.0) != v(xs.back() + 1.0))
      return inf;
  } else if (u(0.0) != v(0.0)) {
    return inf;
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double m = 0.5 * (xs[i] + xs[i + 1]);
    total += std::abs(u(m) - v(m)) * (xs[i + 1] - xs[i]);
  }
  return total;
}

}  // namespace oracle
