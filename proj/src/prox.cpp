#include "tvflow/prox.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "tvflow/error.hpp"

namespace tvflow {

namespace {

// Derivative of the partial objective, scaled by h, on one segment:
//   h * f'(x) = sw * x - swa + k * h
// with sw, swa sums of weights and weighted data and k an integer count of
// unit slopes. Keeping k integral makes fixed values like "alpha stays put"
// come out exactly.
struct Coef {
  double sw = 0.0;
  double swa = 0.0;
  int k = 0;

  double eval(double x, double h) const { return sw * x - swa + k * h; }
  double solve(int level, double h) const { return (swa + (level - k) * h) / sw; }
};

struct Knot {
  double x;
  double dsw;
  double dswa;
  int dk;
};

// Piecewise-affine nondecreasing derivative stored as knots with coefficient
// jumps between a left and a right segment.
class Derivative {
 public:
  Derivative(double h) : h_(h) {}

  void add_abs(double tau) {
    // Only used on an empty derivative.
    left_ = {0.0, 0.0, -1};
    right_ = {0.0, 0.0, 1};
    knots_.push_back({tau, 0.0, 0.0, 2});
  }

  void add_affine(double w, double alpha) {
    left_.sw += w;
    left_.swa += w * alpha;
    right_.sw += w;
    right_.swa += w * alpha;
  }

  // Replaces f' by max(-1, min(1, f')) and returns the crossing points.
  std::pair<double, double> clamp_unit() {
    const double lo = clamp_left();
    const double hi = clamp_right();
    return {lo, hi};
  }

  double root() const {
    Coef cur = left_;
    double prev = -kInf;
    for (const Knot& kn : knots_) {
      if (cur.eval(kn.x, h_) >= 0.0) return std::clamp(cur.solve(0, h_), prev, kn.x);
      cur.sw += kn.dsw;
      cur.swa += kn.dswa;
      cur.k += kn.dk;
      if (cur.eval(kn.x, h_) >= 0.0) return kn.x;
      prev = kn.x;
    }
    return std::max(cur.solve(0, h_), prev);
  }

 private:
  double clamp_left() {
    Coef cur = left_;
    double r = 0.0;
    bool found = false;
    double prev = -kInf;
    while (!knots_.empty()) {
      const Knot kn = knots_.front();
      if (cur.eval(kn.x, h_) >= -h_) {
        r = std::clamp(cur.solve(-1, h_), prev, kn.x);
        found = true;
        break;
      }
      cur.sw += kn.dsw;
      cur.swa += kn.dswa;
      cur.k += kn.dk;
      knots_.pop_front();
      prev = kn.x;
      if (cur.eval(kn.x, h_) >= -h_) {
        r = kn.x;
        found = true;
        break;
      }
    }
    if (!found) r = std::max(cur.solve(-1, h_), prev);
    left_ = {0.0, 0.0, -1};
    knots_.push_front({r, cur.sw, cur.swa, cur.k + 1});
    return r;
  }

  double clamp_right() {
    Coef cur = right_;
    double r = 0.0;
    bool found = false;
    double next = kInf;
    while (!knots_.empty()) {
      const Knot kn = knots_.back();
      if (cur.eval(kn.x, h_) <= h_) {
        r = std::clamp(cur.solve(1, h_), kn.x, next);
        found = true;
        break;
      }
      cur.sw -= kn.dsw;
      cur.swa -= kn.dswa;
      cur.k -= kn.dk;
      knots_.pop_back();
      next = kn.x;
      if (cur.eval(kn.x, h_) <= h_) {
        r = kn.x;
        found = true;
        break;
      }
    }
    if (!found) r = std::min(cur.solve(1, h_), next);
    right_ = {0.0, 0.0, 1};
    knots_.push_back({r, -cur.sw, -cur.swa, 1 - cur.k});
    return r;
  }

  double h_;
  Coef left_;
  Coef right_;
  std::deque<Knot> knots_;
};

double sign_of(double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                std::max({1.0, std::abs(a), std::abs(b)});
}

struct Grid {
  std::vector<double> w;      // interval lengths (inf on tails)
  std::vector<double> alpha;  // data
  bool cauchy = true;
};

Grid grid_of(const StepFunction& u0) {
  Grid g;
  g.cauchy = u0.mode() == BoundaryMode::Cauchy;
  for (std::size_t k = 0; k < u0.num_intervals(); ++k) {
    g.w.push_back(u0.length(k));
    g.alpha.push_back(u0.values()[k]);
  }
  return g;
}

void validate(const StepFunction& u0, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    std::ostringstream os;
    os << "time step must be positive and finite, got " << h;
    fail(ErrorCode::NonpositiveStep, os.str());
  }
  for (double v : u0.values())
    if (!std::isfinite(v)) fail(ErrorCode::UnboundedProblem, "data must be finite");
}

// Given interval values u whose equal runs are the fused blocks, recompute
// every block value from the exact optimality relation
//   sum_block w (u - alpha) = h (z_right - z_left)
// with z = sign of the jump at block ends and 0 at Neumann ends.
void polish_blocks(const Grid& g, double h, std::vector<double>& u) {
  const std::size_t n = u.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (u[k] != u[k + 1] && nearly_equal(u[k], u[k + 1])) u[k + 1] = u[k];

  std::size_t p = 0;
  while (p < n) {
    std::size_t q = p;
    while (q + 1 < n && u[q + 1] == u[p]) ++q;
    const double zl = p == 0 ? 0.0 : sign_of(u[p] - u[p - 1]);
    const double zr = q + 1 == n ? 0.0 : sign_of(u[q + 1] - u[q]);
    bool has_tail = false;
    double tail = 0.0;
    for (std::size_t k = p; k <= q; ++k) {
      if (std::isinf(g.w[k])) {
        has_tail = true;
        tail = g.alpha[k];
      }
    }
    double value;
    if (has_tail) {
      value = tail;
    } else if (p == q) {
      value = g.alpha[p] + h * (zr - zl) / g.w[p];
    } else {
      double W = 0.0;
      double S = 0.0;
      for (std::size_t k = p; k <= q; ++k) {
        W += g.w[k];
        S += g.w[k] * g.alpha[k];
      }
      value = (S + h * (zr - zl)) / W;
    }
    for (std::size_t k = p; k <= q; ++k) u[k] = value;
    p = q + 1;
  }
}

DualCertificate recover_dual(const StepFunction& u0, const Grid& g, double h,
                             const std::vector<double>& u) {
  DualCertificate cert;
  cert.h = h;
  cert.positions.assign(u0.breakpoints().begin(), u0.breakpoints().end());
  const std::size_t m = cert.positions.size();
  cert.z.assign(m, 0.0);
  if (m == 0) return cert;
  auto flux = [&](std::size_t k) { return g.w[k] * (u[k] - g.alpha[k]) / h; };

  if (!g.cauchy) {
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      z += flux(j);
      cert.z[j] = z;
    }
    return cert;
  }

  // Cauchy: tails have zero flux; anchor at the first jump.
  std::size_t anchor = m;
  for (std::size_t j = 0; j < m; ++j) {
    if (u[j] != u[j + 1]) {
      anchor = j;
      break;
    }
  }
  if (anchor == m) {
    double z = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
      z += flux(j);
      cert.z[j] = z;
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
    const double mid = 0.5 * (lo + hi);
    for (double& v : cert.z) v -= mid;
  } else {
    cert.z[anchor] = sign_of(u[anchor + 1] - u[anchor]);
    for (std::size_t j = anchor + 1; j < m; ++j) cert.z[j] = cert.z[j - 1] + flux(j);
    for (std::size_t j = anchor; j-- > 0;) cert.z[j] = cert.z[j + 1] - flux(j + 1);
  }
  cert.z_left = cert.z.front();
  cert.z_right = cert.z.back();
  return cert;
}

StepFunction rebuild(const StepFunction& u0, std::vector<double> u) {
  return normalize(u0.mode(), u0.domain(), {u0.breakpoints().begin(), u0.breakpoints().end()},
                   std::move(u));
}

}  // namespace

double CertificateResiduals::max() const {
  return std::max({feasibility, jump_sign, flux, boundary});
}

ProxResult tv_prox(const StepFunction& u0, double h) {
  validate(u0, h);
  const Grid g = grid_of(u0);
  const std::size_t M = g.w.size();
  std::vector<double> u(g.alpha);

  // Free variables are the bounded intervals [first, last].
  const std::size_t first = g.cauchy ? 1 : 0;
  const std::size_t last = g.cauchy ? M - 1 : M;  // exclusive
  if (last > first) {
    Derivative d(h);
    if (g.cauchy) d.add_abs(g.alpha.front());
    std::vector<double> lo(M, 0.0);
    std::vector<double> hi(M, 0.0);
    for (std::size_t k = first; k < last; ++k) {
      d.add_affine(g.w[k], g.alpha[k]);
      if (k + 1 < last || g.cauchy) {
        auto [a, b] = d.clamp_unit();
        lo[k] = a;
        hi[k] = b;
      }
    }
    const std::size_t n = last - 1;
    u[n] = g.cauchy ? std::clamp(g.alpha.back(), lo[n], hi[n]) : d.root();
    for (std::size_t k = n; k-- > first;) u[k] = std::clamp(u[k + 1], lo[k], hi[k]);
    polish_blocks(g, h, u);
  }

  ProxResult result;
  result.certificate = recover_dual(u0, g, h, u);
  result.u_h = rebuild(u0, u);
  result.objective = prox_objective(u0, result.u_h, h);
  return result;
}

double prox_objective(const StepFunction& u0, const StepFunction& u, double h) {
  if (u0.mode() != u.mode() || u0.domain() != u.domain())
    fail(ErrorCode::ModeMismatch, "objective needs functions on the same domain");
  const auto grid = merged_grid(u0, u);
  const Interval dom = u0.domain();
  double fidelity = 0.0;
  for (std::size_t k = 0; k <= grid.size(); ++k) {
    const double lo = k == 0 ? dom.lo : grid[k - 1];
    const double hi = k == grid.size() ? dom.hi : grid[k];
    double x;
    if (std::isinf(lo) && std::isinf(hi)) x = 0.0;
    else if (std::isinf(lo)) x = hi - 1.0;
    else if (std::isinf(hi)) x = lo + 1.0;
    else x = lo + 0.5 * (hi - lo);
    const double d = u(x) - u0(x);
    if (d == 0.0) continue;
    if (std::isinf(hi - lo)) return kInf;
    fidelity += d * d * (hi - lo);
  }
  return total_variation(u) + fidelity / (2.0 * h);
}

CertificateResiduals check_certificate(const StepFunction& u0, const ProxResult& result) {
  const Grid g = grid_of(u0);
  const auto& cert = result.certificate;
  const double h = cert.h;
  const std::size_t M = g.w.size();
  std::vector<double> u(M);
  for (std::size_t k = 0; k < M; ++k) {
    const Interval I = u0.interval(k);
    double x;
    if (std::isinf(I.lo) && std::isinf(I.hi)) x = 0.0;
    else if (std::isinf(I.lo)) x = I.hi - 1.0;
    else if (std::isinf(I.hi)) x = I.lo + 1.0;
    else x = I.lo + 0.5 * (I.hi - I.lo);
    u[k] = result.u_h(x);
  }

  CertificateResiduals r;
  for (double z : cert.z) r.feasibility = std::max(r.feasibility, std::abs(z) - 1.0);
  for (std::size_t j = 0; j + 1 < M; ++j) {
    if (u[j] != u[j + 1])
      r.jump_sign = std::max(r.jump_sign, std::abs(cert.z[j] - sign_of(u[j + 1] - u[j])));
  }
  auto zl = [&](std::size_t k) { return k == 0 ? cert.z_left : cert.z[k - 1]; };
  auto zr = [&](std::size_t k) { return k + 1 == M ? cert.z_right : cert.z[k]; };
  for (std::size_t k = 0; k < M; ++k) {
    if (std::isinf(g.w[k])) continue;
    if (M == 1) {
      r.flux = std::max(r.flux, std::abs(u[k] - g.alpha[k]));
      continue;
    }
    const double pred = h * (zr(k) - zl(k)) / g.w[k];
    r.flux = std::max(r.flux, std::abs(pred - (u[k] - g.alpha[k])));
  }
  if (!g.cauchy) {
    r.boundary = std::max(std::abs(cert.z_left), std::abs(cert.z_right));
    if (M > 1) {
      // z carried across the last interval must land on 0.
      const double end = cert.z.back() + g.w[M - 1] * (u[M - 1] - g.alpha[M - 1]) / h;
      r.boundary = std::max(r.boundary, std::abs(end));
    }
  }
  return r;
}

double local_mass_shift(const StepFunction& u0, const StepFunction& uh, Interval I) {
  const Interval dom = u0.domain();
  const double a = std::max(I.lo, dom.lo);
  const double b = std::min(I.hi, dom.hi);
  if (!(a < b)) return 0.0;
  auto grid = merged_grid(u0, uh);
  std::vector<double> cuts{a};
  for (double x : grid)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    double x;
    if (std::isinf(lo)) x = hi - 1.0;
    else if (std::isinf(hi)) x = lo + 1.0;
    else x = lo + 0.5 * (hi - lo);
    const double d = uh(x) - u0(x);
    if (d == 0.0) continue;
    if (std::isinf(hi - lo)) fail(ErrorCode::InfiniteMass, "mass shift on an unbounded interval");
    total += d * (hi - lo);
  }
  return total;
}

BruteForceResult brute_force_prox(const StepFunction& u0, double h,
                                  const BruteForceOptions& options) {
  validate(u0, h);
  const Grid g = grid_of(u0);
  const std::size_t M = g.w.size();
  const std::size_t m = M - 1;  // number of breakpoints
  std::vector<double> z(m, 0.0);

  auto zl = [&](std::size_t k) { return k == 0 ? 0.0 : z[k - 1]; };
  auto zr = [&](std::size_t k) { return k == m ? 0.0 : z[k]; };
  auto value = [&](std::size_t k) {
    if (std::isinf(g.w[k])) return g.alpha[k];
    return g.alpha[k] + h * (zr(k) - zl(k)) / g.w[k];
  };
  auto inv_w = [&](std::size_t k) { return std::isinf(g.w[k]) ? 0.0 : 1.0 / g.w[k]; };

  BruteForceResult out;
  double gap = 0.0;
  long sweep = 0;
  for (; sweep < options.max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double jump = value(j + 1) - value(j);
      const double c = h * (inv_w(j) + inv_w(j + 1));
      const double next = c > 0.0 ? std::clamp(z[j] + jump / c, -1.0, 1.0) : sign_of(jump);
      change = std::max(change, std::abs(next - z[j]));
      z[j] = next;
    }
    gap = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double jump = value(j + 1) - value(j);
      gap += std::abs(jump) - z[j] * jump;
    }
    if (gap < options.gap_tolerance && change < options.step_tolerance) break;
  }
  if (sweep == options.max_sweeps && gap >= options.gap_tolerance) {
    std::ostringstream os;
    os << "coordinate descent stopped at duality gap " << gap << " after " << sweep << " sweeps";
    fail(ErrorCode::NotConverged, os.str());
  }

  // Exact values on the fused blocks identified by the interior dual entries.
  constexpr double kActive = 1.0 - 1e-9;
  std::vector<double> u(M);
  std::size_t p = 0;
  while (p < M) {
    std::size_t q = p;
    while (q < m && std::abs(z[q]) < kActive) ++q;
    const double left = p == 0 ? 0.0 : sign_of(z[p - 1]);
    const double right = q == m ? 0.0 : sign_of(z[q]);
    bool has_tail = false;
    double tail = 0.0;
    double W = 0.0;
    double S = 0.0;
    for (std::size_t k = p; k <= q; ++k) {
      if (std::isinf(g.w[k])) {
        has_tail = true;
        tail = g.alpha[k];
      } else {
        W += g.w[k];
        S += g.w[k] * g.alpha[k];
      }
    }
    double v;
    if (has_tail) v = tail;
    else if (p == q) v = g.alpha[p] + h * (right - left) / g.w[p];
    else v = (S + h * (right - left)) / W;
    for (std::size_t k = p; k <= q; ++k) u[k] = v;
    p = q + 1;
  }

  out.u_h = rebuild(u0, u);
  out.z = std::move(z);
  out.duality_gap = gap;
  out.sweeps = sweep + 1;
  return out;
}

StepFunction discrete_flow(const StepFunction& u0, double h, std::size_t steps) {
  StepFunction u = u0;
  for (std::size_t i = 0; i < steps; ++i) u = tv_prox(u, h).u_h;
  return u;
}

double small_step_bound(const StepFunction& u0) {
  double bound = kInf;
  auto vs = u0.values();
  for (std::size_t j = 0; j + 1 < vs.size(); ++j) {
    const double len = std::min(u0.length(j), u0.length(j + 1));
    bound = std::min(bound, std::abs(vs[j] - vs[j + 1]) * len);
  }
  return bound;
}

StepFunction closed_form_steps(const StepFunction& u0, double h, std::size_t steps) {
  const double t = h * static_cast<double>(steps);
  const auto tags = classify(u0);
  auto vs = u0.values();
  const std::size_t M = vs.size();
  std::vector<double> out(vs.begin(), vs.end());
  for (std::size_t k = 0; k < M; ++k) {
    const double len = u0.length(k);
    switch (tags[k]) {
      case ExtremumTag::LocalMax: out[k] -= 2.0 * t / len; break;
      case ExtremumTag::LocalMin: out[k] += 2.0 * t / len; break;
      case ExtremumTag::Monotone: break;
      case ExtremumTag::Boundary:
        if (M == 1) break;
        if (k == 0) out[k] += t * sign_of(vs[1] - vs[0]) / len;
        else out[k] -= t * sign_of(vs[k] - vs[k - 1]) / len;
        break;
    }
  }
  return rebuild(u0, std::move(out));
}

}  // namespace tvflow
