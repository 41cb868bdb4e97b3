#include "tvflow/sfde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "tvflow/error.hpp"
#include "tvflow/flow.hpp"

namespace tvflow {

DeltaMeasure::DeltaMeasure(std::vector<Atom> atoms) {
  for (const Atom& at : atoms)
    if (!std::isfinite(at.x) || !std::isfinite(at.a))
      fail(ErrorCode::NonFiniteValue, "atoms must have finite positions and weights");
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& l, const Atom& r) { return l.x < r.x; });
  for (const Atom& at : atoms) {
    if (!atoms_.empty() && atoms_.back().x == at.x) atoms_.back().a += at.a;
    else atoms_.push_back(at);
  }
  std::erase_if(atoms_, [](const Atom& at) { return at.a == 0.0; });
}

StepFunction integrate(const DeltaMeasure& v) {
  std::vector<double> xs;
  std::vector<double> vs{0.0};
  for (const Atom& at : v.atoms()) {
    xs.push_back(at.x);
    vs.push_back(vs.back() + at.a);
  }
  return StepFunction::cauchy(std::move(xs), std::move(vs));
}

StepFunction integrate_on(const DeltaMeasure& v, Interval domain) {
  for (const Atom& at : v.atoms())
    if (!(at.x > domain.lo && at.x < domain.hi))
      fail(ErrorCode::AtomOutsideDomain, "atoms must lie strictly inside the domain");
  std::vector<double> xs;
  std::vector<double> vs{0.0};
  for (const Atom& at : v.atoms()) {
    xs.push_back(at.x);
    vs.push_back(vs.back() + at.a);
  }
  return StepFunction::neumann(domain, std::move(xs), std::move(vs));
}

DeltaMeasure differentiate(const StepFunction& u) {
  std::vector<Atom> atoms;
  auto xs = u.breakpoints();
  auto vs = u.values();
  for (std::size_t i = 0; i < xs.size(); ++i) atoms.push_back({xs[i], vs[i + 1] - vs[i]});
  return DeltaMeasure(std::move(atoms));
}

DeltaMeasure evolve_via_tvf(const DeltaMeasure& v0, double t, const SfdeProblem& problem) {
  const StepFunction u0 =
      problem.mode == SfdeMode::Cauchy ? integrate(v0) : integrate_on(v0, problem.domain);
  return differentiate(advance(u0, t));
}

namespace {

double sign_of(double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }

struct AtomState {
  double x;
  double a;
};

std::vector<double> decay_rates(const std::vector<AtomState>& atoms, const SfdeProblem& problem) {
  const std::size_t n = atoms.size();
  std::vector<double> rates(n, 0.0);
  const bool dirichlet = problem.mode == SfdeMode::Dirichlet;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = sign_of(atoms[i].a);
    double r = 0.0;
    if (i > 0) {
      if (sign_of(atoms[i - 1].a) != s) r += 2.0 / (atoms[i].x - atoms[i - 1].x);
    } else if (dirichlet) {
      r += 1.0 / (atoms[i].x - problem.domain.lo);
    }
    if (i + 1 < n) {
      if (sign_of(atoms[i + 1].a) != s) r += 2.0 / (atoms[i + 1].x - atoms[i].x);
    } else if (dirichlet) {
      r += 1.0 / (problem.domain.hi - atoms[i].x);
    }
    rates[i] = r;
  }
  return rates;
}

void check_problem(const DeltaMeasure& v0, const SfdeProblem& problem) {
  if (problem.mode != SfdeMode::Dirichlet) return;
  for (const Atom& at : v0.atoms()) {
    if (!(at.x > problem.domain.lo && at.x < problem.domain.hi))
      fail(ErrorCode::AtomOutsideDomain, "atoms must lie strictly inside the domain");
    if (at.a < 0.0)
      fail(ErrorCode::DirichletSignedAtoms,
           "the direct Dirichlet rule covers positive atoms; use the flow route");
  }
}

// Runs the atom dynamics up to time t; returns the survivors and the time of
// the last extinction that happened.
std::pair<std::vector<AtomState>, double> run_atoms(const DeltaMeasure& v0, double t,
                                                    const SfdeProblem& problem) {
  check_problem(v0, problem);
  std::vector<AtomState> atoms;
  for (const Atom& at : v0.atoms()) atoms.push_back({at.x, at.a});
  double now = 0.0;
  double last_death = 0.0;
  while (!atoms.empty()) {
    const auto rates = decay_rates(atoms, problem);
    double dt = kInf;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (rates[i] > 0.0) dt = std::min(dt, std::abs(atoms[i].a) / rates[i]);
    if (dt == kInf) break;  // nothing decays any more
    if (now + dt > t) {
      const double step = t - now;
      for (std::size_t i = 0; i < atoms.size(); ++i)
        atoms[i].a -= sign_of(atoms[i].a) * rates[i] * step;
      break;
    }
    const double te = now + dt;
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, te);
    std::vector<AtomState> next;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (rates[i] > 0.0 && now + std::abs(atoms[i].a) / rates[i] <= te + tol) continue;
      next.push_back({atoms[i].x, atoms[i].a - sign_of(atoms[i].a) * rates[i] * dt});
    }
    atoms = std::move(next);
    now = te;
    last_death = te;
  }
  return {atoms, last_death};
}

}  // namespace

DeltaMeasure evolve_deltas(const DeltaMeasure& v0, double t, const SfdeProblem& problem) {
  if (!(t >= 0.0)) fail(ErrorCode::OutOfHorizon, "time must be nonnegative");
  auto [atoms, last] = run_atoms(v0, t, problem);
  (void)last;
  std::vector<Atom> out;
  for (const AtomState& s : atoms) out.push_back({s.x, s.a});
  return DeltaMeasure(std::move(out));
}

double deltas_extinction_time(const DeltaMeasure& v0, const SfdeProblem& problem) {
  if (v0.empty()) return 0.0;
  auto [atoms, last] = run_atoms(v0, kInf, problem);
  return atoms.empty() ? last : kInf;
}

double total_mass(const DeltaMeasure& v) {
  double m = 0.0;
  for (const Atom& at : v.atoms()) m += at.a;
  return m;
}

bool extinguishes(const DeltaMeasure& v) {
  double tv = 0.0;
  for (const Atom& at : v.atoms()) tv += std::abs(at.a);
  return std::abs(total_mass(v)) <= 1e-12 * std::max(1.0, tv);
}

// ---------------------------------------------------------------------------
// Mixed data: the integral of a piecewise-linear density plus atoms is
// piecewise quadratic with jumps.

namespace {

struct Quad {
  double p, q;   // piece [p, q]
  double U;      // value at p+
  double r0, r1; // density at p and q
  double length() const { return q - p; }
  double at(double x) const {
    const double s = x - p;
    return U + r0 * s + (r1 - r0) * s * s / (2.0 * length());
  }
  double end() const { return at(q); }
  // int_p^x u
  double primitive(double x) const {
    const double s = x - p;
    return U * s + r0 * s * s / 2.0 + (r1 - r0) * s * s * s / (6.0 * length());
  }
  // x in [p, q] with at(x) = y; the piece is monotone.
  double inverse(double y) const {
    double lo = p;
    double hi = q;
    const bool up = end() >= U;
    for (int it = 0; it < 200 && lo < hi; ++it) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      if ((at(mid) < y) == up) lo = mid;
      else hi = mid;
    }
    return lo + 0.5 * (hi - lo);
  }
};

class MixedModel {
 public:
  explicit MixedModel(const MixedProblem& pb) : density_(pb.density) {
    const auto& dx = pb.density.knots();
    const auto& dy = pb.density.values();
    std::vector<double> cuts(dx.begin(), dx.end());
    for (const Atom& at : pb.atoms.atoms()) cuts.push_back(at.x);
    for (std::size_t i = 1; i < dx.size(); ++i) {
      if (dy[i - 1] * dy[i] < 0.0)
        cuts.push_back(dx[i - 1] + (dx[i] - dx[i - 1]) * dy[i - 1] / (dy[i - 1] - dy[i]));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (cuts.size() < 2) fail(ErrorCode::UnsupportedConfiguration, "data are too small");

    double u = 0.0;
    std::size_t ai = 0;
    const auto& atoms = pb.atoms.atoms();
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double p = cuts[i];
      while (ai < atoms.size() && atoms[ai].x <= p) {
        if (atoms[ai].x == p) {
          jump_at_.push_back(pieces_.size());
          jump_weight_.push_back(atoms[ai].a);
          u += atoms[ai].a;
        }
        ++ai;
      }
      const double q = cuts[i + 1];
      Quad piece{p, q, u, density_(p), density_(q)};
      // density_() returns 0 outside its support; use the interior segment
      // values at the piece ends.
      const double mid = p + 0.5 * (q - p);
      piece.r0 = density_value_on(mid, p);
      piece.r1 = density_value_on(mid, q);
      pieces_.push_back(piece);
      u = piece.end();
    }
    right_tail_ = u;
    for (; ai < atoms.size(); ++ai) {
      jump_at_.push_back(pieces_.size());
      jump_weight_.push_back(atoms[ai].a);
      right_tail_ += atoms[ai].a;
    }
    classify(pb);
  }

  double value(double x) const {
    if (x < pieces_.front().p) return 0.0;
    if (x >= pieces_.back().q) return right_tail_;
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const Quad& q) { return v < q.p; });
    return std::prev(it)->at(x);
  }

  double integral(double a, double b) const {
    double total = 0.0;
    for (const Quad& q : pieces_) {
      const double lo = std::max(a, q.p);
      const double hi = std::min(b, q.q);
      if (lo < hi) total += q.primitive(hi) - q.primitive(lo);
    }
    return total;
  }

  double density_integral(double a, double b) const {
    double total = 0.0;
    for (const Quad& q : pieces_) {
      const double lo = std::max(a, q.p);
      const double hi = std::min(b, q.q);
      if (!(lo < hi)) continue;
      auto rho = [&](double x) { return q.r0 + (q.r1 - q.r0) * (x - q.p) / q.length(); };
      total += 0.5 * (hi - lo) * (rho(lo) + rho(hi));
    }
    return total;
  }

  // inf {x in pieces [i0, i1) : u(x) >= y}, pieces nondecreasing.
  double first_at_least(double y, std::size_t i0, std::size_t i1) const {
    for (std::size_t i = i0; i < i1; ++i) {
      const Quad& q = pieces_[i];
      if (q.U >= y) return q.p;
      if (q.end() >= y) return q.inverse(y);
    }
    return pieces_[i1 - 1].q;
  }

  // inf {x in pieces [i0, i1) : u(x) <= y}, pieces nonincreasing.
  double first_at_most(double y, std::size_t i0, std::size_t i1) const {
    for (std::size_t i = i0; i < i1; ++i) {
      const Quad& q = pieces_[i];
      if (q.U <= y) return q.p;
      if (q.end() <= y) return q.inverse(y);
    }
    return pieces_[i1 - 1].q;
  }

  // Ends of the component of {u > h} holding the maximum.
  std::pair<double, double> max_fronts(double h) const {
    return {first_at_least(h, 0, desc_begin_), first_at_most(h, desc_begin_, desc_end_)};
  }
  // Ends of the component of {u < l} holding the minimum.
  std::pair<double, double> min_fronts(double l) const {
    return {first_at_most(l, desc_begin_, desc_end_),
            first_at_least(l, desc_end_, pieces_.size())};
  }

  double area_max(double h) const {
    auto [a, b] = max_fronts(h);
    return integral(a, b) - h * (b - a);
  }
  double area_min(double l) const {
    auto [a, b] = min_fronts(l);
    return l * (b - a) - integral(a, b);
  }

  // Solves a monotone scalar equation by bisection on [lo, hi].
  template <class F>
  static double bisect(F&& f, double lo, double hi) {
    // f(lo) and f(hi) have opposite signs.
    const bool rising = f(hi) > f(lo);
    for (int it = 0; it < 200; ++it) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      if ((f(mid) < 0.0) == rising) lo = mid;
      else hi = mid;
    }
    return lo + 0.5 * (hi - lo);
  }

  double max_value() const { return max_value_; }
  double min_value() const { return min_value_; }
  double upper_limit() const { return std::min(max_value_, right_tail_); }
  double atom_x() const { return atom_x_; }
  double atom_left() const { return atom_left_; }
  double atom_weight() const { return atom_weight_; }
  double desc_start() const { return pieces_[desc_begin_].p; }
  double desc_stop() const { return pieces_[desc_end_ - 1].q; }
  double right_tail() const { return right_tail_; }

  std::vector<MonotonePiece> monotone_pieces() const {
    std::vector<MonotonePiece> out;
    for (const Quad& q : pieces_)
      out.push_back({q.p, q.q, q.U, q.end(), [q](double y) { return q.inverse(y); }});
    return out;
  }

 private:
  double density_value_on(double probe, double x) const {
    const auto& xs = density_.knots();
    const auto& ys = density_.values();
    if (xs.empty() || probe < xs.front() || probe > xs.back()) return 0.0;
    auto it = std::upper_bound(xs.begin(), xs.end(), probe);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    if (i == xs.size()) i = xs.size() - 1;
    if (i == 0) i = 1;
    return ys[i - 1] + (ys[i] - ys[i - 1]) * (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  }

  void classify(const MixedProblem& pb) {
    if (pb.atoms.size() != 1 || pb.atoms.atoms()[0].a <= 0.0)
      fail(ErrorCode::UnsupportedConfiguration, "expected exactly one positive atom");
    // Direction of every piece: +1 rising, -1 falling, 0 flat.
    const std::size_t n = pieces_.size();
    std::vector<int> dir(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = pieces_[i].end() - pieces_[i].U;
      dir[i] = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    }
    std::size_t i = 0;
    while (i < n && dir[i] >= 0) ++i;
    desc_begin_ = i;
    while (i < n && dir[i] <= 0) ++i;
    desc_end_ = i;
    while (desc_end_ > desc_begin_ && dir[desc_end_ - 1] == 0) --desc_end_;
    const std::size_t rise_begin = i;
    while (i < n && dir[i] >= 0) ++i;
    if (desc_begin_ == n || desc_end_ == desc_begin_ || rise_begin == n || i != n)
      fail(ErrorCode::UnsupportedConfiguration,
           "expected a rise to one maximum, one descent and one final rise");
    for (std::size_t k : jump_at_)
      if (k > desc_begin_)
        fail(ErrorCode::UnsupportedConfiguration, "the atom must sit before the descent");

    max_value_ = pieces_[desc_begin_].U;
    min_value_ = pieces_[desc_end_ - 1].end();
    if (!(min_value_ > 0.0))
      fail(ErrorCode::UnsupportedConfiguration, "the minimum must stay above the left tail");
    if (!(right_tail_ > min_value_))
      fail(ErrorCode::UnsupportedConfiguration, "the final rise must end above the minimum");
    atom_x_ = pb.atoms.atoms()[0].x;
    atom_weight_ = pb.atoms.atoms()[0].a;
    atom_left_ = value(atom_x_) - atom_weight_;
  }

  PiecewiseLinear density_;
  std::vector<Quad> pieces_;
  std::vector<std::size_t> jump_at_;
  std::vector<double> jump_weight_;
  double right_tail_ = 0.0;
  std::size_t desc_begin_ = 0;
  std::size_t desc_end_ = 0;
  double max_value_ = 0.0;
  double min_value_ = 0.0;
  double atom_x_ = 0.0;
  double atom_left_ = 0.0;
  double atom_weight_ = 0.0;
};

}  // namespace

MixedProblem default_mixed_problem() {
  MixedProblem pb;
  pb.density = PiecewiseLinear({-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.5, 3.5},
                               {0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0});
  pb.atoms = DeltaMeasure({{0.0, 0.1}});
  return pb;
}

MixedReport evolve_mixed(const MixedProblem& problem, double t, double eps) {
  if (!(t >= 0.0)) fail(ErrorCode::OutOfHorizon, "time must be nonnegative");
  const MixedModel model(problem);
  MixedReport rep;
  rep.t = t;
  rep.eps = eps;

  // Merge level: A_max(L) = A_min(L).
  const double lo = model.min_value();
  const double hi = model.upper_limit();
  const double L = MixedModel::bisect(
      [&](double l) { return model.area_max(l) - model.area_min(l); }, lo, hi);
  rep.t1 = 0.5 * model.area_max(L);
  rep.t0_nominal = 0.5 * model.atom_weight();
  rep.t0 = model.atom_left() > L ? 0.5 * model.area_max(model.atom_left()) : kInf;

  double h;
  double l;
  if (t >= rep.t1) {
    rep.merged = true;
    h = L;
    l = L;
    rep.area_residual = std::max(std::abs(model.area_max(L) - 2.0 * rep.t1),
                                 std::abs(model.area_min(L) - 2.0 * rep.t1));
  } else if (t == 0.0) {
    h = model.max_value();
    l = model.min_value();
  } else {
    h = MixedModel::bisect([&](double x) { return model.area_max(x) - 2.0 * t; }, L,
                           model.max_value());
    l = MixedModel::bisect([&](double x) { return model.area_min(x) - 2.0 * t; },
                           model.min_value(), L);
    rep.area_residual = std::max(std::abs(model.area_max(h) - 2.0 * t),
                                 std::abs(model.area_min(l) - 2.0 * t));
  }
  rep.max_level = h;
  rep.min_level = l;
  rep.atom_weight = std::max(0.0, h - model.atom_left());
  std::tie(rep.z_left, rep.z1) = model.max_fronts(h);
  std::tie(rep.z2, rep.z3) = model.min_fronts(l);

  // Mass bookkeeping on the zero set of v(t1).
  const auto [zl, z1] = model.max_fronts(L);
  const auto [z2, z3] = model.min_fronts(L);
  (void)z1;
  (void)z2;
  rep.B1 = model.atom_weight() + model.density_integral(zl, model.desc_start());
  rep.B0 = -model.density_integral(model.desc_start(), model.desc_stop());
  rep.B2 = model.density_integral(model.desc_stop(), z3);

  if (eps > 0.0) {
    const Sandwich s = sandwich_monotone_pieces(model.monotone_pieces(), eps, 0.0,
                                                model.right_tail());
    rep.lower = advance(s.lower, t);
    rep.upper = advance(s.upper, t);
    rep.gap_inf = lp_distance(rep.upper, rep.lower, kInf);

    // Explicit solution: cut at h on the max component, fill at l on the min one.
    auto exact = [&](double x) {
      const double u = model.value(x);
      if (x >= rep.z_left && x <= rep.z1) return std::min(u, h);
      if (x >= rep.z2 && x <= rep.z3) return std::max(u, l);
      return u;
    };
    std::vector<double> grid = merged_grid(rep.lower, rep.upper);
    for (double x : {rep.z_left, rep.z1, rep.z2, rep.z3}) grid.push_back(x);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    rep.exact_inside_bracket = true;
    constexpr double tol = 1e-9;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const double mid = grid[k] + 0.5 * (grid[k + 1] - grid[k]);
      const double v = exact(mid);
      if (v < rep.lower(mid) - tol || v > rep.upper(mid) + tol) {
        rep.exact_inside_bracket = false;
        break;
      }
    }
  } else if (eps < 0.0) {
    fail(ErrorCode::NonpositiveTolerance, "bracket tolerance must be positive");
  }
  return rep;
}

}  // namespace tvflow
