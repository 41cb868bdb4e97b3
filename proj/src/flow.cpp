#include "tvflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>

#include "tvflow/error.hpp"

namespace tvflow {

namespace {

double sign_of(double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }

double time_tolerance(double t) {
  return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
}

void check_data(const StepFunction& u0) {
  for (double v : u0.values())
    if (!std::isfinite(v)) fail(ErrorCode::UnboundedData, "initial values must be finite");
}

}  // namespace

SlopeField slope_field(const StepFunction& u) {
  SlopeField f;
  auto vs = u.values();
  const std::size_t n = vs.size();
  f.slopes.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!u.bounded(k)) continue;
    const double zl = k == 0 ? 0.0 : sign_of(vs[k] - vs[k - 1]);
    const double zr = k + 1 == n ? 0.0 : sign_of(vs[k + 1] - vs[k]);
    f.slopes[k] = (zr - zl) / u.length(k);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double d = vs[k + 1] - vs[k];
    const double r = f.slopes[k + 1] - f.slopes[k];
    if (d * r < 0.0) f.horizon = std::min(f.horizon, -d / r);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Engine: doubly linked list of plateaus plus a heap of pending merges.

struct FlowEngine::Impl {
  struct Node {
    double lo, hi;
    double v0, t0;
    double slope = 0.0;
    int prev = -1, next = -1;
    unsigned version = 0;
    bool alive = true;
    double length() const { return hi - lo; }
  };
  struct Pending {
    double time;
    int left, right;
    unsigned vl, vr;
    bool operator>(const Pending& o) const { return time > o.time; }
  };

  BoundaryMode mode;
  Interval domain;
  std::vector<Node> nodes;
  int head = 0;
  int alive_count = 0;
  double now = 0.0;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> heap;
  std::vector<int> rep;

  explicit Impl(const StepFunction& u0) : mode(u0.mode()), domain(u0.domain()) {
    check_data(u0);
    const std::size_t n = u0.num_intervals();
    nodes.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const Interval I = u0.interval(k);
      Node nd{I.lo, I.hi, u0.values()[k], 0.0};
      nd.prev = static_cast<int>(k) - 1;
      nd.next = k + 1 < n ? static_cast<int>(k) + 1 : -1;
      nodes.push_back(nd);
    }
    alive_count = static_cast<int>(n);
    rep.resize(n);
    for (std::size_t k = 0; k < n; ++k) rep[k] = static_cast<int>(k);
    for (std::size_t k = 0; k < n; ++k) nodes[k].slope = compute_slope(static_cast<int>(k));
    for (std::size_t k = 0; k + 1 < n; ++k) schedule(static_cast<int>(k));
  }

  double value(int i, double t) const {
    const Node& nd = nodes[i];
    if (nd.slope == 0.0) return nd.v0;
    return nd.v0 + nd.slope * (t - nd.t0);
  }

  double compute_slope(int i) const {
    const Node& nd = nodes[i];
    if (std::isinf(nd.length())) return 0.0;
    const double v = value(i, now);
    const double zl = nd.prev < 0 ? 0.0 : sign_of(v - value(nd.prev, now));
    const double zr = nd.next < 0 ? 0.0 : sign_of(value(nd.next, now) - v);
    return (zr - zl) / nd.length();
  }

  double merge_time(int i) const {
    const int j = nodes[i].next;
    const double d = value(j, now) - value(i, now);
    const double r = nodes[j].slope - nodes[i].slope;
    if (d * r < 0.0) return now - d / r;
    return kInf;
  }

  void schedule(int i) {
    if (i < 0 || nodes[i].next < 0) return;
    const double t = merge_time(i);
    if (std::isinf(t)) return;
    const int j = nodes[i].next;
    heap.push({std::max(t, now), i, j, nodes[i].version, nodes[j].version});
  }

  bool valid(const Pending& p) const {
    const Node& a = nodes[p.left];
    const Node& b = nodes[p.right];
    return a.alive && b.alive && a.next == p.right && a.version == p.vl && b.version == p.vr;
  }

  double peek() {
    while (!heap.empty() && !valid(heap.top())) heap.pop();
    return heap.empty() ? kInf : heap.top().time;
  }

  void rebase(int i) {
    Node& nd = nodes[i];
    nd.v0 = value(i, now);
    nd.t0 = now;
  }

  int find(int i) {
    while (rep[i] != i) {
      rep[i] = rep[rep[i]];
      i = rep[i];
    }
    return i;
  }

  // Absorbs the right neighbour of i into i; returns the removed breakpoint.
  double absorb_next(int i) {
    Node& a = nodes[i];
    const int j = a.next;
    Node& b = nodes[j];
    const double x = a.hi;
    const double va = value(i, now);
    const double vb = value(j, now);
    double v;
    if (std::isinf(a.length())) v = va;
    else if (std::isinf(b.length())) v = vb;
    else v = (a.length() * va + b.length() * vb) / (a.length() + b.length());
    a.hi = b.hi;
    a.v0 = v;
    a.t0 = now;
    a.next = b.next;
    if (b.next >= 0) nodes[b.next].prev = i;
    b.alive = false;
    rep[j] = i;
    --alive_count;
    return x;
  }

  bool extinct() const {
    return mode == BoundaryMode::Cauchy && alive_count == 1 && nodes[head].v0 == 0.0;
  }

  // Processes every merge due at the next event time.
  std::vector<double> fire() {
    const double te = peek();
    now = te;
    const double tol = time_tolerance(te);
    std::vector<std::pair<int, int>> pairs;
    while (!heap.empty()) {
      const Pending p = heap.top();
      if (!valid(p)) {
        heap.pop();
        continue;
      }
      if (p.time > te + tol) break;
      heap.pop();
      pairs.emplace_back(p.left, p.right);
    }
    std::sort(pairs.begin(), pairs.end(),
              [&](auto& a, auto& b) { return nodes[a.first].lo < nodes[b.first].lo; });

    std::vector<double> removed;
    std::vector<int> touched;
    for (auto [i, j] : pairs) {
      const int owner = find(i);
      if (!nodes[j].alive || nodes[owner].next != j) continue;
      removed.push_back(absorb_next(owner));
      touched.push_back(owner);
    }

    // Cascade: merges that became due at this same instant.
    for (bool again = true; again;) {
      again = false;
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      std::vector<int> around;
      for (int i : touched) {
        if (!nodes[i].alive) continue;
        around.push_back(i);
        if (nodes[i].prev >= 0) around.push_back(nodes[i].prev);
        if (nodes[i].next >= 0) around.push_back(nodes[i].next);
      }
      for (int i : around) rebase(i);
      for (int i : around) nodes[i].slope = compute_slope(i);
      for (int i : around) {
        if (!nodes[i].alive || nodes[i].next < 0) continue;
        const double d = value(nodes[i].next, now) - value(i, now);
        const double t = merge_time(i);
        if (d == 0.0 || t <= now + tol) {
          removed.push_back(absorb_next(i));
          touched.push_back(i);
          again = true;
          break;
        }
      }
      if (!again) {
        for (int i : around) {
          if (!nodes[i].alive) continue;
          ++nodes[i].version;
        }
        for (int i : around) {
          if (!nodes[i].alive) continue;
          schedule(i);
          schedule(nodes[i].prev);
        }
      }
    }
    std::sort(removed.begin(), removed.end());
    return removed;
  }

  StepFunction state() const {
    std::vector<double> xs;
    std::vector<double> vs;
    for (int i = head; i >= 0; i = nodes[i].next) {
      vs.push_back(value(i, now));
      if (nodes[i].next >= 0) xs.push_back(nodes[i].hi);
    }
    return normalize(mode, domain, std::move(xs), std::move(vs));
  }

  std::vector<double> slopes() const {
    std::vector<double> out;
    for (int i = head; i >= 0; i = nodes[i].next) out.push_back(nodes[i].slope);
    return out;
  }
};

FlowEngine::FlowEngine(const StepFunction& u0) : impl_(std::make_unique<Impl>(u0)) {}
FlowEngine::~FlowEngine() = default;
FlowEngine::FlowEngine(FlowEngine&&) noexcept = default;
FlowEngine& FlowEngine::operator=(FlowEngine&&) noexcept = default;

double FlowEngine::time() const { return impl_->now; }
double FlowEngine::next_event_time() { return impl_->peek(); }

std::optional<FlowEvent> FlowEngine::step(double t_stop, bool with_state) {
  const double te = impl_->peek();
  if (te > t_stop) {
    if (t_stop > impl_->now) impl_->now = t_stop;
    return std::nullopt;
  }
  FlowEvent ev;
  ev.removed = impl_->fire();
  ev.time = impl_->now;
  ev.kind = impl_->extinct() ? EventKind::Extinction : EventKind::LevelsMerge;
  if (with_state) ev.state_after = impl_->state();
  return ev;
}

void FlowEngine::advance_to(double t) {
  while (step(t, false)) {
  }
}

StepFunction FlowEngine::state() const { return impl_->state(); }
std::vector<double> FlowEngine::slopes() const { return impl_->slopes(); }

// ---------------------------------------------------------------------------

Trajectory evolve(const StepFunction& u0, double t_end) {
  if (!(t_end >= 0.0)) fail(ErrorCode::OutOfHorizon, "t_end must be nonnegative");
  FlowEngine engine(u0);
  Trajectory traj;
  traj.segments_.push_back({0.0, t_end, u0, slope_field(u0).slopes});
  while (true) {
    if (std::isinf(t_end) && std::isinf(engine.next_event_time())) break;
    auto ev = engine.step(t_end);
    if (!ev) {
      traj.segments_.back().t_end = t_end;
      if (!traj.events_.empty() && traj.events_.back().time >= t_end) break;
      FlowEvent done;
      done.time = t_end;
      done.kind = EventKind::HorizonReached;
      done.state_after = engine.state();
      traj.events_.push_back(std::move(done));
      break;
    }
    traj.segments_.back().t_end = ev->time;
    traj.segments_.push_back({ev->time, t_end, ev->state_after, slope_field(ev->state_after).slopes});
    traj.events_.push_back(std::move(*ev));
  }
  return traj;
}

const Segment& Trajectory::segment_at(double t) const {
  if (!(t >= 0.0) || t > horizon()) {
    std::ostringstream os;
    os << "time " << t << " outside [0, " << horizon() << "]";
    fail(ErrorCode::OutOfHorizon, os.str());
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double x, const Segment& s) { return x < s.t_start; });
  return *std::prev(it);
}

StepFunction Trajectory::sample(double t) const {
  const Segment& seg = segment_at(t);
  if (t == seg.t_start) return seg.state;
  std::vector<double> vs(seg.state.values().begin(), seg.state.values().end());
  const double dt = t - seg.t_start;
  for (std::size_t k = 0; k < vs.size(); ++k)
    if (seg.slopes[k] != 0.0) vs[k] += seg.slopes[k] * dt;
  return normalize(seg.state.mode(), seg.state.domain(),
                   {seg.state.breakpoints().begin(), seg.state.breakpoints().end()}, std::move(vs));
}

StepFunction advance(const StepFunction& u0, double t) {
  FlowEngine engine(u0);
  engine.advance_to(t);
  return engine.state();
}

std::vector<StepFunction> states_at(const StepFunction& u0, const std::vector<double>& times) {
  FlowEngine engine(u0);
  std::vector<StepFunction> out;
  out.reserve(times.size());
  for (double t : times) {
    engine.advance_to(t);
    out.push_back(engine.state());
  }
  return out;
}

double extinction_time(const StepFunction& u0) {
  if (!is_compactly_supported(u0))
    fail(ErrorCode::NotCompactlySupported, "extinction time needs compactly supported line data");
  if (!is_nonnegative(u0))
    fail(ErrorCode::SignedData, "no extinction formula for sign-changing data");
  return 0.5 * mass(u0);
}

double mass_at(const Trajectory& traj, double t) { return mass(traj.sample(t)); }

double velocity_norm(const Trajectory& traj, double t, double p) {
  const Segment& seg = traj.segment_at(t);
  double acc = 0.0;
  for (std::size_t k = 0; k < seg.slopes.size(); ++k) {
    const double s = std::abs(seg.slopes[k]);
    if (s == 0.0) continue;
    if (std::isinf(p)) acc = std::max(acc, s);
    else acc += s * seg.state.length(k);
  }
  return acc;
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::LevelsMerge: return "LevelsMerge";
    case EventKind::Extinction: return "Extinction";
    case EventKind::HorizonReached: return "HorizonReached";
  }
  return "?";
}

}  // namespace tvflow
