#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "tvflow/stepfn.hpp"

namespace tvflow {

/// Per-interval time derivative of a step function under the flow.
///
/// slope_k = (z_k^+ - z_k^-) / |I_k| with z = sign of the jump at each
/// breakpoint and z = 0 at Neumann ends. Unbounded tails have slope 0.
struct SlopeField {
  std::vector<double> slopes;
  /// Time until the first pair of neighbours meets (inf if never).
  double horizon = kInf;
};

SlopeField slope_field(const StepFunction& u);

enum class EventKind { LevelsMerge, Extinction, HorizonReached };

struct FlowEvent {
  double time = 0.0;
  EventKind kind = EventKind::HorizonReached;
  /// Breakpoints that disappeared in this event.
  std::vector<double> removed;
  StepFunction state_after;
};

/// State on [t_start, t_end]: values grow affinely with the stored slopes.
struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  StepFunction state;
  std::vector<double> slopes;
};

class Trajectory {
 public:
  const StepFunction& initial() const { return segments_.front().state; }
  const std::vector<FlowEvent>& events() const { return events_; }
  const std::vector<Segment>& segments() const { return segments_; }
  double horizon() const { return segments_.back().t_end; }

  /// Exact state at time t in [0, horizon]; throws OutOfHorizon.
  StepFunction sample(double t) const;
  /// Slopes in effect just after time t.
  const Segment& segment_at(double t) const;

 private:
  friend Trajectory evolve(const StepFunction&, double);
  std::vector<Segment> segments_;
  std::vector<FlowEvent> events_;
};

/// Event-driven exact evolution up to t_end (which may be infinite: the run
/// then stops once the state is stationary). Throws UnboundedData.
Trajectory evolve(const StepFunction& u0, double t_end);

/// Incremental integrator that keeps no history; suited to inputs with many
/// intervals.
class FlowEngine {
 public:
  explicit FlowEngine(const StepFunction& u0);
  ~FlowEngine();
  FlowEngine(FlowEngine&&) noexcept;
  FlowEngine& operator=(FlowEngine&&) noexcept;

  double time() const;
  /// Time of the next merge (inf if the state is stationary).
  double next_event_time();
  /// Advances to min(next event, t_stop); returns the event if one fired.
  std::optional<FlowEvent> step(double t_stop, bool with_state = true);
  /// Advances to t, processing all events on the way.
  void advance_to(double t);
  StepFunction state() const;
  std::vector<double> slopes() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// State at time t without recording a trajectory.
StepFunction advance(const StepFunction& u0, double t);
/// States at the given nondecreasing times.
std::vector<StepFunction> states_at(const StepFunction& u0, const std::vector<double>& times);

/// T = mass/2 for nonnegative compactly supported data. Throws SignedData or
/// NotCompactlySupported.
double extinction_time(const StepFunction& u0);

double mass_at(const Trajectory& traj, double t);

/// ||d/dt u(t+)||_p for p = 1 or inf.
double velocity_norm(const Trajectory& traj, double t, double p);

const char* to_string(EventKind kind);

}  // namespace tvflow
