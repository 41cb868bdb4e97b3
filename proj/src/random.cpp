#include "tvflow/random.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace tvflow {

namespace {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double draw_value(Rng& rng, const RandomStepOptions& o) {
  double v = o.nonnegative ? uniform(rng, 0.0, 1.0) : uniform(rng, -1.0, 1.0);
  if (o.quantum > 0.0) v = std::round(v * o.quantum) / o.quantum;
  return v;
}

}  // namespace

StepFunction random_step_function(Rng& rng, const RandomStepOptions& o) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(o.min_intervals,
                                                                   o.max_intervals)(rng);
  std::vector<double> xs;
  std::vector<double> vs;
  if (o.mode == BoundaryMode::Neumann) {
    double x = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      x += uniform(rng, o.min_length, o.max_length);
      xs.push_back(x);
    }
    const double b = x + uniform(rng, o.min_length, o.max_length);
    for (std::size_t k = 0; k < n; ++k) vs.push_back(draw_value(rng, o));
    return StepFunction::neumann({0.0, b}, std::move(xs), std::move(vs));
  }
  double x = uniform(rng, -1.0, 1.0);
  xs.push_back(x);
  for (std::size_t k = 0; k < n; ++k) {
    x += uniform(rng, o.min_length, o.max_length);
    xs.push_back(x);
  }
  vs.push_back(o.zero_tails ? 0.0 : draw_value(rng, o));
  for (std::size_t k = 0; k < n; ++k) vs.push_back(draw_value(rng, o));
  vs.push_back(o.zero_tails ? 0.0 : draw_value(rng, o));
  return StepFunction::cauchy(std::move(xs), std::move(vs));
}

DeltaMeasure random_deltas(Rng& rng, std::size_t max_atoms, bool positive) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_atoms)(rng);
  std::vector<Atom> atoms;
  double x = uniform(rng, -1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double a = positive ? uniform(rng, 0.05, 1.0) : uniform(rng, -1.0, 1.0);
    if (a == 0.0) a = 0.5;
    atoms.push_back({x, a});
    x += uniform(rng, 0.1, 2.0);
  }
  return DeltaMeasure(std::move(atoms));
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* s = std::getenv("TVFLOW_SEED");
  if (s == nullptr || *s == '\0') return fallback;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used == std::string(s).size()) return v;
  } catch (const std::exception&) {
  }
  return fallback;
}

}  // namespace tvflow
