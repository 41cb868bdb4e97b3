#pragma once

#include <cstdint>
#include <random>

#include "tvflow/sfde.hpp"
#include "tvflow/stepfn.hpp"

namespace tvflow {

using Rng = std::mt19937_64;

struct RandomStepOptions {
  std::size_t min_intervals = 1;
  std::size_t max_intervals = 10;  ///< bounded intervals
  BoundaryMode mode = BoundaryMode::Cauchy;
  bool nonnegative = true;
  bool zero_tails = true;  ///< Cauchy only
  double min_length = 0.05;
  double max_length = 2.0;
  /// Values are multiples of 1 / quantum when positive, which produces ties.
  double quantum = 0.0;
};

StepFunction random_step_function(Rng& rng, const RandomStepOptions& options = {});

/// Up to max_atoms atoms with weights in [-1, 1] (or [0, 1] if positive)
/// at spacings in [0.1, 2].
DeltaMeasure random_deltas(Rng& rng, std::size_t max_atoms, bool positive = false);

/// TVFLOW_SEED if set and numeric, otherwise the fallback.
std::uint64_t seed_from_env(std::uint64_t fallback);

}  // namespace tvflow
