#include "doctest.h"

#include <cmath>
#include <random>

#include "support/helpers.hpp"
#include "support/oracles.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/prox.hpp"
#include "tvflow/random.hpp"

using namespace tvflow;
using testing_support::code_of;
using testing_support::vec;

namespace {

RandomStepOptions small_signed(BoundaryMode mode) {
  RandomStepOptions o;
  o.mode = mode;
  o.nonnegative = false;
  o.zero_tails = false;
  o.max_intervals = mode == BoundaryMode::Cauchy ? 6 : 8;
  return o;
}

}  // namespace

TEST_CASE("maximum step drops by 2h/|I|") {
  const auto u0 = StepFunction::cauchy({0, 1}, {0.5, 2.0, 1.0});
  const auto r = tv_prox(u0, 0.1);
  CHECK(vec(r.u_h.values())[1] == doctest::Approx(1.8).epsilon(1e-15));
  CHECK(vec(r.u_h.values())[0] == 0.5);
  CHECK(vec(r.u_h.values())[2] == 1.0);

  const auto n0 = StepFunction::neumann({0, 4}, {1, 3}, {0.5, 2.0, 1.0});
  const auto n = tv_prox(n0, 0.1);
  CHECK(n.u_h(2.0) == doctest::Approx(2.0 - 0.2 / 2.0).epsilon(1e-15));
  CHECK(n.u_h(0.5) == doctest::Approx(0.5 + 0.1).epsilon(1e-15));
  CHECK(n.u_h(3.5) == doctest::Approx(1.0 + 0.1).epsilon(1e-15));
}

TEST_CASE("monotone Cauchy data are fixed points") {
  const auto u0 = StepFunction::cauchy({0, 1, 3}, {-1, 0.5, 2, 4});
  for (double h : {0.01, 1.0, 100.0}) CHECK(tv_prox(u0, h).u_h == u0);
}

TEST_CASE("large step on a single bump clamps to zero") {
  const auto u0 = StepFunction::indicator(0, 1, 4);
  const auto r = tv_prox(u0, 3.0);
  CHECK(r.u_h == StepFunction());
  CHECK(r.objective == doctest::Approx(16.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("nonpositive step is rejected") {
  CHECK(code_of([] { tv_prox(StepFunction::indicator(0, 1), 0.0); }) == ErrorCode::NonpositiveStep);
  CHECK(code_of([] { tv_prox(StepFunction::indicator(0, 1), -1.0); }) ==
        ErrorCode::NonpositiveStep);
}

TEST_CASE("local mass shift") {
  const auto u0 = StepFunction::cauchy({0, 1}, {0.5, 2.0, 1.0});
  const double h = 0.1;
  const auto uh = tv_prox(u0, h).u_h;
  CHECK(local_mass_shift(u0, uh, {0, 1}) == doctest::Approx(-2 * h).epsilon(1e-14));
  CHECK(local_mass_shift(u0, u0, {-3, 5}) == 0.0);

  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = random_step_function(rng, small_signed(BoundaryMode::Cauchy));
    const double step = std::uniform_real_distribution<double>(0.01, 3.0)(rng);
    const auto wh = tv_prox(w, step).u_h;
    const double a = std::uniform_real_distribution<double>(-2.0, 6.0)(rng);
    const double b = a + std::uniform_real_distribution<double>(0.0, 6.0)(rng);
    CHECK(std::abs(local_mass_shift(w, wh, {a, b})) <= 2 * step + 1e-12);
  }
}

TEST_CASE("tv_prox agrees with the exhaustive oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const auto mode = trial % 2 == 0 ? BoundaryMode::Cauchy : BoundaryMode::Neumann;
    const auto u0 = random_step_function(rng, small_signed(mode));
    const double h = std::exp(std::uniform_real_distribution<double>(-5.0, 1.5)(rng));
    const auto fast = tv_prox(u0, h).u_h;
    const auto exact = oracle::exhaustive_prox(u0, h);
    INFO("trial " << trial << " h " << h);
    CHECK(lp_distance(fast, exact, kInf) <= 1e-10);
  }
}

TEST_CASE("reference solver agrees with the exhaustive oracle") {
  Rng rng(202);
  for (int trial = 0; trial < 60; ++trial) {
    const auto mode = trial % 2 == 0 ? BoundaryMode::Cauchy : BoundaryMode::Neumann;
    const auto u0 = random_step_function(rng, small_signed(mode));
    const double h = std::exp(std::uniform_real_distribution<double>(-4.0, 1.0)(rng));
    const auto ref = brute_force_prox(u0, h);
    INFO("trial " << trial);
    CHECK(ref.duality_gap < 1e-10);
    CHECK(lp_distance(ref.u_h, oracle::exhaustive_prox(u0, h), kInf) <= 1e-8);
  }
}

TEST_CASE("certificates are feasible, sign-consistent and reproduce the step") {
  Rng rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    RandomStepOptions o = small_signed(trial % 2 == 0 ? BoundaryMode::Cauchy : BoundaryMode::Neumann);
    o.max_intervals = 12;
    const auto u0 = random_step_function(rng, o);
    const double h = std::exp(std::uniform_real_distribution<double>(-5.0, 1.5)(rng));
    const auto r = tv_prox(u0, h);
    const auto res = check_certificate(u0, r);
    INFO("trial " << trial);
    CHECK(res.max() <= 1e-10);
  }
}

TEST_CASE("prox output beats perturbations of itself") {
  Rng rng(404);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u0 = random_step_function(rng, small_signed(BoundaryMode::Neumann));
    const double h = 0.3;
    const auto r = tv_prox(u0, h);
    std::vector<double> vals;
    for (std::size_t k = 0; k < u0.num_intervals(); ++k)
      vals.push_back(r.u_h(u0.interval(k).lo + 0.5 * u0.length(k)));
    const double best = oracle::objective(u0, vals, h);
    CHECK(r.objective == doctest::Approx(best).epsilon(1e-12));
    for (int p = 0; p < 10; ++p) {
      auto w = vals;
      for (double& v : w) v += noise(rng);
      CHECK(oracle::objective(u0, w, h) >= best - 1e-12);
    }
  }
}

TEST_CASE("small steps barely move the data") {
  const auto u0 = StepFunction::cauchy({0, 1, 2, 4}, {0, 3, -1, 2, 0});
  double prev = kInf;
  for (double h : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double d = lp_distance(tv_prox(u0, h).u_h, u0, 1.0);
    CHECK(d < prev);
    CHECK(d <= 4 * h * extrema_count(u0) + 1e-15);
    prev = d;
  }
}

TEST_CASE("discrete flow") {
  const auto u0 = StepFunction::cauchy({0, 2}, {0.5, 2.0, 1.0});
  CHECK(discrete_flow(u0, 0.1, 0) == u0);
  const auto u = discrete_flow(u0, 0.05, 4);
  CHECK(u(1.0) == doctest::Approx(2.0 - 2 * 4 * 0.05 / 2.0).epsilon(1e-14));
}

TEST_CASE("a large step removes a maximum and a minimum at once") {
  const auto u0 = StepFunction::cauchy({0, 1, 2, 3}, {0, 1.0, 0.8, 0.9, 0});
  const double h = 0.1;
  const auto r = tv_prox(u0, h);
  CHECK(extrema_count(u0) == 3);
  CHECK(extrema_count(r.u_h) == 1);
  CHECK(lp_distance(r.u_h, oracle::exhaustive_prox(u0, h), kInf) <= 1e-12);
  CHECK(lp_distance(r.u_h, brute_force_prox(u0, h).u_h, kInf) <= 1e-8);
}

TEST_CASE("closed form and smallness bound match the oracle rule") {
  Rng rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mode = trial % 2 == 0 ? BoundaryMode::Cauchy : BoundaryMode::Neumann;
    auto o = small_signed(mode);
    o.max_intervals = 10;
    const auto u0 = random_step_function(rng, o);
    const double bound = oracle::smallness_bound(u0);
    if (std::isinf(bound))
      CHECK(std::isinf(small_step_bound(u0)));
    else
      CHECK(small_step_bound(u0) == doctest::Approx(bound).epsilon(1e-15));
    const double h = 0.01;
    const auto cf = closed_form_steps(u0, h, 3);
    const auto vals = oracle::interval_values(u0, cf);
    const auto want = oracle::closed_form_interior(u0, h, 3);
    for (std::size_t k = 0; k < want.size(); ++k)
      CHECK(vals[k + 1] == doctest::Approx(want[k]).epsilon(1e-14));
  }
}

TEST_CASE("closed form matches the discrete flow before the first merge") {
  Rng rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    auto o = small_signed(trial % 2 == 0 ? BoundaryMode::Cauchy : BoundaryMode::Neumann);
    o.max_intervals = 10;
    const auto u0 = random_step_function(rng, o);
    const double horizon = slope_field(u0).horizon;
    if (!std::isfinite(horizon)) continue;
    const std::size_t ell = 1 + trial % 4;
    const double h = 0.999 * std::uniform_real_distribution<double>(0.0, 1.0)(rng) * horizon /
                     static_cast<double>(ell);
    if (h <= 0) continue;
    const auto got = oracle::interval_values(u0, discrete_flow(u0, h, ell));
    const auto want = oracle::interval_values(u0, closed_form_steps(u0, h, ell));
    INFO("trial " << trial);
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-12);
  }
}
