#include "doctest.h"

#include <cmath>
#include <random>

#include "support/helpers.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/profiles.hpp"
#include "tvflow/random.hpp"

using namespace tvflow;
using testing_support::code_of;
using testing_support::vec;

namespace {

const PiecewiseLinear hat({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0});

// Rising then falling profile with nonnegative values and zero ends.
PiecewiseLinear random_unimodal(Rng& rng) {
  std::uniform_real_distribution<double> gap(0.1, 1.0);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  const int up = 1 + static_cast<int>(rng() % 4);
  const int down = 1 + static_cast<int>(rng() % 4);
  std::vector<double> xs{0.0};
  std::vector<double> ys{0.0};
  double peak = 0.5 + frac(rng);
  double y = 0.0;
  for (int i = 0; i < up; ++i) {
    xs.push_back(xs.back() + gap(rng));
    y = i + 1 == up ? peak : y + (peak - y) * frac(rng);
    ys.push_back(y);
  }
  for (int i = 0; i < down; ++i) {
    xs.push_back(xs.back() + gap(rng));
    y = i + 1 == down ? 0.0 : y * frac(rng);
    ys.push_back(y);
  }
  return PiecewiseLinear(xs, ys);
}

}  // namespace

TEST_CASE("profile construction") {
  CHECK(hat.mass() == 1.0);
  CHECK(hat(0.5) == 0.5);
  CHECK(hat(2.0) == 0.0);
  CHECK(code_of([] { PiecewiseLinear({0, 1}, {1}); }) == ErrorCode::InvalidProfile);
  CHECK(code_of([] { PiecewiseLinear({1, 0}, {0, 0}); }) == ErrorCode::InvalidProfile);
  CHECK(code_of([] { PiecewiseLinear({0}, {1}); }) == ErrorCode::InvalidProfile);
  CHECK(holder_seminorm(hat, 1.0) == 1.0);
}

TEST_CASE("hat level cut follows 1 - sqrt(2t)") {
  for (int i = 0; i < 20; ++i) {
    const double t = 0.5 * i / 20.0;
    const LevelCut cut = evolve_unimodal(hat, t);
    CHECK(cut.level == doctest::Approx(1.0 - std::sqrt(2.0 * t)).epsilon(1e-12));
    CHECK(cut.residual < 1e-10);
    CHECK(area_above(hat, cut.level) == doctest::Approx((1 - cut.level) * (1 - cut.level)));
    if (t > 0) CHECK(cut.rate == doctest::Approx(-2.0 / width_above(hat, cut.level)));
  }
  CHECK(evolve_unimodal(hat, 0.0).state == hat);
  CHECK(evolve_unimodal(hat, 0.5).level == 0.0);
  CHECK(code_of([] { evolve_unimodal(hat, 0.6); }) == ErrorCode::BeyondExtinction);
  const PiecewiseLinear two({0, 1, 2, 3, 4}, {0, 1, 0, 1, 0});
  CHECK(code_of([&] { evolve_unimodal(two, 0.1); }) == ErrorCode::NotUnimodal);
}

TEST_CASE("level decreases and the mass law holds on random unimodal data") {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto u0 = random_unimodal(rng);
    const double T = 0.5 * u0.mass();
    double prev = kInf;
    for (int i = 0; i <= 20; ++i) {
      const double t = T * i / 20.0;
      const LevelCut cut = evolve_unimodal(u0, t);
      CHECK(cut.level < prev);
      CHECK(std::abs(cut.state.mass() - (u0.mass() - 2 * t)) < 1e-10);
      CHECK(cut.residual < 1e-10);
      prev = cut.level;
    }
  }
}

TEST_CASE("sandwich of the hat at eps = 1/2") {
  const Sandwich s = sandwich(hat, 0.5);
  CHECK(s.lower == StepFunction::cauchy({-0.5, 0.5}, {0, 0.5, 0}));
  CHECK(s.upper == StepFunction::cauchy({-1, -0.5, 0.5, 1}, {0, 0.5, 1, 0.5, 0}));
  CHECK(brackets(s, hat, 0.0));
  CHECK(code_of([] { sandwich(hat, 0.0); }) == ErrorCode::NonpositiveTolerance);
}

TEST_CASE("step data are their own sandwich") {
  const auto u = StepFunction::cauchy({0, 1}, {0, 3, 1});
  for (double eps : {1e-3, 0.5, 10.0}) {
    const Sandwich s = sandwich(u, eps);
    CHECK(s.lower == u);
    CHECK(s.upper == u);
  }
}

TEST_CASE("sandwich width") {
  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const auto u0 = random_unimodal(rng);
    for (double eps : {0.3, 0.05, 0.01}) {
      const Sandwich s = sandwich(u0, eps);
      CHECK(brackets(s, u0, 1e-12));
      CHECK(lp_distance(s.upper, s.lower, kInf) <= eps + 1e-12);
      const double len = u0.knots().back() - u0.knots().front();
      CHECK(lp_distance(s.upper, s.lower, 1.0) <= eps * len + 1e-12);
    }
  }
}

TEST_CASE("bracket of the hat at t = 1/8 contains min(u0, 1/2)") {
  const PiecewiseLinear cut = cut_at(hat, 0.5);
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const Bracket b = evolve_continuous(hat, 0.125, eps);
    CHECK(brackets({b.lower, b.upper}, cut, 1e-12));
    CHECK(b.gap_inf <= eps + 1e-12);
  }
  CHECK(evolve_unimodal(hat, 0.125).state == cut);
}

TEST_CASE("bracket gap shrinks with eps") {
  double prev = kInf;
  for (double eps : {0.2, 0.05, 0.01, 0.002}) {
    const double gap = evolve_continuous(hat, 0.2, eps).gap_inf;
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev <= 0.002 + 1e-12);
}

TEST_CASE("level cut lies within the bracket for random unimodal data") {
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u0 = random_unimodal(rng);
    const double T = 0.5 * u0.mass();
    for (double f : {0.1, 0.4, 0.8}) {
      const Bracket b = evolve_continuous(u0, f * T, 1e-3);
      CHECK(brackets({b.lower, b.upper}, evolve_unimodal(u0, f * T).state, 1e-9));
    }
  }
}
