#pragma once

#include <cstddef>
#include <vector>

#include "tvflow/stepfn.hpp"

namespace oracle {

// Flow by a quadratic loop that recomputes every slope and every meeting
// time after each merge.
tvflow::StepFunction naive_evolve(const tvflow::StepFunction& u0, double t);

// Exact prox by enumeration: every fusion pattern and every jump-sign
// pattern gives a candidate, the true objective picks the winner. Meant for
// at most eight intervals.
tvflow::StepFunction exhaustive_prox(const tvflow::StepFunction& u0, double h);

double objective(const tvflow::StepFunction& u0, const std::vector<double>& u, double h);

// Interior values (all but the first and last interval) after ell steps by
// the local extremum rule.
std::vector<double> closed_form_interior(const tvflow::StepFunction& u0, double h,
                                         std::size_t ell);

// min_j |a_j - a_{j+1}| min(|I_j|, |I_{j+1}|).
double smallness_bound(const tvflow::StepFunction& u0);

// Value on interval k of u evaluated at its midpoint (tails: one unit out).
std::vector<double> interval_values(const tvflow::StepFunction& grid, const tvflow::StepFunction& u);

// int |u - v| on a merged grid, computed cellwise from midpoint values.
double l1_distance(const tvflow::StepFunction& u, const tvflow::StepFunction& v);

}  // namespace oracle
