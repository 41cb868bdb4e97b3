#pragma once

#include <span>
#include <vector>

#include "doctest.h"
#include "tvflow/error.hpp"

namespace testing_support {

// Error code raised by f, failing the test if none is.
template <class F>
tvflow::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const tvflow::Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return tvflow::ErrorCode::IoError;
}

inline std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace testing_support
