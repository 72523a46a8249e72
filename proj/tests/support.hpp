#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "gpr/core.hpp"
#include "gpr/rng.hpp"

namespace testing {

inline gpr::Signal random_signal(int M, std::uint64_t seed) {
  gpr::Rng rng(seed);
  std::vector<gpr::cplx> v(static_cast<std::size_t>(M));
  for (auto& e : v) e = rng.complex_normal();
  return gpr::Signal(std::move(v));
}

inline double max_abs_diff(const gpr::Signal& a, const gpr::Signal& b) {
  double d = 0.0;
  for (int m = 0; m < a.dim(); ++m) d = std::max(d, std::abs(a[m] - b[m]));
  return d;
}

// e^{i theta} computed without the library's root-of-unity helper.
inline gpr::cplx expi(double theta) { return std::polar(1.0, theta); }

}  // namespace testing
