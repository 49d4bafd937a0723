#pragma once

#include <cmath>

namespace isoci {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

namespace detail {

// Bisects between an accepted and a rejected candidate; returns the last
// accepted point once the gap is below tol.
template <class Accept>
double refine_boundary(double accepted, double rejected, const Accept& ok,
                       double tol) {
  while (std::abs(rejected - accepted) > tol) {
    const double mid = 0.5 * (accepted + rejected);
    if (mid == accepted || mid == rejected) break;
    if (ok(mid))
      accepted = mid;
    else
      rejected = mid;
  }
  return accepted;
}

} // namespace detail
} // namespace isoci
