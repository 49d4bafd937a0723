#pragma once

#include <cmath>

namespace isoci {

//! Triweight kernel K(u) = (35/32)(1-u^2)^3 on [-1,1], with analytic
//! antiderivatives. The only built-in kernel; smoothing routines take the
//! kernel as a template parameter so alternatives can be plugged in.
struct TriweightKernel {
  static double density(double u) {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return (35.0 / 32.0) * w * w * w;
  }

  //! IK_cdf(x) = integral of K over (-inf, x]; 0 at -1, 1/2 at 0, 1 at 1.
  static double cdf(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double x2 = x * x;
    const double poly = x * (1.0 - x2 * (1.0 - x2 * (0.6 - x2 / 7.0)));
    return 0.5 + (35.0 / 32.0) * poly;
  }

  //! IK_surv(x) = integral of K over [x, inf) = 1 - IK_cdf(x).
  static double surv(double x) { return 1.0 - cdf(x); }

  //! int u^2 K(u) du = 1/9, from the closed-form antiderivative.
  static double second_moment() { return (35.0 / 32.0) * (32.0 / 315.0); }

  // partial moments over [v, 1], used by the boundary bias formula
  static double moment0(double v) { return 1.0 - cdf(v); }

  static double moment1(double v) {
    if (v >= 1.0) return 0.0;
    if (v < -1.0) v = -1.0;
    const double w = 1.0 - v * v;
    return (35.0 / 256.0) * w * w * w * w;
  }

  static double moment2(double v) {
    if (v >= 1.0) return 0.0;
    if (v < -1.0) v = -1.0;
    const double v2 = v * v;
    const double p = v2 * v * (1.0 / 3.0 - v2 * (0.6 - v2 * (3.0 / 7.0 - v2 / 9.0)));
    return (35.0 / 32.0) * (16.0 / 315.0 - p);
  }
};

//! (K(u), IK_cdf(u)) for a kernel; mirrors the pointwise evaluation the
//! smoothing formulas rely on.
template <class Kernel = TriweightKernel>
struct KernelValues {
  double density;
  double cdf;
};

template <class Kernel = TriweightKernel>
KernelValues<Kernel> kernel_values(double u) {
  return KernelValues<Kernel>{Kernel::density(u), Kernel::cdf(u)};
}

template <class Kernel = TriweightKernel>
double kernel_second_moment() {
  return Kernel::second_moment();
}

} // namespace isoci
