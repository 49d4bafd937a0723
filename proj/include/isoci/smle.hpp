#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "isoci/current_status.hpp"
#include "isoci/kernel.hpp"
#include "isoci/step_function.hpp"

namespace isoci {

//! Default estimation bandwidth: (domain length) * n^{-1/5}.
inline double bandwidth_estimate(double domain_length, std::size_t n) {
  return domain_length * std::pow(static_cast<double>(n), -0.2);
}

//! Default confidence-interval bandwidth (undersmoothed):
//! (domain length) * n^{-1/4}.
inline double bandwidth_ci(double domain_length, std::size_t n) {
  return domain_length * std::pow(static_cast<double>(n), -0.25);
}

//! Smoothed MLE of a distribution function on [0, b] with reflection
//! boundary correction:
//!   F~(t) = int { IK((t-x)/h) + IK((t+x)/h) - IK((2b-t-x)/h) } dF(x).
//! The integral against the step-function MLE is an exact finite sum over
//! its jump atoms. F~(0) = 0 and F~(b) = total mass exactly.
template <class Kernel = TriweightKernel>
class SmoothCdf {
public:
  SmoothCdf(const StepFunction& mle, double h, double b) : h_(h), b_(b) {
    if (!(h > 0.0) || !(h < b))
      throw std::invalid_argument("smoothed MLE: need 0 < h < b");
    if (mle.continuity() != Continuity::right_continuous)
      throw std::invalid_argument("smoothed MLE: needs a right-continuous CDF fit");
    double prev = 0.0;
    for (std::size_t i = 0; i < mle.size(); ++i) {
      const double jump = mle.values()[i] - prev;
      prev = mle.values()[i];
      if (jump != 0.0) {
        xs_.push_back(mle.knots()[i]);
        mass_.push_back(jump);
      }
    }
  }

  double operator()(double t) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < xs_.size(); ++j) {
      const double x = xs_[j];
      acc += mass_[j] * (Kernel::cdf((t - x) / h_) + Kernel::cdf((t + x) / h_) -
                         Kernel::cdf((2.0 * b_ - t - x) / h_));
    }
    return acc;
  }

  //! Plain convolution without the boundary terms.
  double uncorrected(double t) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < xs_.size(); ++j)
      acc += mass_[j] * Kernel::cdf((t - xs_[j]) / h_);
    return acc;
  }

  double bandwidth() const { return h_; }
  double domain_end() const { return b_; }

private:
  std::vector<double> xs_, mass_;
  double h_, b_;
};

//! Smoothed MLE of a decreasing density on [0, b]. The corrected form is
//! the derivative of the boundary-corrected CDF smoother applied to the
//! integrated Grenander fit:
//!   g~(t) = int { K_h(t-x) + K_h(t+x) + K_h(2b-t-x) } g(x) dx,
//! evaluated exactly piece by piece. uncorrected() evaluates the Stieltjes
//! form -int IK_surv((t-x)/h) dg(x) over the jump atoms of g instead.
template <class Kernel = TriweightKernel>
class SmoothDensity {
public:
  SmoothDensity(const StepFunction& gren, double h, double b) : h_(h), b_(b) {
    if (!(h > 0.0) || !(h < b))
      throw std::invalid_argument("smoothed density: need 0 < h < b");
    if (gren.continuity() != Continuity::left_continuous)
      throw std::invalid_argument("smoothed density: needs a left-continuous fit");
    double prev_knot = 0.0;
    double prev_val = 0.0;
    for (std::size_t i = 0; i < gren.size(); ++i) {
      const double v = gren.values()[i];
      const double k = gren.knots()[i];
      lo_.push_back(prev_knot);
      hi_.push_back(k);
      val_.push_back(v);
      atom_x_.push_back(prev_knot);
      atom_d_.push_back(v - prev_val);
      prev_knot = k;
      prev_val = v;
    }
    atom_x_.push_back(prev_knot);
    atom_d_.push_back(-prev_val);
  }

  double operator()(double t) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < val_.size(); ++i) {
      if (val_[i] == 0.0) continue;
      const double lo = lo_[i], hi = hi_[i];
      const double direct = Kernel::cdf((t - lo) / h_) - Kernel::cdf((t - hi) / h_);
      const double left = Kernel::cdf((t + hi) / h_) - Kernel::cdf((t + lo) / h_);
      const double right = Kernel::cdf((2.0 * b_ - t - lo) / h_) -
                           Kernel::cdf((2.0 * b_ - t - hi) / h_);
      acc += val_[i] * (direct + left + right); // exact piece integrals
    }
    return acc;
  }

  double uncorrected(double t) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < atom_x_.size(); ++j)
      acc -= atom_d_[j] * Kernel::surv((t - atom_x_[j]) / h_);
    return acc;
  }

  double bandwidth() const { return h_; }
  double domain_end() const { return b_; }

private:
  std::vector<double> lo_, hi_, val_;    // pieces of the source density
  std::vector<double> atom_x_, atom_d_;  // jump atoms of the source density
  double h_, b_;
};

template <class Kernel = TriweightKernel>
SmoothCdf<Kernel> smle_cdf(const StepFunction& mle, double h, double b) {
  return SmoothCdf<Kernel>(mle, h, b);
}

template <class Kernel = TriweightKernel>
SmoothDensity<Kernel> smle_density(const StepFunction& gren, double h, double b) {
  return SmoothDensity<Kernel>(gren, h, b);
}

//! Studentized standard deviation of the smoothed MLE:
//! S_nh(t)^2 = n^-2 sum { K_h(t-T_i) - K_h(t+T_i) - K_h(2b-t-T_i) }^2
//!                       (Delta_i - F(T_i))^2.
template <class Kernel = TriweightKernel>
double studentized_sd(const CurrentStatusSample& s, const StepFunction& mle,
                      double t, double h, double b) {
  if (!(h > 0.0) || !(h < b))
    throw std::invalid_argument("studentized_sd: need 0 < h < b");
  const double n = static_cast<double>(s.n());
  double acc = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double ti = s.times()[i];
    const double w = (Kernel::density((t - ti) / h) -
                      Kernel::density((t + ti) / h) -
                      Kernel::density((2.0 * b - t - ti) / h)) /
                     h;
    const double resid = s.indicators()[i] - mle.eval(ti);
    acc += w * w * resid * resid;
  }
  return std::sqrt(acc) / n;
}

//! Analytic asymptotic bias of the smoothed MLE for the truncated
//! exponential truth f0(x) = e^-x / (1 - e^-2) on [0, b], b = 2:
//! interior: -h^2 e^-t m2 / (2 (1 - e^-2)); near either boundary the
//! kernel mass beyond the edge reduces m2 by 2 int_v^1 (u-v)^2 K(u) du.
template <class Kernel = TriweightKernel>
double asymptotic_bias_truncexp(double t, double h, double b = 2.0) {
  if (t < 0.0 || t > b)
    throw std::domain_error("asymptotic_bias_truncexp: t outside [0, b]");
  double m2 = Kernel::second_moment();
  if (t < h || t > b - h) {
    const double v = (t < h) ? t / h : (b - t) / h;
    const double partial =
        Kernel::moment2(v) - 2.0 * v * Kernel::moment1(v) + v * v * Kernel::moment0(v);
    m2 -= 2.0 * partial;
  }
  return -h * h * std::exp(-t) * m2 / (2.0 * (1.0 - std::exp(-2.0)));
}

} // namespace isoci
