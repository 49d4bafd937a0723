#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "isoci/errors.hpp"

namespace isoci {

//! Finite diagram of points (x_0,y_0),...,(x_m,y_m) with x strictly
//! increasing and y_0 = 0. Index 0 is the origin; slopes are reported for
//! indices 1..m.
struct CusumDiagram {
  std::vector<double> xs;
  std::vector<double> ys;

  CusumDiagram() = default;
  CusumDiagram(std::vector<double> x, std::vector<double> y)
    : xs(std::move(x)), ys(std::move(y)) {
    validate();
  }

  std::size_t m() const { return xs.empty() ? 0 : xs.size() - 1; }

  void validate() const {
    if (xs.size() != ys.size())
      throw std::invalid_argument("cusum diagram: xs/ys length mismatch");
    if (xs.size() < 2)
      throw std::invalid_argument("cusum diagram: need at least two points");
    if (ys.front() != 0.0)
      throw std::invalid_argument("cusum diagram: y_0 must be 0");
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1]))
        throw std::invalid_argument(
            "cusum diagram: abscissae must be strictly increasing");
  }
};

//! Slopes of a convex-minorant / concave-majorant together with the hull
//! vertex indices (into 0..m, endpoints always included). slopes[i-1] is
//! the left derivative at diagram index i.
struct HullSlopes {
  std::vector<double> slopes;
  std::vector<std::size_t> vertices;
};

namespace detail {

// Slopes that agree within this tolerance are merged into one linear piece.
inline constexpr double hull_merge_tol = 1e-12;

inline double chord(const std::vector<double>& xs, const std::vector<double>& ys,
                    std::size_t p, std::size_t q) {
  return (ys[q] - ys[p]) / (xs[q] - xs[p]);
}

template <bool Convex>
HullSlopes hull_left_slopes(const CusumDiagram& d) {
  d.validate();
  const std::size_t m = d.m();
  std::vector<std::size_t> st;
  st.reserve(m + 1);
  st.push_back(0);
  for (std::size_t j = 1; j <= m; ++j) {
    while (st.size() >= 2) {
      const std::size_t u = st[st.size() - 2];
      const std::size_t v = st.back();
      const double s_uv = chord(d.xs, d.ys, u, v);
      const double s_vj = chord(d.xs, d.ys, v, j);
      const bool pop = Convex ? (s_uv >= s_vj - hull_merge_tol)
                              : (s_uv <= s_vj + hull_merge_tol);
      if (!pop) break;
      st.pop_back();
    }
    st.push_back(j);
  }
  HullSlopes out;
  out.vertices = st;
  out.slopes.resize(m);
  for (std::size_t k = 1; k < st.size(); ++k) {
    const double s = chord(d.xs, d.ys, st[k - 1], st[k]);
    for (std::size_t i = st[k - 1] + 1; i <= st[k]; ++i) out.slopes[i - 1] = s;
  }
  for (std::size_t i = 1; i < out.slopes.size(); ++i) {
    const double diff = out.slopes[i] - out.slopes[i - 1];
    const bool bad = Convex ? (diff < -1e-9) : (diff > 1e-9);
    if (bad)
      throw std::logic_error("hull slopes violate monotonicity: " +
                             std::to_string(diff));
  }
  return out;
}

} // namespace detail

//! Left derivative of the greatest convex minorant at every diagram index.
//! Output is nondecreasing; the minorant touches both endpoints.
inline HullSlopes gcm_left_slopes(const CusumDiagram& d) {
  return detail::hull_left_slopes<true>(d);
}

//! Left derivative of the least concave majorant; output nonincreasing.
inline HullSlopes lcm_left_slopes(const CusumDiagram& d) {
  return detail::hull_left_slopes<false>(d);
}

//! max_{k<=index} min_{i>=index} (y_i - y_{k-1})/(x_i - x_{k-1}).
//! O(m^2) characterization of the GCM left slope, kept as a verification
//! oracle for the stack algorithm. index is 1-based.
inline double maxmin_slope(const CusumDiagram& d, std::size_t index) {
  d.validate();
  const std::size_t m = d.m();
  if (index < 1 || index > m)
    throw std::out_of_range("maxmin_slope: index out of range");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= index; ++k) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = index; i <= m; ++i) {
      const double s = detail::chord(d.xs, d.ys, k - 1, i);
      if (s < worst) worst = s;
    }
    if (worst > best) best = worst;
  }
  return best;
}

//! min_{k<=index} max_{i>=index} mirror; equals the LCM left slope.
inline double minmax_slope(const CusumDiagram& d, std::size_t index) {
  d.validate();
  const std::size_t m = d.m();
  if (index < 1 || index > m)
    throw std::out_of_range("minmax_slope: index out of range");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= index; ++k) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = index; i <= m; ++i) {
      const double s = detail::chord(d.xs, d.ys, k - 1, i);
      if (s > worst) worst = s;
    }
    if (worst < best) best = worst;
  }
  return best;
}

} // namespace isoci
