#pragma once

#include <cmath>
#include <functional>
#include <sstream>

#include "rydsense/errors.hpp"
#include "rydsense/linalg.hpp"

namespace rydsense {

struct QuadratureOutcome {
  Mat3c integral{};
  double error_abs = 0.0;
  long evaluations = 0;
};

namespace detail {

struct SimpsonState {
  const std::function<Mat3c(double)>* f = nullptr;
  double error_abs = 0.0;
  long evaluations = 0;
};

inline Mat3c simpson_recurse(SimpsonState& st, double a, const Mat3c& fa, double b,
                             const Mat3c& fb, double m, const Mat3c& fm, const Mat3c& whole,
                             double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const Mat3c flm = (*st.f)(lm);
  const Mat3c frm = (*st.f)(rm);
  st.evaluations += 2;
  const Mat3c left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm);
  const Mat3c right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb);
  const Mat3c refined = left + right;
  const double delta = max_abs(refined - whole);
  if (delta <= 15.0 * tol || (b - a) < 1e-14 * (std::abs(a) + std::abs(b) + 1.0)) {
    st.error_abs += delta / 15.0;
    return refined + (1.0 / 15.0) * (refined - whole);
  }
  if (depth <= 0) {
    std::ostringstream msg;
    msg << "adaptive quadrature: recursion depth exhausted, local error " << delta / 15.0;
    throw QuadratureNotConverged(msg.str(), delta / 15.0);
  }
  return simpson_recurse(st, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(st, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature for matrix-valued integrands; error control on
// the max-abs entry.
inline QuadratureOutcome integrate_adaptive(const std::function<Mat3c(double)>& f, double a,
                                            double b, double tol_abs, int max_depth = 28) {
  detail::SimpsonState st;
  st.f = &f;
  const Mat3c fa = f(a);
  const Mat3c fb = f(b);
  const double m = 0.5 * (a + b);
  const Mat3c fm = f(m);
  st.evaluations = 3;
  const Mat3c whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  QuadratureOutcome out;
  out.integral = detail::simpson_recurse(st, a, fa, b, fb, m, fm, whole, tol_abs, max_depth);
  out.error_abs = st.error_abs;
  out.evaluations = st.evaluations;
  return out;
}

}  // namespace rydsense
