#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "sphase/errors.hpp"

namespace sphase {

struct RootResult {
  double x;
  double fx;
  int iterations;
};

/// Brent's method on [a, b]. fa and fb are f(a) and f(b) when the caller has
/// them already. Throws NumericalError when the root is not bracketed or the
/// iteration cap is hit.
template <class F>
RootResult brent(F&& f, double a, double b, double fa, double fb, double xtol = 1e-15, int max_iter = 200) {
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  if ((fa > 0.0) == (fb > 0.0))
    throw NumericalError("brent: root not bracketed on [" + std::to_string(a) + ", " + std::to_string(b) +
                         "] (f = " + std::to_string(fa) + ", " + std::to_string(fb) + ")");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 1; iter <= max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 0.5 * xtol;
    const double half = 0.5 * (c - b);
    if (std::abs(half) <= tol || fb == 0.0) return {b, fb, iter};
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * half * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * half * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = half;
        e = d;
      }
    } else {
      d = half;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : std::copysign(tol, half);
    fb = f(b);
  }
  throw NumericalError("brent: no convergence within " + std::to_string(max_iter) + " iterations");
}

template <class F>
RootResult brent(F&& f, double a, double b, double xtol = 1e-15, int max_iter = 200) {
  const double fa = f(a);
  const double fb = f(b);
  return brent(f, a, b, fa, fb, xtol, max_iter);
}

} // namespace sphase
