#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sphase/core.hpp"
#include "sphase/errors.hpp"

namespace sphase {

struct QuadratureResult {
  double value = 0.0;
  double l1 = 0.0;            // integral of |f|, used to scale the convergence test
  std::size_t evaluations = 0;
};

inline constexpr std::size_t max_quadrature_nodes = std::size_t{1} << 20;

/// Double-exponential (tanh-sinh) quadrature on [a, b].
///
/// The integrand is called as f(x, x - a, b - x); the two distances are
/// computed from the transformation directly, so they keep full relative
/// precision next to the endpoints where x itself has rounded to a or b.
/// This is what lets callers evaluate algebraic endpoint singularities such
/// as (cos x - cos b)^p without cancellation.
///
/// The step is halved until two successive estimates agree to rel_tol
/// (relative to the integral of |f|). Exceeding max_nodes evaluations is an
/// AccuracyError.
template <class F>
QuadratureResult integrate_tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-10,
                                     std::size_t max_nodes = max_quadrature_nodes) {
  if (!(b > a)) {
    if (b == a) return {};
    throw DomainError("integrate_tanh_sinh: empty or reversed interval");
  }
  const double len = b - a;
  constexpr double t_max = 6.0;
  constexpr int min_level = 3;

  QuadratureResult out;
  double raw = 0.0;
  double raw_abs = 0.0;

  auto add_node = [&](double t) {
    const double v = 0.5 * pi * std::sinh(t);
    const double e = std::exp(-2.0 * std::abs(v));
    const double near = len * e / (1.0 + e);
    const double far = len / (1.0 + e);
    const double w = 0.5 * len * (0.5 * pi * std::cosh(t)) * 4.0 * e / ((1.0 + e) * (1.0 + e));
    const double dl = t >= 0.0 ? far : near;
    const double dr = t >= 0.0 ? near : far;
    if (dl <= 0.0 || dr <= 0.0 || w == 0.0) return;
    const double x = dl <= dr ? a + dl : b - dr;
    const double fx = f(x, dl, dr);
    ++out.evaluations;
    if (!std::isfinite(fx))
      throw AccuracyError("integrate_tanh_sinh: non-finite integrand value at x = " + std::to_string(x));
    raw += w * fx;
    raw_abs += w * std::abs(fx);
  };

  // level 0, h = 1
  add_node(0.0);
  for (int k = 1; k <= static_cast<int>(t_max); ++k) {
    add_node(static_cast<double>(k));
    add_node(-static_cast<double>(k));
  }
  double h = 1.0;
  double previous = h * raw;

  for (int level = 1;; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_max; t += 2.0 * h) {
      add_node(t);
      add_node(-t);
    }
    out.value = h * raw;
    out.l1 = h * raw_abs;
    if (level >= min_level && std::abs(out.value - previous) <= rel_tol * out.l1) return out;
    if (out.l1 == 0.0 && level >= min_level) return out;
    if (out.evaluations > max_nodes)
      throw AccuracyError("integrate_tanh_sinh: no convergence to relative tolerance " + std::to_string(rel_tol) +
                          " within " + std::to_string(max_nodes) + " nodes (last change " +
                          std::to_string(std::abs(out.value - previous)) + ")");
    previous = out.value;
  }
}

// ---------------------------------------------------------------------------
// Kernel integrals  int_0^upper (cos t - c)^p sin^q t cos^r t dt
// ---------------------------------------------------------------------------

struct KernelIntegralSpec {
  double p = 0.0;     // exponent of (cos t - c)
  double q = 0.0;     // sine power
  int r = 0;          // cosine power
  double c = -1.0;    // offset; either <= cos(upper) or equal to it
  double upper = pi;  // upper limit, in (0, pi]
};

inline constexpr double kernel_offset_match = 1e-12;

namespace detail {

// sin of an angle x in [0, pi], given its distance from pi as well. The
// complement is exact next to pi, where sin(x) itself would lose digits.
inline double sin_with_complement(double x, double pi_minus_x) {
  return x <= 0.5 * pi ? std::sin(x) : std::sin(pi_minus_x);
}

} // namespace detail

/// The integrand of kernel_integral with the mode checks already applied.
/// Evaluated from the distance to the upper limit, which keeps the vanishing
/// base accurate right up to the endpoint.
class KernelIntegrand {
public:
  explicit KernelIntegrand(const KernelIntegralSpec& s) : s_(s) {
    if (!(s.upper > 0.0) || !(s.upper <= pi))
      throw DomainError("kernel_integral: upper limit must lie in (0, pi], got " + std::to_string(s.upper));
    if (!(s.q >= 0.0) || !std::isfinite(s.q)) throw DomainError("kernel_integral: sine power q must be >= 0");
    if (s.r < 0) throw DomainError("kernel_integral: cosine power r must be >= 0");
    if (!std::isfinite(s.p)) throw DomainError("kernel_integral: exponent p must be finite");
    pi_minus_upper_ = pi - s.upper;
    const double cos_upper = std::cos(s.upper);
    if (s.p == 0.0) return;
    if (!std::isfinite(s.c)) throw DomainError("kernel_integral: offset c must be finite");
    if (std::abs(s.c - cos_upper) <= kernel_offset_match) {
      const bool at_pole = pi_minus_upper_ <= 1e-15;
      const double vanishing_order = at_pole ? 2.0 * s.p + s.q : s.p;
      if (!(vanishing_order > -1.0))
        throw DivergentIntegralError("kernel_integral: (cos t - cos upper)^p diverges at the upper limit for p = " +
                                     std::to_string(s.p) + ", q = " + std::to_string(s.q));
    } else if (s.c < cos_upper) {
      offset_ = cos_upper - s.c;
    } else {
      throw DomainError("kernel_integral: offset c = " + std::to_string(s.c) + " exceeds cos(upper) = " +
                        std::to_string(cos_upper) + "; the base would be negative");
    }
  }

  bool vanishes_at_upper() const { return s_.p != 0.0 && offset_ == 0.0; }

  // Integrand at t = upper - dr.
  double at_distance(double dr) const { return (*this)(s_.upper - dr, 0.0, dr); }

  // Summed in log space: at upper = pi the base vanishes quadratically and
  // underflows long before sin^q t makes the product small.
  double operator()(double t, double /*dl*/, double dr) const {
    double log_v = 0.0;
    if (s_.q != 0.0) log_v += s_.q * std::log(detail::sin_with_complement(t, pi_minus_upper_ + dr));
    if (s_.p != 0.0) {
      // cos t - cos upper = 2 sin((upper + t)/2) sin((upper - t)/2)
      const double a = detail::sin_with_complement(s_.upper - 0.5 * dr, pi_minus_upper_ + 0.5 * dr);
      const double b = std::sin(0.5 * dr);
      const double log_base = offset_ == 0.0 ? std::log(2.0) + std::log(a) + std::log(b) : std::log(2.0 * a * b + offset_);
      log_v += s_.p * log_base;
    }
    double v = std::exp(log_v);
    if (s_.r != 0) {
      const double ct = std::cos(t);
      for (int i = 0; i < s_.r; ++i) v *= ct;
    }
    return v;
  }

private:
  KernelIntegralSpec s_;
  double pi_minus_upper_ = 0.0;
  double offset_ = 0.0;
};

/// Evaluates int_0^upper (cos t - c)^p sin^q t cos^r t dt.
///
/// Two modes:
///  - strict (c == cos(upper) within 1e-12): the base vanishes at the upper
///    limit. Convergence needs p > -1, or 2p + q > -1 when upper == pi.
///  - offset (c < cos(upper)): the base stays positive; any finite p is fine.
///    c <= -1 with upper = pi is the full-support case.
/// c > cos(upper) makes the base negative inside the interval and is a
/// DomainError.
inline double kernel_integral(const KernelIntegralSpec& s, double rel_tol = 1e-10) {
  const KernelIntegrand f(s);
  return integrate_tanh_sinh(f, 0.0, s.upper, rel_tol).value;
}

inline double kernel_integral(double p, double q, int r, double c, double upper, double rel_tol = 1e-10) {
  return kernel_integral(KernelIntegralSpec{p, q, r, c, upper}, rel_tol);
}

// ---------------------------------------------------------------------------
// Gauss-Jacobi rules
// ---------------------------------------------------------------------------

struct GaussRule {
  std::vector<double> nodes;   // increasing, in (-1, 1)
  std::vector<double> weights; // for the weight (1-x)^alpha (1+x)^beta
};

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix together with the first
// component of each normalized eigenvector (implicit QL, Golub-Welsch).
inline void tridiagonal_ql(std::vector<double>& diag, std::vector<double>& off, std::vector<double>& first) {
  const int n = static_cast<int>(diag.size());
  first.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 0) return;
  first[0] = 1.0;
  off.resize(static_cast<std::size_t>(n), 0.0);
  off[static_cast<std::size_t>(n - 1)] = 0.0;
  constexpr double eps = 1e-17;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int mm;
    do {
      for (mm = l; mm < n - 1; ++mm) {
        const double dd = std::abs(diag[mm]) + std::abs(diag[mm + 1]);
        if (std::abs(off[mm]) <= eps * dd) break;
      }
      if (mm != l) {
        if (++iter > 100) throw NumericalError("tridiagonal_ql: eigenvalue iteration did not converge");
        double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
        double r = std::hypot(g, 1.0);
        g = diag[mm] - diag[l] + off[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        bool underflow = false;
        for (i = mm - 1; i >= l; --i) {
          double f = s * off[i];
          const double b = c * off[i];
          r = std::hypot(f, g);
          off[i + 1] = r;
          if (r == 0.0) {
            diag[i + 1] -= p;
            off[mm] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = diag[i + 1] - p;
          r = (diag[i] - g) * s + 2.0 * c * b;
          p = s * r;
          diag[i + 1] = g + p;
          g = c * r - b;
          f = first[i + 1];
          first[i + 1] = s * first[i] + c * f;
          first[i] = c * first[i] - s * f;
        }
        if (underflow) continue;
        diag[l] -= p;
        off[l] = g;
        off[mm] = 0.0;
      }
    } while (mm != l);
  }
}

} // namespace detail

/// n-point Gauss rule for the weight (1-x)^alpha (1+x)^beta on [-1, 1],
/// alpha, beta > -1.
inline GaussRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw DomainError("gauss_jacobi: need at least one node");
  if (!(alpha > -1.0) || !(beta > -1.0)) throw DomainError("gauss_jacobi: exponents must exceed -1");
  const double ab = alpha + beta;
  std::vector<double> diag(static_cast<std::size_t>(n));
  std::vector<double> off(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    const double two_k = 2.0 * k + ab;
    if (k == 0) {
      diag[0] = (beta - alpha) / (ab + 2.0);
    } else {
      diag[k] = (beta * beta - alpha * alpha) / (two_k * (two_k + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    const double kk = k;
    const double two_k = 2.0 * kk + ab;
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b2 = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) / (two_k * two_k * (two_k + 1.0) * (two_k - 1.0));
    }
    off[static_cast<std::size_t>(k - 1)] = std::sqrt(b2);
  }
  std::vector<double> first;
  detail::tridiagonal_ql(diag, off, first);

  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + log_gamma(alpha + 1.0) + log_gamma(beta + 1.0) -
                              log_gamma(ab + 2.0));
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return diag[i] < diag[j]; });
  GaussRule rule;
  rule.nodes.reserve(order.size());
  rule.weights.reserve(order.size());
  for (std::size_t i : order) {
    rule.nodes.push_back(diag[i]);
    rule.weights.push_back(mu0 * first[i] * first[i]);
  }
  return rule;
}

inline GaussRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

} // namespace sphase
