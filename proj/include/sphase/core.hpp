#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "sphase/errors.hpp"

namespace sphase {

inline constexpr double pi = std::numbers::pi;

// Numerical tolerances shared by every solver. The defaults are what the CLI
// uses when SPHASE_TOL_* is unset.
struct Tolerances {
  double quad = 1e-10;          // relative agreement of successive quadrature levels
  double root = 1e-10;          // |H(eta) kappa - 1| and |F(phi) kappa - 1| contract
  double critical_band = 1e-12; // relative band treated as "kappa equals a critical value"
};

// ---------------------------------------------------------------------------
// Gamma function
// ---------------------------------------------------------------------------

namespace detail {

// Lanczos approximation, g = 7, nine terms (Godfrey's coefficient set).
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// log Gamma(x) for x >= 0.5
inline double lanczos_log_gamma(double x) {
  const double z = x - 1.0;
  double a = lanczos_coef[0];
  for (std::size_t i = 1; i < lanczos_coef.size(); ++i) a += lanczos_coef[i] / (z + static_cast<double>(i));
  const double t = z + lanczos_g + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

} // namespace detail

// Largest argument whose Gamma value is a finite double.
inline constexpr double gamma_max_argument = 171.6243769563027;

inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma: argument must be positive and finite, got " + std::to_string(x));
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::log(pi / std::sin(pi * x)) - detail::lanczos_log_gamma(1.0 - x);
  }
  return detail::lanczos_log_gamma(x);
}

inline double gamma_fn(double x) {
  if (!(x > 0.0) || std::isnan(x)) throw DomainError("gamma_fn: argument must be positive, got " + std::to_string(x));
  if (x > gamma_max_argument) throw DomainError("gamma_fn: Gamma(" + std::to_string(x) + ") overflows double precision");
  if (x < 0.5) return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
  return std::exp(detail::lanczos_log_gamma(x));
}

// ---------------------------------------------------------------------------
// Sphere geometry
// ---------------------------------------------------------------------------

inline void require_dimension(int d) {
  if (d < 1) throw DomainError("sphere dimension d must be >= 1, got " + std::to_string(d));
}

// |S^d|, the surface area of the unit d-sphere in R^{d+1}.
inline double sphere_area(int d) {
  require_dimension(d);
  const double h = 0.5 * (d + 1);
  return 2.0 * std::pow(pi, h) / gamma_fn(h);
}

// w_d, the volume of the unit d-ball.
inline double ball_volume(int d) {
  require_dimension(d);
  return std::pow(pi, 0.5 * d) / gamma_fn(0.5 * d + 1.0);
}

struct SphereGeometry {
  int d;
  double area;        // |S^d|
  double ball_volume; // w_d

  explicit SphereGeometry(int dim) : d(dim), area(sphere_area(dim)), ball_volume(sphase::ball_volume(dim)) {}

  // d * w_d = |S^{d-1}|, the prefactor of every axisymmetric surface integral
  // written as an integral over the polar angle.
  double shell() const { return d * ball_volume; }
};

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

inline void require_exponent(double m) {
  if (!(m > 1.0) || !std::isfinite(m))
    throw DomainError("diffusion exponent m must satisfy m > 1 (linear diffusion m = 1 is not supported), got " +
                      std::to_string(m));
}

class ModelParams {
public:
  ModelParams(double m, int d, double kappa = 0.0) : m_(m), d_(d), kappa_(kappa) {
    require_exponent(m);
    require_dimension(d);
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
      throw DomainError("interaction strength kappa must be finite and >= 0, got " + std::to_string(kappa));
  }

  double m() const { return m_; }
  int d() const { return d_; }
  double kappa() const { return kappa_; }

  ModelParams with_kappa(double kappa) const { return {m_, d_, kappa}; }

  // Exponent 1/(m-1) of the equilibrium profile.
  double profile_exponent() const { return 1.0 / (m_ - 1.0); }

  // The double-root (m > 2) analysis is only carried out on S^2.
  void require_planar_sphere_for_m_above_two(const char* what) const {
    if (m_ > 2.0 && d_ != 2)
      throw RegimeError(std::string(what) + ": m > 2 is supported only for d = 2 (got d = " + std::to_string(d_) + ")");
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
  double m_;
  int d_;
  double kappa_;
};

// lambda of the uniform state, (m/(m-1)) |S^d|^(1-m).
inline double lambda_uniform(double m, int d) {
  require_exponent(m);
  return m / (m - 1.0) * std::pow(sphere_area(d), 1.0 - m);
}

// Stability threshold of the uniform state.
inline double kappa1(double m, int d) {
  require_exponent(m);
  return m * (d + 1) * std::pow(sphere_area(d), 1.0 - m);
}

inline double uniform_density(int d) { return 1.0 / sphere_area(d); }

} // namespace sphase
