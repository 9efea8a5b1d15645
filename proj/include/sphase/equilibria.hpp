#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "sphase/core.hpp"
#include "sphase/errors.hpp"
#include "sphase/quadrature.hpp"
#include "sphase/roots.hpp"

namespace sphase {

// ---------------------------------------------------------------------------
// Equilibrium descriptors
// ---------------------------------------------------------------------------

struct UniformState {
  ModelParams params;
};

// rho = ((m-1)/m (lambda + kappa s cos t))^(1/(m-1)), positive everywhere.
struct FullSupportEquilibrium {
  ModelParams params;
  double eta;    // -lambda / (kappa s), <= -1
  double s;      // norm of the centre of mass
  double lambda;
};

// Same profile cut off at the polar angle phi.
struct StrictSupportEquilibrium {
  ModelParams params;
  double phi;
  double s;
  double lambda;
};

// The one-parameter family of linear profiles rho = (lambda + kappa1 s cos t)/2
// that exists for m = 2 exactly at kappa = kappa1.
struct M2Family {
  int d;
  double s;
  double lambda;
  double kappa;

  double s_max() const { return 1.0 / (d + 1); }
  M2Family with_s(double s_new) const {
    if (!(s_new >= 0.0) || s_new > s_max() * (1.0 + 1e-14))
      throw DomainError("M2Family: s must lie in [0, " + std::to_string(s_max()) + "], got " + std::to_string(s_new));
    M2Family f = *this;
    f.s = s_new;
    return f;
  }
};

using Equilibrium = std::variant<UniformState, FullSupportEquilibrium, StrictSupportEquilibrium, M2Family>;

inline M2Family make_m2_family(int d, double s) {
  const double area = sphere_area(d);
  M2Family f{d, 1.0 / (d + 1), 2.0 / area, kappa1(2.0, d)};
  return f.with_s(s);
}

inline const char* kind_name(const Equilibrium& eq) {
  switch (eq.index()) {
  case 0: return "uniform";
  case 1: return "full_support";
  case 2: return "strict_support";
  default: return "m2_family";
  }
}

inline double kappa_of(const Equilibrium& eq) {
  return std::visit(
      [](const auto& e) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, M2Family>) return e.kappa;
        else return e.params.kappa();
      },
      eq);
}

inline double s_of(const Equilibrium& eq) {
  return std::visit(
      [](const auto& e) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, UniformState>) return 0.0;
        else return e.s;
      },
      eq);
}

// ---------------------------------------------------------------------------
// H and F
// ---------------------------------------------------------------------------

namespace detail {

// The two integrals behind H and F for the profile (cos t - c)^(1/(m-1)) on
// [0, upper]:
//   weighted = int (cos t - c)^(p-1) sin^(d+1) t   (= d (m-1) int (cos t - c)^p sin^(d-1) t cos t)
//   mass     = int (cos t - c)^p     sin^(d-1) t
// The first form avoids the cancellation of the signed cos t factor.
struct ProfileIntegrals {
  double weighted;
  double mass;
};

inline ProfileIntegrals profile_integrals(double c, double upper, double m, int d, double rel_tol) {
  const double p = 1.0 / (m - 1.0);
  return {kernel_integral(p - 1.0, d + 1.0, 0, c, upper, rel_tol), kernel_integral(p, d - 1.0, 0, c, upper, rel_tol)};
}

inline double level_function(const ProfileIntegrals& k, double m, int d) {
  const SphereGeometry g(d);
  return std::pow(g.shell(), m - 1.0) / (m * d) * k.weighted * std::pow(k.mass, m - 2.0);
}

inline double moment_ratio(const ProfileIntegrals& k, double m, int d) {
  return k.weighted / (d * (m - 1.0) * k.mass);
}

inline void require_eta(double eta) {
  if (!(eta <= -1.0) || !std::isfinite(eta))
    throw DomainError("eta must be finite and <= -1, got " + std::to_string(eta));
}

inline void require_phi(double phi) {
  if (!(phi > 0.0) || !(phi <= pi)) throw DomainError("phi must lie in (0, pi], got " + std::to_string(phi));
}

} // namespace detail

/// kappa^-1 as a function of eta along the full-support family.
inline double H_fn(double eta, double m, int d, double rel_tol = 1e-10) {
  require_exponent(m);
  require_dimension(d);
  detail::require_eta(eta);
  return detail::level_function(detail::profile_integrals(eta, pi, m, d, rel_tol), m, d);
}

/// kappa^-1 as a function of the support angle phi along the strict-support family.
inline double F_fn(double phi, double m, int d, double rel_tol = 1e-10) {
  require_exponent(m);
  require_dimension(d);
  detail::require_phi(phi);
  return detail::level_function(detail::profile_integrals(std::cos(phi), phi, m, d, rel_tol), m, d);
}

inline double s_of_eta(double eta, double m, int d, double rel_tol = 1e-10) {
  require_exponent(m);
  detail::require_eta(eta);
  return detail::moment_ratio(detail::profile_integrals(eta, pi, m, d, rel_tol), m, d);
}

inline double s_of_phi(double phi, double m, int d, double rel_tol = 1e-10) {
  require_exponent(m);
  detail::require_phi(phi);
  return detail::moment_ratio(detail::profile_integrals(std::cos(phi), phi, m, d, rel_tol), m, d);
}

// ---------------------------------------------------------------------------
// Critical constants
// ---------------------------------------------------------------------------

/// Gamma-function expression for 1/H(-1).
inline double kappa2_closed_form(double m, int d) {
  require_exponent(m);
  require_dimension(d);
  const double p = 1.0 / (m - 1.0);
  const double log_ratio = log_gamma(0.5) + log_gamma(p + d) - log_gamma(p + 0.5 * d) - log_gamma(0.5 * (d + 1));
  const double log_k = std::log(m * (1.0 + d * (m - 1.0)) / (m - 1.0)) - (1.0 + (d - 1) * (m - 1.0)) * std::log(2.0) -
                       (m - 1.0) * std::log(sphere_area(d)) + (m - 1.0) * log_ratio;
  const double k = std::exp(log_k);
  if (!std::isfinite(k) || k == 0.0)
    throw AccuracyError("kappa2_closed_form: result not representable in double precision for m = " +
                        std::to_string(m) + ", d = " + std::to_string(d));
  return k;
}

/// Angle at which F peaks when m > 2.
inline double bar_phi(double m) {
  if (!(m > 2.0) || !std::isfinite(m)) throw DomainError("bar_phi: requires m > 2, got " + std::to_string(m));
  const double g = (m * m - m + 1.0) / (m * m - 1.0);
  return pi - std::acos(g);
}

inline double kappa3(double m, int d, double rel_tol = 1e-10) {
  require_exponent(m);
  if (!(m > 2.0)) throw DomainError("kappa3: requires m > 2, got " + std::to_string(m));
  ModelParams(m, d).require_planar_sphere_for_m_above_two("kappa3");
  return 1.0 / F_fn(bar_phi(m), m, d, rel_tol);
}

// ---------------------------------------------------------------------------
// Branch points from their parameter
// ---------------------------------------------------------------------------

inline FullSupportEquilibrium full_support_at(double eta, double m, int d, double rel_tol = 1e-10) {
  require_exponent(m);
  detail::require_eta(eta);
  const auto k = detail::profile_integrals(eta, pi, m, d, rel_tol);
  const double kappa = 1.0 / detail::level_function(k, m, d);
  const double s = detail::moment_ratio(k, m, d);
  return {ModelParams(m, d, kappa), eta, s, -kappa * s * eta};
}

inline StrictSupportEquilibrium strict_support_at(double phi, double m, int d, double rel_tol = 1e-10) {
  require_exponent(m);
  detail::require_phi(phi);
  const auto k = detail::profile_integrals(std::cos(phi), phi, m, d, rel_tol);
  const double kappa = 1.0 / detail::level_function(k, m, d);
  const double s = detail::moment_ratio(k, m, d);
  return {ModelParams(m, d, kappa), phi, s, -kappa * s * std::cos(phi)};
}

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

inline constexpr double phi_guard = 1e-9;
inline constexpr double eta_bracket_t = 1e-8; // t = -1/eta lower end, eta = -1e8

namespace detail {

inline bool near_value(double a, double b, double band) { return std::abs(a - b) <= band * std::abs(b); }

inline void check_residual(double residual, double tol, const char* what) {
  if (!(std::abs(residual) <= tol))
    throw AccuracyError(std::string(what) + ": root residual " + std::to_string(residual) + " exceeds " +
                        std::to_string(tol));
}

} // namespace detail

using M2Solution = std::variant<UniformState, M2Family, StrictSupportEquilibrium>;

/// Equilibria for m = 2: uniform below kappa1, the linear family at kappa1,
/// one strictly supported profile above.
inline M2Solution solve_m2(int d, double kappa, const Tolerances& tol = {}) {
  require_dimension(d);
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("solve_m2: kappa must be positive, got " + std::to_string(kappa));
  const double k1 = kappa1(2.0, d);
  if (detail::near_value(kappa, k1, tol.critical_band)) return make_m2_family(d, 1.0 / (d + 1));
  if (kappa < k1) return UniformState{ModelParams(2.0, d, kappa)};

  const double w = ball_volume(d);
  auto g = [&](double phi) { return kappa * 0.5 * w * kernel_integral(0.0, d + 1.0, 0, -1.0, phi, tol.quad) - 1.0; };
  const auto root = brent(g, phi_guard, pi);
  const double phi = root.x;
  detail::check_residual(g(phi), tol.root, "solve_m2");
  const double c = std::cos(phi);
  const double s = 2.0 / (d * w * kappa * kernel_integral(1.0, d - 1.0, 0, c, phi, tol.quad));
  return StrictSupportEquilibrium{ModelParams(2.0, d, kappa), phi, s, -kappa * s * c};
}

/// The full-support equilibrium at params.kappa(): H(eta) = 1/kappa.
inline FullSupportEquilibrium solve_full_support(const ModelParams& params, const Tolerances& tol = {}) {
  const double m = params.m();
  const int d = params.d();
  const double kappa = params.kappa();
  if (m == 2.0)
    throw RegimeError("solve_full_support: for m = 2 the only non-uniform full-support profiles are the family at kappa1; use solve_m2");
  const double k1 = kappa1(m, d);
  const double k2 = kappa2_closed_form(m, d);
  const std::string window = "(" + std::to_string(std::min(k1, k2)) + ", " + std::to_string(std::max(k1, k2)) + ")";
  if (!(kappa > 0.0) || detail::near_value(kappa, k1, tol.critical_band))
    throw NoSolutionError("solve_full_support: no non-uniform full-support equilibrium at kappa = " +
                          std::to_string(kappa) + "; valid window is " + window);

  auto g = [&](double t) { return H_fn(-1.0 / t, m, d, tol.quad) * kappa - 1.0; };
  const double g_hi = g(1.0);
  double eta;
  if (std::abs(g_hi) <= tol.root) {
    eta = -1.0;
  } else {
    const double g_lo = g(eta_bracket_t);
    if ((g_lo > 0.0) == (g_hi > 0.0))
      throw NoSolutionError("solve_full_support: no full-support equilibrium at kappa = " + std::to_string(kappa) +
                            "; valid window is " + window);
    const auto root = brent(g, eta_bracket_t, 1.0, g_lo, g_hi);
    eta = -1.0 / root.x;
    detail::check_residual(g(root.x), tol.root, "solve_full_support");
  }
  const double s = s_of_eta(eta, m, d, tol.quad);
  return {params, eta, s, -kappa * s * eta};
}

/// Strictly supported equilibria at params.kappa(), in increasing phi.
inline std::vector<StrictSupportEquilibrium> solve_strict_support(const ModelParams& params, const Tolerances& tol = {}) {
  const double m = params.m();
  const int d = params.d();
  const double kappa = params.kappa();
  if (m == 2.0) {
    auto sol = solve_m2(d, kappa, tol);
    if (auto* e = std::get_if<StrictSupportEquilibrium>(&sol)) return {*e};
    throw NoSolutionError("solve_strict_support: for m = 2 strict-support equilibria need kappa > kappa1 = " +
                          std::to_string(kappa1(2.0, d)));
  }
  params.require_planar_sphere_for_m_above_two("solve_strict_support");
  if (!(kappa > 0.0)) throw NoSolutionError("solve_strict_support: kappa must be positive");

  auto g = [&](double phi) { return F_fn(phi, m, d, tol.quad) * kappa - 1.0; };
  auto build = [&](double phi) {
    detail::check_residual(g(phi), tol.root, "solve_strict_support");
    const double s = s_of_phi(phi, m, d, tol.quad);
    return StrictSupportEquilibrium{params, phi, s, -kappa * s * std::cos(phi)};
  };
  const double g_pi = g(pi);

  if (m < 2.0) {
    if (g_pi <= tol.root)
      throw NoSolutionError("solve_strict_support: strict-support equilibria need kappa > kappa2 = " +
                            std::to_string(kappa2_closed_form(m, d)));
    return {build(brent(g, phi_guard, pi, g(phi_guard), g_pi).x)};
  }

  const double phi_bar = bar_phi(m);
  const double g_bar = g(phi_bar);
  if (g_bar < -tol.root)
    throw NoSolutionError("solve_strict_support: strict-support equilibria need kappa >= kappa3 = " +
                          std::to_string(1.0 / F_fn(phi_bar, m, d, tol.quad)));
  if (g_bar <= tol.root) {
    auto e = build(phi_bar);
    return {e, e};
  }
  std::vector<StrictSupportEquilibrium> out;
  out.push_back(build(brent(g, phi_guard, phi_bar - phi_guard, g(phi_guard), g(phi_bar - phi_guard)).x));
  // g_pi within the band is the eta = -1 profile, reported by solve_full_support
  if (g_pi < -tol.root) out.push_back(build(brent(g, phi_bar + phi_guard, pi, g(phi_bar + phi_guard), g_pi).x));
  return out;
}

/// Every non-uniform equilibrium at params.kappa() (zero, one or two).
inline std::vector<Equilibrium> nonuniform_equilibria(const ModelParams& params, const Tolerances& tol = {}) {
  std::vector<Equilibrium> out;
  if (params.m() == 2.0) {
    auto sol = solve_m2(params.d(), params.kappa(), tol);
    if (auto* f = std::get_if<M2Family>(&sol)) out.emplace_back(*f);
    if (auto* e = std::get_if<StrictSupportEquilibrium>(&sol)) out.emplace_back(*e);
    return out;
  }
  params.require_planar_sphere_for_m_above_two("nonuniform_equilibria");
  try {
    out.emplace_back(solve_full_support(params, tol));
  } catch (const NoSolutionError&) {
  }
  try {
    for (const auto& e : solve_strict_support(params, tol)) out.emplace_back(e);
  } catch (const NoSolutionError&) {
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

inline double density_eval(const Equilibrium& eq, double theta) {
  if (!(theta >= 0.0) || !(theta <= pi)) throw DomainError("density_eval: theta must lie in [0, pi], got " + std::to_string(theta));
  return std::visit(
      [theta](const auto& e) -> double {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, UniformState>) {
          return uniform_density(e.params.d());
        } else if constexpr (std::is_same_v<T, M2Family>) {
          return 0.5 * (e.lambda + e.kappa * e.s * std::cos(theta));
        } else {
          const double m = e.params.m();
          if constexpr (std::is_same_v<T, StrictSupportEquilibrium>) {
            if (theta >= e.phi) return 0.0;
          }
          const double base = std::max(0.0, (m - 1.0) / m * (e.lambda + e.params.kappa() * e.s * std::cos(theta)));
          return std::pow(base, 1.0 / (m - 1.0));
        }
      },
      eq);
}

struct MassMoment {
  double mass;
  double moment;
};

/// Total mass and first moment of the reconstructed density, integrated from
/// lambda, kappa and s directly.
inline MassMoment mass_and_moment(const Equilibrium& eq, double rel_tol = 1e-12) {
  return std::visit(
      [rel_tol](const auto& e) -> MassMoment {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, UniformState>) {
          return {1.0, 0.0};
        } else if constexpr (std::is_same_v<T, M2Family>) {
          const double shell = SphereGeometry(e.d).shell();
          const double q = e.d - 1.0;
          const double k0 = kernel_integral(0.0, q, 0, -1.0, pi, rel_tol);
          const double k1 = kernel_integral(0.0, q, 1, -1.0, pi, rel_tol);
          const double k2 = kernel_integral(0.0, q, 2, -1.0, pi, rel_tol);
          return {0.5 * shell * (e.lambda * k0 + e.kappa * e.s * k1), 0.5 * shell * (e.lambda * k1 + e.kappa * e.s * k2)};
        } else {
          const double m = e.params.m();
          const int d = e.params.d();
          const double kappa = e.params.kappa();
          const double p = 1.0 / (m - 1.0);
          double upper = pi;
          if constexpr (std::is_same_v<T, StrictSupportEquilibrium>) upper = e.phi;
          const double c = -e.lambda / (kappa * e.s);
          const double scale = SphereGeometry(d).shell() * std::pow((m - 1.0) / m * kappa * e.s, p);
          return {scale * kernel_integral(p, d - 1.0, 0, c, upper, rel_tol),
                  scale * kernel_integral(p, d - 1.0, 1, c, upper, rel_tol)};
        }
      },
      eq);
}

} // namespace sphase
