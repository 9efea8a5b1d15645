#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>

#include "sphase/core.hpp"
#include "sphase/equilibria.hpp"
#include "sphase/errors.hpp"
#include "sphase/grid.hpp"
#include "sphase/quadrature.hpp"
#include "sphase/roots.hpp"

namespace sphase {

struct EnergyReport {
  double entropy;        // (1/(m-1)) int rho^m
  double interaction;    // (kappa/2)(1 - s^2)
  double total;
  double gap_vs_uniform; // E[uniform] - E[rho]
};

inline double uniform_entropy(double m, int d) {
  require_exponent(m);
  return std::pow(sphere_area(d), 1.0 - m) / (m - 1.0);
}

inline EnergyReport energy_uniform(double m, int d, double kappa) {
  const ModelParams params(m, d, kappa);
  const double u = uniform_entropy(m, d);
  return {u, 0.5 * kappa, u + 0.5 * kappa, 0.0};
}

// ---------------------------------------------------------------------------
// Factorized energy gap
// ---------------------------------------------------------------------------

// (kappa/2) s^2 - entropy = g1 * g2 along either profile family; both
// factors depend only on the branch parameter, not on kappa.
struct GapFactors {
  double g1;
  double g2;
  double product() const { return g1 * g2; }
};

namespace detail {

inline GapFactors gap_factors(double c, double upper, double m, int d, double rel_tol) {
  const double p = 1.0 / (m - 1.0);
  const double weighted = kernel_integral(p - 1.0, d + 1.0, 0, c, upper, rel_tol);
  const double mass = kernel_integral(p, d - 1.0, 0, c, upper, rel_tol);
  const double power = kernel_integral(p + 1.0, d - 1.0, 0, c, upper, rel_tol);
  const double moment = weighted / (d * (m - 1.0));
  const double g1 = m * moment - 2.0 * power;
  const double g2 = 1.0 / (2.0 * (m - 1.0) * std::pow(SphereGeometry(d).shell(), m - 1.0) * std::pow(mass, m));
  return {g1, g2};
}

} // namespace detail

inline GapFactors gap_factors_full_support(double eta, double m, int d, double rel_tol = 1e-10) {
  require_exponent(m);
  detail::require_eta(eta);
  return detail::gap_factors(eta, pi, m, d, rel_tol);
}

inline GapFactors gap_factors_strict_support(double phi, double m, int d, double rel_tol = 1e-10) {
  require_exponent(m);
  detail::require_phi(phi);
  return detail::gap_factors(std::cos(phi), phi, m, d, rel_tol);
}

// E[uniform] - E[rho] along each branch, as a function of its parameter.
inline double gap_full_support(double eta, double m, int d, double rel_tol = 1e-10) {
  return uniform_entropy(m, d) + gap_factors_full_support(eta, m, d, rel_tol).product();
}

inline double gap_strict_support(double phi, double m, int d, double rel_tol = 1e-10) {
  return uniform_entropy(m, d) + gap_factors_strict_support(phi, m, d, rel_tol).product();
}

// ---------------------------------------------------------------------------
// Energy of an equilibrium
// ---------------------------------------------------------------------------

inline constexpr double factorization_tolerance = 1e-8;

namespace detail {

template <class E>
EnergyReport profile_energy(const E& e, double c, double upper, const GapFactors& factors, double rel_tol) {
  const double m = e.params.m();
  const int d = e.params.d();
  const double kappa = e.params.kappa();
  const double p = 1.0 / (m - 1.0);
  const double amp = (m - 1.0) / m * kappa * e.s;
  const double entropy =
      SphereGeometry(d).shell() * std::pow(amp, p + 1.0) * kernel_integral(p + 1.0, d - 1.0, 0, c, upper, rel_tol) / (m - 1.0);
  const double attraction = 0.5 * kappa * e.s * e.s;
  const double direct = attraction - entropy;
  const double factored = factors.product();
  const double scale = std::max({std::abs(entropy), attraction, std::abs(factored)});
  if (!(std::abs(direct - factored) <= factorization_tolerance * scale))
    throw ConsistencyError("energy_of: factorized gap " + std::to_string(factored) + " disagrees with direct value " +
                           std::to_string(direct));
  const double interaction = 0.5 * kappa * (1.0 - e.s * e.s);
  return {entropy, interaction, entropy + interaction, uniform_entropy(m, d) + factored};
}

} // namespace detail

/// Entropy, interaction energy and the gap to the uniform state. The gap comes
/// from the factorized form; the direct entropy is cross-checked against it.
inline EnergyReport energy_of(const Equilibrium& eq, double rel_tol = 1e-12) {
  return std::visit(
      [rel_tol](const auto& e) -> EnergyReport {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, UniformState>) {
          return energy_uniform(e.params.m(), e.params.d(), e.params.kappa());
        } else if constexpr (std::is_same_v<T, M2Family>) {
          // rho = (lambda + kappa s cos t) / 2, so int rho^2 expands into three moments
          const double shell = SphereGeometry(e.d).shell();
          const double q = e.d - 1.0;
          const double k0 = kernel_integral(0.0, q, 0, -1.0, pi, rel_tol);
          const double k1 = kernel_integral(0.0, q, 1, -1.0, pi, rel_tol);
          const double k2 = kernel_integral(0.0, q, 2, -1.0, pi, rel_tol);
          const double a = e.kappa * e.s;
          const double entropy = 0.25 * shell * (e.lambda * e.lambda * k0 + 2.0 * e.lambda * a * k1 + a * a * k2);
          const double interaction = 0.5 * e.kappa * (1.0 - e.s * e.s);
          const double u = uniform_entropy(2.0, e.d);
          return {entropy, interaction, entropy + interaction, u - entropy + 0.5 * e.kappa * e.s * e.s};
        } else if constexpr (std::is_same_v<T, FullSupportEquilibrium>) {
          const double m = e.params.m();
          const int d = e.params.d();
          return detail::profile_energy(e, e.eta, pi, gap_factors_full_support(e.eta, m, d, rel_tol), rel_tol);
        } else {
          const double m = e.params.m();
          const int d = e.params.d();
          return detail::profile_energy(e, std::cos(e.phi), e.phi, gap_factors_strict_support(e.phi, m, d, rel_tol), rel_tol);
        }
      },
      eq);
}

// ---------------------------------------------------------------------------
// Fourth critical value
// ---------------------------------------------------------------------------

struct KappaC {
  double value;
  double phi;          // support angle of the first strict-support branch at kappa_c
  double gap_residual; // gap of that branch re-solved at kappa_c
};

inline constexpr double kappa_c_gap_tolerance = 1e-10;

/// Interaction strength at which the narrower strict-support branch and the
/// uniform state have equal energy (m > 2, d = 2).
inline KappaC kappa_c_detail(double m, const Tolerances& tol = {}) {
  require_exponent(m);
  if (!(m > 2.0)) throw DomainError("kappa_c: requires m > 2, got " + std::to_string(m));
  constexpr int d = 2;
  const double phi_bar = bar_phi(m);
  const double k1 = kappa1(m, d);

  // support angle of the first branch at kappa1; the branch parameter runs
  // from phi_bar (kappa3) down to this angle (kappa1)
  auto level = [&](double phi) { return F_fn(phi, m, d, tol.quad) * k1 - 1.0; };
  const double phi_lo = brent(level, phi_guard, phi_bar - phi_guard).x;

  auto gap = [&](double phi) { return gap_strict_support(phi, m, d, tol.quad); };
  constexpr int samples = 16;
  double prev = gap(phi_lo);
  const double gap_lo = prev;
  for (int i = 1; i <= samples; ++i) {
    const double phi = phi_lo + (phi_bar - phi_lo) * i / samples;
    const double g = gap(phi);
    if (!(g < prev))
      throw NumericalError("kappa_c: branch gap is not monotone on the bracket (phi = " + std::to_string(phi) + ")");
    prev = g;
  }
  const double gap_hi = prev;
  if (!(gap_lo > 0.0) || !(gap_hi < 0.0))
    throw NumericalError("kappa_c: branch gap does not change sign between kappa3 and kappa1");
  const double phi_c = brent(gap, phi_lo, phi_bar, gap_lo, gap_hi).x;
  const double value = 1.0 / F_fn(phi_c, m, d, tol.quad);

  const auto branches = solve_strict_support(ModelParams(m, d, value), tol);
  const double residual = energy_of(branches.front()).gap_vs_uniform;
  if (!(std::abs(residual) <= kappa_c_gap_tolerance))
    throw AccuracyError("kappa_c: gap residual " + std::to_string(residual) + " exceeds " +
                        std::to_string(kappa_c_gap_tolerance));
  return {value, phi_c, residual};
}

inline double kappa_c(double m, const Tolerances& tol = {}) { return kappa_c_detail(m, tol).value; }

struct CriticalValues {
  double kappa1;
  double kappa2;
  std::optional<double> kappa3;
  std::optional<double> kappa_c;
  std::optional<double> bar_phi;
};

inline CriticalValues critical_values(double m, int d, const Tolerances& tol = {}) {
  require_exponent(m);
  require_dimension(d);
  CriticalValues cv{kappa1(m, d), kappa2_closed_form(m, d), std::nullopt, std::nullopt, std::nullopt};
  if (m > 2.0 && d == 2) {
    cv.bar_phi = bar_phi(m);
    cv.kappa3 = kappa3(m, d, tol.quad);
    cv.kappa_c = kappa_c(m, tol);
  }
  return cv;
}

// ---------------------------------------------------------------------------
// Global minimizer
// ---------------------------------------------------------------------------

enum class Regime { UniformOnly, UniformMin, DegenerateFamily, BranchMin, BranchMinStrict };

inline const char* regime_name(Regime r) {
  switch (r) {
  case Regime::UniformOnly: return "UniformOnly";
  case Regime::UniformMin: return "UniformMin";
  case Regime::DegenerateFamily: return "DegenerateFamily";
  case Regime::BranchMin: return "BranchMin";
  case Regime::BranchMinStrict: return "BranchMinStrict";
  }
  return "?";
}

struct MinimizerClassification {
  Regime regime;
  std::optional<Equilibrium> witness; // the global minimizer
  double gap;                         // E[uniform] - E[minimizer], >= 0
  double branch_gap;                  // same for the best non-uniform equilibrium; NaN when none exists
};

inline MinimizerClassification classify(double m, int d, double kappa, const Tolerances& tol = {}) {
  const ModelParams params(m, d, kappa);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const UniformState uniform{params};

  if (m == 2.0) {
    const auto sol = solve_m2(d, kappa, tol);
    if (std::holds_alternative<UniformState>(sol)) return {Regime::UniformMin, Equilibrium{uniform}, 0.0, nan};
    if (auto* f = std::get_if<M2Family>(&sol)) {
      const double g = energy_of(*f).gap_vs_uniform;
      return {Regime::DegenerateFamily, Equilibrium{*f}, 0.0, g};
    }
    const auto& e = std::get<StrictSupportEquilibrium>(sol);
    const double g = energy_of(e).gap_vs_uniform;
    return {Regime::BranchMinStrict, Equilibrium{e}, g, g};
  }

  if (m < 2.0) {
    if (kappa <= kappa1(m, d) * (1.0 + tol.critical_band)) return {Regime::UniformMin, Equilibrium{uniform}, 0.0, nan};
    try {
      const auto e = solve_full_support(params, tol);
      const double g = energy_of(e).gap_vs_uniform;
      return {Regime::BranchMin, Equilibrium{e}, g, g};
    } catch (const NoSolutionError&) {
    }
    const auto e = solve_strict_support(params, tol).front();
    const double g = energy_of(e).gap_vs_uniform;
    return {Regime::BranchMinStrict, Equilibrium{e}, g, g};
  }

  params.require_planar_sphere_for_m_above_two("classify");
  std::vector<StrictSupportEquilibrium> branches;
  try {
    branches = solve_strict_support(params, tol);
  } catch (const NoSolutionError&) {
    return {Regime::UniformOnly, Equilibrium{uniform}, 0.0, nan};
  }
  const auto& first = branches.front();
  const double g = energy_of(first).gap_vs_uniform;
  if (g > 0.0) return {Regime::BranchMinStrict, Equilibrium{first}, g, g};
  return {Regime::UniformMin, Equilibrium{uniform}, 0.0, g};
}

// ---------------------------------------------------------------------------
// Second variation of the uniform state
// ---------------------------------------------------------------------------

inline constexpr double zero_mean_tolerance = 1e-10;

/// int psi^2 / (int cos t psi)^2 for an axisymmetric zero-mean perturbation.
inline double stability_functional(const GridDensity& psi) {
  double l1 = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    l1 += psi.weights[i] * std::abs(psi.values[i]);
    l2 += psi.weights[i] * psi.values[i] * psi.values[i];
  }
  if (l1 == 0.0) throw DomainError("stability_functional: perturbation is identically zero");
  const double mean = psi.integral();
  if (std::abs(mean) > zero_mean_tolerance * std::max(1.0, l1))
    throw DomainError("stability_functional: perturbation must have zero mean, got " + std::to_string(mean));
  const double moment = psi.first_moment();
  if (std::abs(moment) <= 1e-14 * l1)
    throw DomainError("stability_functional: undefined for a perturbation with zero first moment");
  return l2 / (moment * moment);
}

} // namespace sphase
