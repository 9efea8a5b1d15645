#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "sphase/core.hpp"
#include "sphase/errors.hpp"
#include "sphase/grid.hpp"
#include "sphase/quadrature.hpp"

namespace sphase {

/// Energy of a sampled density: (1/(m-1)) sum w rho^m - (kappa/2) s^2 + kappa/2.
inline double discrete_energy(const GridDensity& rho, double m, double kappa) {
  require_exponent(m);
  double entropy = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) entropy += rho.weights[i] * std::pow(rho.values[i], m);
  const double s = rho.first_moment();
  return entropy / (m - 1.0) - 0.5 * kappa * s * s + 0.5 * kappa;
}

/// Projection onto {values >= 0, sum w values = 1} in the w-weighted norm:
/// values_i = max(v_i - tau, 0) with tau fixed by the mass constraint.
inline void project_to_simplex(GridDensity& rho) {
  const std::size_t n = rho.size();
  if (n == 0) throw DomainError("project_to_simplex: empty grid");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rho.values[a] > rho.values[b]; });
  double w_sum = 0.0, wv_sum = 0.0, tau = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    w_sum += rho.weights[i];
    wv_sum += rho.weights[i] * rho.values[i];
    const double t = (wv_sum - 1.0) / w_sum;
    if (k + 1 < n && rho.values[order[k + 1]] > t) continue;
    tau = t;
    break;
  }
  for (double& v : rho.values) v = std::max(v - tau, 0.0);
}

struct OracleOptions {
  int starts = 5;
  int max_iterations = 100000;
  double min_decrease = 1e-12;
  double armijo = 1e-4;
};

struct OracleRun {
  GridDensity density;
  double energy;
  int iterations;
  bool converged;
};

struct OracleResult {
  GridDensity density;
  double energy;
  bool converged;        // every start terminated on the decrease criterion
  int best_start;
  std::vector<double> start_energies;
};

/// Projected gradient descent with Armijo backtracking from a step of 1.
inline OracleRun descend(GridDensity rho, double m, double kappa, const OracleOptions& opt = {}) {
  const std::size_t n = rho.size();
  std::vector<double> cos_t(n), grad(n);
  for (std::size_t i = 0; i < n; ++i) cos_t[i] = std::cos(rho.nodes[i]);
  project_to_simplex(rho);
  double energy = discrete_energy(rho, m, kappa);
  GridDensity trial = rho;
  const double c = m / (m - 1.0);

  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    const double s = rho.first_moment();
    for (std::size_t i = 0; i < n; ++i) grad[i] = c * std::pow(rho.values[i], m - 1.0) - kappa * s * cos_t[i];

    double step = 1.0;
    double trial_energy = energy;
    bool accepted = false;
    while (step > 1e-30) {
      for (std::size_t i = 0; i < n; ++i) trial.values[i] = rho.values[i] - step * grad[i];
      project_to_simplex(trial);
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += rho.weights[i] * grad[i] * (trial.values[i] - rho.values[i]);
      trial_energy = discrete_energy(trial, m, kappa);
      if (trial_energy <= energy + opt.armijo * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return {rho, energy, iter, true};
    const double decrease = energy - trial_energy;
    std::swap(rho.values, trial.values);
    energy = trial_energy;
    if (decrease < opt.min_decrease) return {rho, energy, iter, true};
  }
  return {rho, energy, opt.max_iterations, false};
}

/// Multi-start projected gradient descent on an n-node grid. Start 0 is a
/// perturbed uniform density, the others are random polar caps.
inline OracleResult minimize_energy(double m, int d, double kappa, int grid_size, std::uint64_t seed,
                                    const OracleOptions& opt = {}) {
  const ModelParams params(m, d, kappa);
  if (grid_size < 100) throw DomainError("minimize_energy: grid_size must be >= 100, got " + std::to_string(grid_size));
  if (opt.starts < 1) throw DomainError("minimize_energy: need at least one start");
  const GridDensity grid = make_grid(d, grid_size);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> log_width(std::log(0.5), std::log(40.0));

  OracleResult best{grid, 0.0, true, -1, {}};
  for (int k = 0; k < opt.starts; ++k) {
    GridDensity start = grid;
    const double a = k == 0 ? 0.0 : std::exp(log_width(rng));
    for (std::size_t i = 0; i < start.size(); ++i) {
      const double noise = 1.0 + 0.1 * unit(rng);
      start.values[i] = std::exp(-a * (1.0 - std::cos(start.nodes[i]))) * noise;
    }
    const double mass = start.integral();
    for (double& v : start.values) v /= mass;
    OracleRun run = descend(std::move(start), m, kappa, opt);
    best.start_energies.push_back(run.energy);
    best.converged = best.converged && run.converged;
    if (best.best_start < 0 || run.energy < best.energy) {
      best.energy = run.energy;
      best.density = std::move(run.density);
      best.best_start = k;
    }
  }
  return best;
}

/// Angular radius of the region carrying density above the threshold,
/// measured from the pole the mass leans towards (the energy only sees s^2,
/// so a cap around either pole is a minimizer).
inline double support_radius(const GridDensity& rho, double threshold = 1e-8) {
  if (rho.first_moment() >= 0.0) {
    double r = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
      if (rho.values[i] > threshold) r = rho.nodes[i];
    return r;
  }
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (rho.values[i] > threshold) return pi - rho.nodes[i];
  return 0.0;
}

// Node index closest to a support radius measured from the leaning pole.
inline std::size_t support_edge_index(const GridDensity& rho, double radius) {
  const double target = rho.first_moment() >= 0.0 ? radius : pi - radius;
  std::size_t best = 0;
  for (std::size_t i = 1; i < rho.size(); ++i)
    if (std::abs(rho.nodes[i] - target) < std::abs(rho.nodes[best] - target)) best = i;
  return best;
}

/// The four-integral combination whose sign decides the monotonicity of H:
///   A(p-1, d-1) A(p-1, d+1) - A(p-2, d+1) A(p, d-1),
/// A(a, q) = int_0^pi (xi + cos t)^a sin^q t dt, p = 1/(m-1).
inline double verify_Hmd_sign(double xi, double m, int d, double rel_tol = 1e-13) {
  require_exponent(m);
  require_dimension(d);
  if (!(xi > 1.0) || !std::isfinite(xi)) throw DomainError("verify_Hmd_sign: xi must exceed 1, got " + std::to_string(xi));
  const double p = 1.0 / (m - 1.0);
  auto a = [&](double e, double q) { return kernel_integral(e, q, 0, -xi, pi, rel_tol); };
  return a(p - 1.0, d - 1.0) * a(p - 1.0, d + 1.0) - a(p - 2.0, d + 1.0) * a(p, d - 1.0);
}

} // namespace sphase
