#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sphase/core.hpp"
#include "sphase/errors.hpp"
#include "sphase/quadrature.hpp"

namespace sphase {

// Axisymmetric function sampled on polar angles, with weights for the surface
// measure dS = |S^(d-1)| sin^(d-1) t dt.
struct GridDensity {
  std::vector<double> nodes;   // polar angles, increasing
  std::vector<double> weights;
  std::vector<double> values;

  std::size_t size() const { return nodes.size(); }

  double integral() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) acc += weights[i] * values[i];
    return acc;
  }

  // int cos t * f dS, the component of int x f along the symmetry axis
  double first_moment() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) acc += weights[i] * values[i] * std::cos(nodes[i]);
    return acc;
  }

  // Local node spacing at index i (half the distance between neighbours).
  double spacing(std::size_t i) const {
    const double left = i > 0 ? nodes[i] - nodes[i - 1] : nodes[i];
    const double right = i + 1 < size() ? nodes[i + 1] - nodes[i] : pi - nodes[i];
    return std::max(left, right);
  }
};

/// Gauss-Jacobi nodes in u = cos t with weight (1-u^2)^((d-2)/2), so that
/// sum w f(t_i) integrates polynomials in cos t exactly over S^d.
inline GridDensity make_grid(int d, int n) {
  require_dimension(d);
  if (n < 2) throw DomainError("make_grid: need at least 2 nodes, got " + std::to_string(n));
  const double a = 0.5 * (d - 2);
  const GaussRule rule = gauss_jacobi(n, a, a);
  const double shell = SphereGeometry(d).shell();
  GridDensity g;
  g.nodes.resize(rule.nodes.size());
  g.weights.resize(rule.nodes.size());
  g.values.assign(rule.nodes.size(), 0.0);
  const std::size_t last = rule.nodes.size() - 1;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    // largest u first so that the angles increase
    g.nodes[i] = std::acos(rule.nodes[last - i]);
    g.weights[i] = shell * rule.weights[last - i];
  }
  return g;
}

} // namespace sphase
