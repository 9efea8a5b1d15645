#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "sphase/sphase.hpp"
#include "table.hpp"

namespace sphase::cli {

struct CheckResult {
  std::string name;
  bool pass;
  double margin; // distance from failing; negative when failed
  std::string detail;
};

namespace detail {

inline std::string label(double m, int d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "m=%g d=%d", m, d);
  return buf;
}

template <class F>
CheckResult guarded(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, -std::numeric_limits<double>::infinity(), std::string("exception: ") + e.what()};
  }
}

inline std::vector<double> log_spaced_eta(int n) {
  std::vector<double> eta(n);
  for (int i = 0; i < n; ++i) eta[i] = -std::pow(10.0, 4.0 * (n - 1 - i) / (n - 1)); // -1e4 ... -1
  return eta;
}

} // namespace detail

inline std::vector<CheckResult> lemma_checks(std::uint64_t seed, const Tolerances& tol = {}) {
  std::vector<CheckResult> out;
  const std::vector<double> ms = {1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 4.0};

  for (double m : ms) {
    for (int d = 1; d <= 3; ++d) {
      const std::string name = "H_monotone " + detail::label(m, d);
      out.push_back(detail::guarded(name, [&]() -> CheckResult {
        const auto eta = detail::log_spaced_eta(50);
        std::vector<double> h;
        for (double e : eta) h.push_back(H_fn(e, m, d, tol.quad));
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < h.size(); ++i) {
          const double rel = (h[i] - h[i - 1]) / std::abs(h[i - 1]);
          if (m < 2.0) margin = std::min(margin, -rel);           // decreasing in eta
          else if (m > 2.0) margin = std::min(margin, rel);       // increasing
          else margin = std::min(margin, 1e-9 - std::abs(rel));   // constant
        }
        if (m == 2.0) {
          const double spread = std::abs(h.back() - h.front()) / h.front();
          margin = std::min(margin, 1e-9 - spread);
        }
        return {name, margin > 0.0, margin, ""};
      }));
    }
  }

  for (double m : ms) {
    for (int d = 1; d <= 3; ++d) {
      const std::string name = "H_limit " + detail::label(m, d);
      out.push_back(detail::guarded(name, [&]() -> CheckResult {
        const double dev = std::abs(H_fn(-1e6, m, d, tol.quad) * kappa1(m, d) - 1.0);
        return {name, dev <= 1e-4, 1e-4 - dev, ""};
      }));
    }
  }

  for (double m : {1.2, 1.5, 1.8}) {
    for (int d = 1; d <= 3; ++d) {
      const std::string name = "F_increasing " + detail::label(m, d);
      out.push_back(detail::guarded(name, [&]() -> CheckResult {
        double prev = 0.0;
        double margin = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 50; ++i) {
          const double f = F_fn(pi * i / 50.0, m, d, tol.quad);
          margin = std::min(margin, f - prev);
          prev = f;
        }
        return {name, margin > 0.0, margin, ""};
      }));
    }
  }

  for (double m : {2.5, 3.0, 4.0}) {
    const std::string name = "F_unimodal " + detail::label(m, 2);
    out.push_back(detail::guarded(name, [&]() -> CheckResult {
      const double peak = bar_phi(m);
      const double h = 1e-5;
      double margin = std::numeric_limits<double>::infinity();
      for (int i = 1; i < 100; ++i) {
        const double phi = pi * i / 100.0;
        if (std::abs(phi - peak) < 1e-3) continue;
        const double slope = (F_fn(phi + h, m, 2, tol.quad) - F_fn(phi - h, m, 2, tol.quad)) / (2.0 * h);
        margin = std::min(margin, phi < peak ? slope : -slope);
      }
      const double top = F_fn(peak, m, 2, tol.quad);
      for (int i = 1; i <= 50; ++i) margin = std::min(margin, top - F_fn(pi * i / 50.0, m, 2, tol.quad) + 1e-15);
      return {name, margin > 0.0, margin, "peak at " + format_double(peak)};
    }));
  }

  for (double m : {1.2, 1.5, 2.0, 3.0, 5.0}) {
    for (int d = 1; d <= 3; ++d) {
      const std::string name = "Hmd_sign " + detail::label(m, d);
      out.push_back(detail::guarded(name, [&]() -> CheckResult {
        // 1/(m-1) + (d-1)/2 > 0 throughout, so the combination must be negative
        double margin = std::numeric_limits<double>::infinity();
        for (double xi : {1.01, 2.0, 10.0, 1000.0}) {
          const double v = verify_Hmd_sign(xi, m, d);
          margin = std::min(margin, std::abs(v) <= 1e-9 ? 0.0 : -v);
        }
        return {name, margin >= 0.0, margin, ""};
      }));
    }
  }

  for (double m : ms) {
    for (int d = 1; d <= 3; ++d) {
      const std::string name = "kappa2_closed_form " + detail::label(m, d);
      out.push_back(detail::guarded(name, [&]() -> CheckResult {
        const double rel = std::abs(kappa2_closed_form(m, d) * F_fn(pi, m, d, tol.quad) - 1.0);
        return {name, rel <= 1e-8, 1e-8 - rel, ""};
      }));
    }
  }

  out.push_back(detail::guarded("stability_infimum d=2", [&]() -> CheckResult {
    GridDensity grid = make_grid(2, 200);
    const double bound = 3.0 / sphere_area(2);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    double margin = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> a(8);
      for (double& x : a) x = coef(rng);
      GridDensity psi = grid;
      for (std::size_t i = 0; i < psi.size(); ++i) {
        double v = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) v += a[k] * std::cos(k * psi.nodes[i]);
        psi.values[i] = v;
      }
      double w = 0.0;
      for (double x : psi.weights) w += x;
      const double mean = psi.integral() / w;
      for (double& v : psi.values) v -= mean;
      margin = std::min(margin, stability_functional(psi) - (bound - 1e-6));
    }
    return {"stability_infimum d=2", margin >= 0.0, margin, "1000 random perturbations"};
  }));

  out.push_back(detail::guarded("critical_ordering", [&]() -> CheckResult {
    double margin = std::numeric_limits<double>::infinity();
    for (double m : {1.2, 1.5, 1.8}) margin = std::min(margin, kappa2_closed_form(m, 2) - kappa1(m, 2));
    margin = std::min(margin, 1e-10 * kappa1(2.0, 2) - std::abs(kappa1(2.0, 2) - kappa2_closed_form(2.0, 2)));
    for (double m : {2.5, 3.0, 4.0}) {
      const auto cv = critical_values(m, 2, tol);
      margin = std::min({margin, cv.kappa2 - *cv.kappa3, cv.kappa1 - cv.kappa2, *cv.kappa_c - *cv.kappa3,
                         cv.kappa1 - *cv.kappa_c});
    }
    return {"critical_ordering", margin > 0.0, margin, ""};
  }));
  return out;
}

struct OracleProbe {
  double m;
  double kappa;
};

inline std::vector<OracleProbe> oracle_probes() {
  return {{1.5, 1.0}, {1.5, 1.4}, {1.5, 2.0}, {2.0, 0.3}, {2.0, kappa1(2.0, 2)}, {2.0, 0.7},
          {3.0, 0.045}, {3.0, 0.053}, {3.0, 0.07}};
}

// Oracle minimizer against the analytic global minimizer. Agreement here is
// evidence from a finite-dimensional heuristic, not a proof.
inline std::vector<CheckResult> oracle_checks(std::uint64_t seed, int grid_size = 800, const Tolerances& tol = {}) {
  std::vector<CheckResult> out;
  for (const auto& probe : oracle_probes()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "oracle_energy m=%g kappa=%.6g", probe.m, probe.kappa);
    const std::string name = buf;
    out.push_back(detail::guarded(name, [&]() -> CheckResult {
      const auto cls = classify(probe.m, 2, probe.kappa, tol);
      const double analytic = energy_of(*cls.witness).total;
      const auto res = minimize_energy(probe.m, 2, probe.kappa, grid_size, seed);
      const double rel = std::abs(res.energy - analytic) / std::abs(analytic);
      std::string detail = std::string(regime_name(cls.regime)) + " analytic " + format_double(analytic) + " oracle " +
                           format_double(res.energy);
      double margin = 5e-3 - rel;
      if (!res.converged) {
        margin = std::min(margin, -1.0);
        detail += " (iteration cap reached)";
      }
      if (auto* e = std::get_if<StrictSupportEquilibrium>(&*cls.witness)) {
        const double radius = support_radius(res.density);
        const double spacing = res.density.spacing(support_edge_index(res.density, radius));
        margin = std::min(margin, spacing - std::abs(radius - e->phi));
        detail += " support " + format_double(radius) + " vs phi " + format_double(e->phi);
      }
      return {name, margin >= 0.0, margin, detail};
    }));
  }
  return out;
}

} // namespace sphase::cli
