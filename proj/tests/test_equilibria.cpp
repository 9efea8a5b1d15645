#include <cmath>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "sphase/equilibria.hpp"

using namespace sphase;

namespace {

double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// closed form of F on S^2 for any m
double f_closed_form_d2(double phi, double m) {
  const double c = (m - 1.0) * (m - 1.0) / (m * (2.0 * m - 1.0)) * std::pow((m - 1.0) / m, m - 1.0) * std::pow(2.0 * pi, m - 1.0);
  return c * std::pow(1.0 - std::cos(phi), m) * (1.0 / (m - 1.0) + 1.0 + std::cos(phi));
}

void expect_invariants(const Equilibrium& eq, double tol = 1e-8) {
  const auto mm = mass_and_moment(eq);
  EXPECT_NEAR(mm.mass, 1.0, tol);
  EXPECT_NEAR(mm.moment, s_of(eq), tol);
}

} // namespace

TEST(H, ConstantForMEquals2) {
  for (double eta : {-1.0, -5.0, -100.0}) EXPECT_NEAR(H_fn(eta, 2.0, 2), 2.0 * pi / 3.0, 1e-12);
}

TEST(H, EndpointGivesKappa2) {
  EXPECT_NEAR(1.0 / H_fn(-1.0, 1.5, 2), 1.4658, 5e-5);
}

TEST(H, LimitGivesKappa1) {
  EXPECT_NEAR(H_fn(-1e6, 1.5, 2) * kappa1(1.5, 2), 1.0, 1e-4);
  for (double m : {1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 4.0})
    for (int d = 1; d <= 3; ++d) EXPECT_NEAR(H_fn(-1e6, m, d) * kappa1(m, d), 1.0, 1e-4) << m << " " << d;
}

TEST(H, RejectsEtaAboveMinusOne) {
  EXPECT_THROW(H_fn(-0.5, 1.5, 2), DomainError);
  EXPECT_THROW(H_fn(0.0, 3.0, 2), DomainError);
}

TEST(H, MonotoneByRegime) {
  for (double m : {1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 4.0})
    for (int d = 1; d <= 3; ++d) {
      std::vector<double> h;
      for (int i = 0; i < 50; ++i) h.push_back(H_fn(-std::pow(10.0, 4.0 * (49 - i) / 49.0), m, d));
      for (std::size_t i = 1; i < h.size(); ++i) {
        if (m < 2.0) EXPECT_LT(h[i], h[i - 1]) << m << " " << d << " " << i;
        else if (m > 2.0) EXPECT_GT(h[i], h[i - 1]) << m << " " << d << " " << i;
        else EXPECT_NEAR(h[i] / h[0], 1.0, 1e-9);
      }
    }
}

TEST(F, EqualsHAtPi) {
  for (double m : {1.2, 1.5, 1.8, 3.0}) EXPECT_NEAR(F_fn(pi, m, 2) / H_fn(-1.0, m, 2), 1.0, 1e-10);
}

TEST(F, VanishesAtZero) {
  for (double m : {1.1, 1.5, 1.9}) EXPECT_LT(F_fn(1e-3, m, 2), 1e-6);
}

TEST(F, ClosedFormOnTwoSphere) {
  for (double m : {1.5, 2.0, 3.0, 4.5})
    for (int i = 1; i <= 20; ++i) {
      const double phi = pi * i / 20.0;
      EXPECT_NEAR(F_fn(phi, m, 2) / f_closed_form_d2(phi, m), 1.0, 1e-8) << m << " " << phi;
    }
}

TEST(F, IncreasingBelowMEquals2) {
  for (double m : {1.2, 1.5, 1.8})
    for (int d = 1; d <= 3; ++d) {
      double prev = 0.0;
      for (int i = 1; i <= 50; ++i) {
        const double f = F_fn(pi * i / 50.0, m, d);
        EXPECT_GT(f, prev);
        prev = f;
      }
    }
}

TEST(F, UnimodalAboveMEquals2) {
  for (double m : {2.5, 3.0, 4.0}) {
    const double peak = bar_phi(m);
    for (int i = 1; i < 200; ++i) {
      const double phi = pi * i / 200.0;
      if (std::abs(phi - peak) < 1e-3 || phi + 1e-6 > pi) continue;
      const double slope = (F_fn(phi + 1e-6, m, 2) - F_fn(phi - 1e-6, m, 2)) / 2e-6;
      if (phi < peak) EXPECT_GT(slope, 0.0) << m << " " << phi;
      else EXPECT_LT(slope, 0.0) << m << " " << phi;
    }
  }
}

TEST(F, RejectsBadAngles) {
  EXPECT_THROW(F_fn(0.0, 1.5, 2), DomainError);
  EXPECT_THROW(F_fn(3.5, 1.5, 2), DomainError);
}

TEST(Kappa2, ClosedFormValues) {
  EXPECT_NEAR(kappa2_closed_form(2.0, 2), 3.0 / (2.0 * pi), 1e-14);
  EXPECT_NEAR(kappa2_closed_form(1.5, 2), 1.4658, 5e-5);
  EXPECT_NEAR(kappa2_closed_form(3.0, 2), 0.0534, 5e-5);
}

TEST(Kappa2, ClosedFormMatchesF) {
  for (double m : {1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 4.0})
    for (int d = 1; d <= 3; ++d) EXPECT_NEAR(kappa2_closed_form(m, d) * F_fn(pi, m, d), 1.0, 1e-8) << m << " " << d;
}

TEST(Kappa2, UnrepresentableIsAnAccuracyError) {
  EXPECT_THROW(kappa2_closed_form(400.0, 2), AccuracyError);
}

TEST(BarPhi, Values) {
  EXPECT_NEAR(bar_phi(3.0), pi - std::acos(7.0 / 8.0), 1e-15);
  EXPECT_NEAR(bar_phi(3.0), 2.6362, 5e-5);
  EXPECT_GT(bar_phi(2.001), 3.0);
  EXPECT_GT(bar_phi(1e6), 3.13);
  EXPECT_THROW(bar_phi(2.0), DomainError);
  EXPECT_THROW(bar_phi(1.5), DomainError);
}

TEST(BarPhi, IsTheMaximumOfF) {
  const double peak = bar_phi(3.0);
  const double top = F_fn(peak, 3.0, 2);
  for (int i = 1; i < 100; ++i) EXPECT_GE(top, F_fn(pi * i / 100.0, 3.0, 2));
  // sign change of the finite-difference slope across the peak
  EXPECT_GT(F_fn(peak - 1e-4, 3.0, 2), F_fn(peak - 2e-4, 3.0, 2));
  EXPECT_LT(F_fn(peak + 2e-4, 3.0, 2), F_fn(peak + 1e-4, 3.0, 2));
}

TEST(Kappa3, Values) {
  EXPECT_NEAR(kappa3(3.0, 2), 0.0518, 2e-4); // quoted value is truncated
  for (double m : {2.2, 2.5, 3.0, 4.0, 6.0}) {
    EXPECT_LT(kappa3(m, 2), kappa2_closed_form(m, 2));
    EXPECT_LT(kappa2_closed_form(m, 2), kappa1(m, 2));
  }
  EXPECT_THROW(kappa3(3.0, 3), RegimeError);
  EXPECT_THROW(kappa3(1.5, 2), DomainError);
}

TEST(CriticalOrdering, BelowAndAtMEquals2) {
  for (double m : {1.1, 1.5, 1.9})
    for (int d = 1; d <= 3; ++d) EXPECT_LT(kappa1(m, d), kappa2_closed_form(m, d));
  for (int d = 1; d <= 4; ++d) EXPECT_NEAR(kappa2_closed_form(2.0, d) / kappa1(2.0, d), 1.0, 1e-10);
}

TEST(SolveFullSupport, NearKappa1IsNearlyUniform) {
  // s grows like sqrt(kappa/kappa1 - 1); reference from an independent scipy solve
  const double k1 = kappa1(1.5, 2);
  const auto e = solve_full_support(ModelParams(1.5, 2, k1 * (1.0 + 1e-6)));
  EXPECT_NEAR(e.s, 1.6329903039716588e-3, 1e-9);
  EXPECT_NEAR(e.lambda / lambda_uniform(1.5, 2), 1.0, 1e-3);
  expect_invariants(e);
  const auto closer = solve_full_support(ModelParams(1.5, 2, k1 * (1.0 + 1e-8)));
  EXPECT_NEAR(e.s / closer.s, 10.0, 1e-3);
  EXPECT_LE(solve_full_support(ModelParams(1.5, 2, k1 * (1.0 + 1e-7))).s, 1e-3);
}

TEST(SolveFullSupport, AtKappa2TouchesTheBoundary) {
  const double k = kappa2_closed_form(1.5, 2);
  const auto e = solve_full_support(ModelParams(1.5, 2, k));
  EXPECT_EQ(e.eta, -1.0);
  EXPECT_NEAR(e.lambda, k * e.s, 1e-14);
  expect_invariants(e);
}

TEST(SolveFullSupport, AboveMEquals2) {
  const double k = 0.5 * (kappa2_closed_form(3.0, 2) + kappa1(3.0, 2));
  const auto e = solve_full_support(ModelParams(3.0, 2, k));
  EXPECT_LT(e.eta, -1.0);
  EXPECT_LE(std::abs(H_fn(e.eta, 3.0, 2) * k - 1.0), 1e-10);
  // independent bisection on eta
  const double eta = -1.0 / bisect([&](double t) { return H_fn(-1.0 / t, 3.0, 2) * k - 1.0; }, 1e-8, 1.0);
  EXPECT_NEAR(e.eta / eta, 1.0, 1e-7);
  expect_invariants(e);
}

TEST(SolveFullSupport, Invariants) {
  for (double k : {1.28, 1.35, 1.42, 1.46}) {
    const auto e = solve_full_support(ModelParams(1.5, 2, k));
    EXPECT_LE(e.eta, -1.0);
    EXPECT_NEAR(e.lambda, -k * e.s * e.eta, 1e-14);
    EXPECT_GE(e.lambda, k * e.s * (1.0 - 1e-14));
    EXPECT_LE(std::abs(H_fn(e.eta, 1.5, 2) * k - 1.0), 1e-10);
    expect_invariants(e);
  }
}

TEST(SolveFullSupport, Errors) {
  EXPECT_THROW(solve_full_support(ModelParams(2.0, 2, 0.6)), RegimeError);
  EXPECT_THROW(solve_full_support(ModelParams(1.5, 2, 1.0)), NoSolutionError);
  EXPECT_THROW(solve_full_support(ModelParams(1.5, 2, 2.0)), NoSolutionError);
  EXPECT_THROW(solve_full_support(ModelParams(3.0, 2, 0.05)), NoSolutionError);
  EXPECT_THROW(solve_full_support(ModelParams(3.0, 2, 0.06)), NoSolutionError);
}

TEST(SolveStrictSupport, SingleBranchBelowMEquals2) {
  const double k2 = kappa2_closed_form(1.5, 2);
  double prev_phi = pi;
  for (double factor : {1.5, 3.0, 6.0, 12.0}) {
    const auto v = solve_strict_support(ModelParams(1.5, 2, factor * k2));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_GT(v[0].phi, 0.0);
    EXPECT_LT(v[0].phi, prev_phi);
    prev_phi = v[0].phi;
    EXPECT_LE(std::abs(F_fn(v[0].phi, 1.5, 2) * factor * k2 - 1.0), 1e-10);
    EXPECT_NEAR(v[0].lambda, -factor * k2 * v[0].s * std::cos(v[0].phi), 1e-14);
    EXPECT_GT(v[0].lambda, -factor * k2 * v[0].s);
    EXPECT_LT(v[0].lambda, factor * k2 * v[0].s);
    expect_invariants(v[0]);
  }
}

TEST(SolveStrictSupport, RootsCoincideAtKappa3) {
  const auto v = solve_strict_support(ModelParams(3.0, 2, kappa3(3.0, 2)));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v[0].phi, bar_phi(3.0), 1e-5);
  EXPECT_NEAR(v[1].phi, bar_phi(3.0), 1e-5);
}

TEST(SolveStrictSupport, TwoRootsBetweenKappa3AndKappa2) {
  const double k = 0.5 * (kappa3(3.0, 2) + kappa2_closed_form(3.0, 2));
  const auto v = solve_strict_support(ModelParams(3.0, 2, k));
  ASSERT_EQ(v.size(), 2u);
  const double peak = bar_phi(3.0);
  EXPECT_LT(v[0].phi, peak);
  EXPECT_GT(v[1].phi, peak);
  auto g = [&](double phi) { return f_closed_form_d2(phi, 3.0) * k - 1.0; };
  EXPECT_NEAR(v[0].phi, bisect(g, 1e-6, peak), 1e-8);
  EXPECT_NEAR(v[1].phi, bisect(g, peak, pi), 1e-8);
  for (const auto& e : v) {
    EXPECT_LE(std::abs(F_fn(e.phi, 3.0, 2) * k - 1.0), 1e-10);
    expect_invariants(e);
  }
}

TEST(SolveStrictSupport, OneRootAboveKappa2) {
  for (double k : {0.055, 0.07, 0.5}) {
    const auto v = solve_strict_support(ModelParams(3.0, 2, k));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_LT(v[0].phi, bar_phi(3.0));
    expect_invariants(v[0]);
  }
}

TEST(SolveStrictSupport, Errors) {
  EXPECT_THROW(solve_strict_support(ModelParams(3.0, 2, 0.05)), NoSolutionError);
  EXPECT_THROW(solve_strict_support(ModelParams(1.5, 2, 1.4)), NoSolutionError);
  EXPECT_THROW(solve_strict_support(ModelParams(3.0, 3, 0.05)), RegimeError);
  EXPECT_THROW(solve_strict_support(ModelParams(2.0, 2, 0.4)), NoSolutionError);
}

TEST(SolveM2, FamilyAtKappa1) {
  const auto sol = solve_m2(2, 3.0 / (2.0 * pi));
  ASSERT_TRUE(std::holds_alternative<M2Family>(sol));
  const auto& f = std::get<M2Family>(sol);
  EXPECT_NEAR(f.lambda, 2.0 / (4.0 * pi), 1e-15);
  EXPECT_NEAR(f.s_max(), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(f.with_s(0.5), DomainError);
}

TEST(SolveM2, JustAboveKappa1ApproachesTheEdgeOfTheFamily) {
  const double k1 = kappa1(2.0, 2);
  const auto sol = solve_m2(2, k1 * 1.0001);
  ASSERT_TRUE(std::holds_alternative<StrictSupportEquilibrium>(sol));
  const auto& e = std::get<StrictSupportEquilibrium>(sol);
  EXPECT_GT(e.phi, 2.9);
  EXPECT_NEAR(e.s, 1.0 / 3.0, 1e-2);
  const Equilibrium edge = make_m2_family(2, 1.0 / 3.0);
  for (double t : {0.0, 1.0, 2.0, 2.8}) EXPECT_NEAR(density_eval(e, t), density_eval(edge, t), 2e-3);
  EXPECT_GT(std::abs(density_eval(e, 0.0) - uniform_density(2)), 0.05);
}

TEST(SolveM2, TwiceKappa1) {
  const double k = 2.0 * kappa1(2.0, 2);
  const auto e = std::get<StrictSupportEquilibrium>(solve_m2(2, k));
  // (w_2 / 2) int_0^phi sin^3 = 1/k with int_0^phi sin^3 = 2/3 - cos + cos^3/3
  auto g = [&](double phi) {
    const double c = std::cos(phi);
    return 0.5 * pi * (2.0 / 3.0 - c + c * c * c / 3.0) - 1.0 / k;
  };
  EXPECT_NEAR(e.phi, bisect(g, 1e-6, pi), 1e-9);
  expect_invariants(e);
}

TEST(SolveM2, BelowKappa1AndErrors) {
  EXPECT_TRUE(std::holds_alternative<UniformState>(solve_m2(2, 0.3)));
  EXPECT_THROW(solve_m2(2, 0.0), DomainError);
  EXPECT_THROW(solve_m2(2, -1.0), DomainError);
}

TEST(Density, Values) {
  const Equilibrium u = UniformState{ModelParams(1.5, 2, 1.0)};
  EXPECT_NEAR(density_eval(u, 0.7), 1.0 / (4.0 * pi), 1e-16);
  const Equilibrium f0 = make_m2_family(2, 0.0);
  for (double t : {0.0, 1.0, pi}) EXPECT_NEAR(density_eval(f0, t), 1.0 / (4.0 * pi), 1e-16);
  const auto e = solve_strict_support(ModelParams(1.5, 2, 2.0)).front();
  EXPECT_EQ(density_eval(e, e.phi), 0.0);
  EXPECT_LT(density_eval(e, e.phi - 1e-6), 1e-9);
  EXPECT_EQ(density_eval(e, pi), 0.0);
  EXPECT_THROW(density_eval(e, -0.1), DomainError);
  EXPECT_THROW(density_eval(e, 3.2), DomainError);
}

TEST(MassAndMoment, Examples) {
  const auto u = mass_and_moment(UniformState{ModelParams(1.5, 2, 1.0)});
  EXPECT_EQ(u.mass, 1.0);
  EXPECT_EQ(u.moment, 0.0);
  const auto f = mass_and_moment(make_m2_family(2, 1.0 / 3.0));
  EXPECT_NEAR(f.mass, 1.0, 1e-13);
  EXPECT_NEAR(f.moment, 1.0 / 3.0, 1e-13);
  const auto e = solve_strict_support(ModelParams(1.5, 2, 2.0)).front();
  expect_invariants(e);
}

TEST(MassAndMoment, AcrossRegimesAndDimensions) {
  for (int d = 1; d <= 3; ++d) {
    const double k1 = kappa1(1.5, d), k2 = kappa2_closed_form(1.5, d);
    expect_invariants(solve_full_support(ModelParams(1.5, d, 0.5 * (k1 + k2))));
    expect_invariants(solve_strict_support(ModelParams(1.5, d, 2.0 * k2)).front());
    expect_invariants(std::get<StrictSupportEquilibrium>(solve_m2(d, 1.5 * kappa1(2.0, d))));
    for (double s : {0.0, 0.5 / (d + 1), 1.0 / (d + 1)}) expect_invariants(make_m2_family(d, s));
  }
}

TEST(NonuniformEquilibria, Counts) {
  EXPECT_EQ(nonuniform_equilibria(ModelParams(1.5, 2, 1.0)).size(), 0u);
  EXPECT_EQ(nonuniform_equilibria(ModelParams(1.5, 2, 1.4)).size(), 1u);
  EXPECT_EQ(nonuniform_equilibria(ModelParams(3.0, 2, 0.045)).size(), 0u);
  EXPECT_EQ(nonuniform_equilibria(ModelParams(3.0, 2, 0.0525)).size(), 2u);
  // kappa2 < 0.055 < kappa1: the wide full-support profile and the narrow cap
  EXPECT_EQ(nonuniform_equilibria(ModelParams(3.0, 2, 0.055)).size(), 2u);
  EXPECT_EQ(nonuniform_equilibria(ModelParams(2.0, 2, kappa1(2.0, 2))).size(), 1u);
}
