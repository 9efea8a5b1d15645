// Prints the critical values for one exponent and the global minimizer on a kappa grid.
#include <cstdio>
#include <cstdlib>

#include "sphase/sphase.hpp"

int main(int argc, char** argv) {
  const double m = argc > 1 ? std::atof(argv[1]) : 3.0;
  const int d = 2;
  try {
    const auto cv = sphase::critical_values(m, d);
    std::printf("m = %g, d = %d\nkappa1 = %.10f\nkappa2 = %.10f\n", m, d, cv.kappa1, cv.kappa2);
    if (cv.kappa3) std::printf("kappa3 = %.10f\nkappa_c = %.10f\n", *cv.kappa3, *cv.kappa_c);

    const double lo = 0.8 * (cv.kappa3 ? *cv.kappa3 : cv.kappa1);
    const double hi = 1.5 * std::max(cv.kappa1, cv.kappa2);
    std::printf("\n%12s  %-17s %12s %12s\n", "kappa", "regime", "s", "gap");
    for (int i = 0; i <= 20; ++i) {
      const double kappa = lo + (hi - lo) * i / 20.0;
      const auto c = sphase::classify(m, d, kappa);
      std::printf("%12.6f  %-17s %12.6f %12.3e\n", kappa, sphase::regime_name(c.regime), sphase::s_of(*c.witness), c.gap);
    }
  } catch (const sphase::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  }
}
