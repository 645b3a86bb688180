#pragma once

#include <string>
#include <vector>

#include "latticebands/specfun.hpp"

namespace lb {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // worst measured deviation
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

struct SelftestOptions {
  bool quick = false;
  // added to one eta evaluation to check that the harness notices
  double inject_eta_error = 0.0;
  unsigned long seed = 20240611;
};

std::vector<SuiteResult> run_selftest(const SelftestOptions& opt = {});

// G(r; k) from the Fourier integral with the contour turned onto the
// imaginary axis; valid for Re k > 0, Im k != 0
cplx greens_contour(double r, cplx k);

// slope of log|alpha_full - alpha_pole| against log kappa at one d = 1 momentum
double pole_order_exponent(double beta, double alpha0, const std::vector<double>& kappas);

}  // namespace lb
