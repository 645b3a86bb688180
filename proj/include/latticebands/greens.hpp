#pragma once

#include "latticebands/specfun.hpp"

namespace lb {

// Green's function of sqrt(-Laplacian) - k in three dimensions.
// Helmholtz part: +ikr for Im k > 0 or real k > 0, -ikr for Im k < 0,
// absent for real k < 0.
cplx greens_function(double r, cplx k);

// the part without the Helmholtz term; even in k
cplx greens_nonhelmholtz(double r, cplx k);

// e^{z}E1(z) - e^{-z}E1(-z)
cplx e1_bracket(cplx z);

}  // namespace lb
