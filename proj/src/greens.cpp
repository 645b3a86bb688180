#include "latticebands/greens.hpp"

#include <cmath>
#include <numbers>

#include "latticebands/errors.hpp"

namespace lb {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double euler_gamma = 0.57721566490153286061;
}  // namespace

cplx e1_bracket(cplx z) {
  if (std::abs(z) >= 1e-3) return exp_integral_e1_scaled(z) - exp_integral_e1_scaled(-z);
  if (z == 0.0) throw DomainError("E1 bracket at z = 0");
  if (z.imag() == 0.0) throw DomainError("E1 bracket: argument on the branch cut");
  // E1(z) = -gamma - ln z + Ein(z); the logs combine to ln(-z) - ln z = -+ i pi
  const cplx ez = std::exp(z), emz = std::exp(-z);
  cplx ein_p = 0.0, ein_m = 0.0, term = 1.0;
  for (int k = 1; k < 12; ++k) {
    term *= -z / static_cast<double>(k);
    ein_p -= term / static_cast<double>(k);
    ein_m -= (k % 2 == 0 ? term : -term) / static_cast<double>(k);
  }
  const cplx logdiff(0.0, z.imag() > 0.0 ? -pi : pi);
  const cplx lz = std::log(z);
  return -(ez - emz) * (euler_gamma + lz) + emz * logdiff + ez * ein_p - emz * ein_m;
}

cplx greens_nonhelmholtz(double r, cplx k) {
  if (!(r > 0.0)) throw DomainError("greens: r must be positive");
  const double s = 1.0 / (2.0 * pi * pi * r * r);
  if (k == 0.0) return s;
  const cplx z(-k.imag() * r, k.real() * r);
  return s - cplx(0.0, 1.0) * k / (4.0 * pi * pi * r) * e1_bracket(z);
}

cplx greens_function(double r, cplx k) {
  cplx g = greens_nonhelmholtz(r, k);
  const cplx ikr = cplx(0.0, 1.0) * k * r;
  if (k.imag() > 0.0 || (k.imag() == 0.0 && k.real() > 0.0))
    g += k * std::exp(ikr) / (2.0 * pi * r);
  else if (k.imag() < 0.0)
    g += k * std::exp(-ikr) / (2.0 * pi * r);
  return g;
}

}  // namespace lb
