#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include <numbers>

#include "latticebands/errors.hpp"
#include "latticebands/greens.hpp"
#include "latticebands/selftest.hpp"

using namespace lb;
using gen::cplx;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("Green's function against the Fourier integral") {
  // G = 1/(2 pi^2 r^2) + k/(2 pi^2 r) int_0^inf sin(qr)/(q-k) dq, oscillatory quadrature
  struct Ref {
    double r;
    cplx k, g;
  };
  const Ref table[] = {
      {0.5, {1.3, 0.4}, {0.30547795728222094, 0.27109875381248671}},
      {1, {0.7, -0.3}, {0.063444474897854056, -0.07438919648992133}},
      {2.5, {2.2, 0.05}, {0.089985355713610618, -0.085228739440068466}},
      {1.7, {0.4, -1.1}, {-0.0040320275396206863, -0.010669699211979557}},
      {3, {1, 0.2}, {-0.028980930570344017, -0.0018337710463450978}},
  };
  for (auto& t : table) {
    INFO("r = " << t.r << " k = " << t.k);
    CHECK(std::abs(greens_function(t.r, t.k) - t.g) < 1e-12);
    CHECK(std::abs(greens_contour(t.r, t.k) - t.g) < 1e-12);
  }
}

TEST_CASE("contour form agrees with the closed form for Re k > 0") {
  for_all(60, 101, [](gen::Rng& rng) {
    const double r = gen::uniform(rng, 0.3, 6.0);
    cplx k = gen::complex_in(rng, 0.05, 3.0, -1.5, 1.5);
    if (std::abs(k.imag()) < 1e-3) k.imag(1e-3);
    CHECK(rel(greens_function(r, k), greens_contour(r, k)) < 1e-9);
  });
}

TEST_CASE("Helmholtz term follows the sign rule") {
  const double r = 1.3;
  const cplx up(0.8, 0.2), down(0.8, -0.2);
  CHECK(rel(greens_function(r, up) - greens_nonhelmholtz(r, up), up * std::exp(cplx(0, 1) * up * r) / (2 * pi * r)) <
        1e-14);
  CHECK(rel(greens_function(r, down) - greens_nonhelmholtz(r, down),
            down * std::exp(cplx(0, -1) * down * r) / (2 * pi * r)) < 1e-14);
  CHECK(greens_function(r, cplx(-0.8, 0.0)) == greens_nonhelmholtz(r, cplx(-0.8, 0.0)));
  CHECK(std::abs(greens_function(r, 0.0) - 1.0 / (2 * pi * pi * r * r)) < 1e-16);
}

TEST_CASE("non-Helmholtz part is even in k and continuous across the small-argument switch") {
  for_all(100, 102, [](gen::Rng& rng) {
    const double r = gen::uniform(rng, 0.2, 5.0);
    const cplx k = gen::complex_in(rng, -2.0, 2.0, 0.01, 2.0);
    CHECK(rel(greens_nonhelmholtz(r, k), greens_nonhelmholtz(r, -k)) < 1e-12);
  });
  for (double th : {0.3, 1.5, 2.8, -0.4, -2.9}) {
    const cplx z = std::polar(0.9e-3, th);
    CHECK(rel(e1_bracket(z), exp_integral_e1_scaled(z) - exp_integral_e1_scaled(-z)) < 1e-12);
  }
}

TEST_CASE("bad radius") {
  CHECK_THROWS_AS(greens_function(0.0, cplx(1, 1)), DomainError);
  CHECK_THROWS_AS(greens_function(-1.0, cplx(1, 1)), DomainError);
}
