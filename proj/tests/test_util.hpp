#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <doctest.h>

namespace gen {

using Rng = std::mt19937_64;
using cplx = std::complex<double>;

inline double uniform(Rng& r, double a, double b) { return std::uniform_real_distribution<double>(a, b)(r); }

inline cplx complex_in(Rng& r, double re0, double re1, double im0, double im1) {
  return {uniform(r, re0, re1), uniform(r, im0, im1)};
}

// Bloch vector in the first zone with |beta| >= min_norm
inline std::vector<double> bloch(Rng& r, int d, double min_norm = 0.0) {
  for (;;) {
    std::vector<double> b(d);
    double n2 = 0.0;
    for (auto& x : b) {
      x = uniform(r, -0.5, 0.5);
      n2 += x * x;
    }
    if (std::sqrt(n2) >= min_norm) return b;
  }
}

// distance from real alpha to every |beta + h|
inline double cone_distance(double alpha, const std::vector<double>& b) {
  double best = 1e300;
  const int d = static_cast<int>(b.size());
  const int m = 4;
  for (int i = -m; i <= m; ++i)
    for (int j = (d > 1 ? -m : 0); j <= (d > 1 ? m : 0); ++j)
      for (int k = (d > 2 ? -m : 0); k <= (d > 2 ? m : 0); ++k) {
        double q2 = (b[0] + i) * (b[0] + i);
        if (d > 1) q2 += (b[1] + j) * (b[1] + j);
        if (d > 2) q2 += (b[2] + k) * (b[2] + k);
        best = std::min(best, std::abs(std::sqrt(q2) - alpha));
      }
  return best;
}

}  // namespace gen

// runs body(rng) n times; the case index is attached to any failure
template <class Body>
void for_all(int n, std::uint64_t seed, Body body) {
  gen::Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    INFO("case " << i << " seed " << seed);
    body(rng);
  }
}

inline double rel(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) / (1.0 + std::abs(b)); }
