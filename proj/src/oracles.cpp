#include <cmath>
#include <numbers>
#include <vector>

#include "latticebands/errors.hpp"
#include "latticebands/greens.hpp"
#include "latticebands/latticesum.hpp"

namespace lb {

namespace {

constexpr double pi = std::numbers::pi;

// radial weights chi(r) G(r) for r^2 = 0 .. R^2
std::vector<cplx> window_weights(cplx k, int radius) {
  const double w = radius / 13.0, r0 = 6.5 * w;
  const long m2 = static_cast<long>(radius) * radius;
  std::vector<cplx> wt(m2 + 1, 0.0);
  for (long m = 1; m <= m2; ++m) {
    const double r = std::sqrt(static_cast<double>(m));
    wt[m] = 0.5 * std::erfc((r - r0) / w) * greens_function(r, k);
  }
  return wt;
}

// c[n] = 1 for n = 0, 2cos(2 pi b n) otherwise; folds +-n together
std::vector<double> fold_phases(double b, int radius) {
  std::vector<double> c(radius + 1);
  c[0] = 1.0;
  for (int n = 1; n <= radius; ++n) c[n] = 2.0 * std::cos(2.0 * pi * b * n);
  return c;
}

cplx windowed_sum(int d, cplx alpha, const Bloch& beta, int radius, bool parallel) {
  const cplx k = 2.0 * pi * alpha;
  const std::vector<cplx> wt = window_weights(k, radius);
  const long r2max = static_cast<long>(radius) * radius;
  const auto c1 = fold_phases(beta[0], radius);
  if (d == 1) {
    cplx s = 0.0;
    for (int n = 1; n <= radius; ++n) s += wt[static_cast<long>(n) * n] * c1[n];
    return s;
  }
  const auto c2 = fold_phases(beta[1], radius);
  const auto c3 = d == 3 ? fold_phases(beta[2], radius) : std::vector<double>{1.0};
  const int n3max = d == 3 ? radius : 0;
  double sre = 0.0, sim = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(+ : sre, sim) if (parallel)
  for (int i = 0; i <= radius; ++i) {
    const long i2 = static_cast<long>(i) * i;
    double pre = 0.0, pim = 0.0;
    for (int j = 0; j <= radius; ++j) {
      const long ij2 = i2 + static_cast<long>(j) * j;
      if (ij2 > r2max) break;
      double qre = 0.0, qim = 0.0;
      for (int l = 0; l <= n3max; ++l) {
        const long m = ij2 + static_cast<long>(l) * l;
        if (m > r2max) break;
        if (m == 0) continue;
        qre += wt[m].real() * c3[l];
        qim += wt[m].imag() * c3[l];
      }
      pre += qre * c2[j];
      pim += qim * c2[j];
    }
    sre += pre * c1[i];
    sim += pim * c1[i];
  }
  return {sre, sim};
}

OracleResult direct_sum(int d, cplx alpha, const Bloch& beta_in, int radius, bool parallel) {
  if (d < 1 || d > 3 || static_cast<int>(beta_in.size()) != d) throw DomainError("oracle: bad dimension");
  if (!(alpha.imag() > 0.0)) throw DomainError("direct-sum oracle requires Im(alpha) > 0");
  if (radius < 5.0 / (2.0 * pi * alpha.imag())) throw DomainError("direct-sum oracle: radius below 5/(2 pi Im alpha)");
  const Bloch beta = reduce_to_fbz(beta_in);
  const cplx full = windowed_sum(d, alpha, beta, radius, parallel);
  const cplx half = windowed_sum(d, alpha, beta, radius / 2, parallel);
  // Helmholtz tail beyond the window centre
  const double r0 = 6.5 * radius / 13.0;
  const double tail = std::abs(alpha) * std::pow(r0, d - 1) * std::exp(-2.0 * pi * alpha.imag() * r0) /
                      alpha.imag() * 4.0;
  return {full, std::abs(full - half) + tail + 1e-15 * std::abs(full)};
}

}  // namespace

OracleResult direct_sum_oracle(int d, cplx alpha, const Bloch& beta, int radius) {
  return direct_sum(d, alpha, beta, radius, true);
}

OracleResult direct_sum_oracle_serial(int d, cplx alpha, const Bloch& beta, int radius) {
  return direct_sum(d, alpha, beta, radius, false);
}

int oracle_radius(int d, cplx alpha, const Bloch& beta, double tol) {
  (void)d;
  const Bloch b = reduce_to_fbz(beta);
  double xi2 = 0.0;
  for (double x : b) xi2 += x * x;
  const double xi = std::sqrt(xi2);
  if (xi == 0.0) throw DomainError("oracle_radius: beta on the reciprocal lattice");
  const double lt = std::log(1.0 / tol);
  const double w = std::sqrt(lt) / (pi * xi);
  const double r_window = 13.0 * w;
  const double r_helm = 2.0 * lt / (2.0 * pi * alpha.imag());
  const double r_pre = 5.0 / (2.0 * pi * alpha.imag());
  return static_cast<int>(std::ceil(std::max({r_window, r_helm, r_pre, 26.0})));
}

// ---------------------------------------------------------------- A(x)

double a_series_oracle(double x, long terms) {
  if (!(x > -1.0)) throw DomainError("A(x) series needs x > -1");
  long double s = 0.0L, comp = 0.0L;
  for (long n = terms; n >= 1; --n) {
    const long double m = 2.0L * n + x;
    const long double t = (m + 1) * std::log1p(1.0L / m) + (m - 1) * std::log1p(1.0L / (m - 1)) - 2.0L;
    // Kahan
    const long double y = t - comp;
    const long double u = s + y;
    comp = (u - s) - y;
    s = u;
  }
  return static_cast<double>(0.5L * s);
}

double a_series_accelerated(double x, long terms) {
  // tail ~ c1/N + c2/N^2
  const double s1 = a_series_oracle(x, terms);
  const double s2 = a_series_oracle(x, terms / 2);
  const double s4 = a_series_oracle(x, terms / 4);
  const double r1 = 2.0 * s1 - s2;
  const double r2 = 2.0 * s2 - s4;
  return (4.0 * r1 - r2) / 3.0;
}

double a_closed_form(double x) {
  return 0.5 * (x + (x + 1.0) * std::log(2.0 / (x + 1.0)) + 2.0 * std::lgamma(1.0 + 0.5 * x) + 1.0 -
                std::log(2.0 * pi));
}

}  // namespace lb
