#include "latticebands/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "latticebands/errors.hpp"

namespace lb {

namespace {

constexpr double pi = std::numbers::pi;
constexpr long double euler_gamma_l = 0.577215664901532860606512090082402431L;

using cplxl = std::complex<long double>;

bool on_cut(cplx z) { return z.imag() == 0.0 && z.real() <= 0.0; }

}  // namespace

// ---------------------------------------------------------------- E1

cplx detail::e1_series(cplx z) {
  if (z == 0.0) throw DomainError("E1: z = 0");
  const cplxl zl(z.real(), z.imag());
  cplxl sum = 0;
  if (z.real() > 0.0) {
    // E1 = -gamma - ln z + e^{-z} sum H_k z^k / k!
    cplxl term = 1;
    long double h = 0;
    for (int k = 1; k < 400; ++k) {
      term *= zl / static_cast<long double>(k);
      h += 1.0L / k;
      cplxl t = term * h;
      sum += t;
      if (std::abs(t) < 1e-21L * std::abs(sum)) break;
    }
    sum *= std::exp(-zl);
    cplxl r = -euler_gamma_l - std::log(zl) + sum;
    return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
  }
  // E1 = -gamma - ln z - sum (-z)^k / (k k!)
  cplxl term = 1;
  const int kmax = 200 + static_cast<int>(4.0 * std::abs(z));
  for (int k = 1; k < kmax; ++k) {
    term *= -zl / static_cast<long double>(k);
    cplxl t = term / static_cast<long double>(k);
    sum += t;
    if (std::abs(t) < 1e-21L * std::abs(sum) && k > std::abs(z)) break;
  }
  cplxl r = -euler_gamma_l - std::log(zl) - sum;
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

cplx detail::e1_cf_scaled(cplx z, int max_iter) {
  // 1/(z+1- 1/(z+3- 4/(z+5- ...))), modified Lentz
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  cplx f = z + 1.0;
  if (f == 0.0) f = tiny;
  cplx c = f, d = 0.0;
  for (int n = 1; n <= max_iter; ++n) {
    const double a = -static_cast<double>(n) * n;
    const cplx b = z + (2.0 * n + 1.0);
    d = b + a * d;
    if (d == 0.0) d = tiny;
    c = b + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const cplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < eps) return 1.0 / f;
  }
  throw ConvergenceError("E1 continued fraction did not converge");
}

namespace {

// e^z E1(z) ~ sum (-1)^k k! / z^{k+1}, truncated at the smallest term
cplx e1_asymptotic_scaled(cplx z) {
  cplx term = 1.0 / z, sum = term;
  double last = std::abs(term);
  for (int k = 1; k < 200; ++k) {
    const cplx next = term * (-static_cast<double>(k)) / z;
    const double a = std::abs(next);
    if (a > last) break;
    sum += next;
    term = next;
    last = a;
    if (a < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

cplx e1_any(cplx z, bool scaled) {
  if (z == 0.0) throw DomainError("E1: z = 0");
  if (std::abs(z) > 50.0) {
    cplx s = e1_asymptotic_scaled(z);
    if (z.imag() == 0.0 && z.real() < 0.0)
      s += std::exp(z) * cplx(0.0, std::signbit(z.imag()) ? pi : -pi);
    if (scaled) return s;
    if (-z.real() > 709.0) throw OverflowError("E1: result overflows");
    return std::exp(-z) * s;
  }
  if (std::abs(z) > 4.0) {
    try {
      cplx s = detail::e1_cf_scaled(z);
      if (scaled) return s;
      if (-z.real() > 709.0) throw OverflowError("E1: result overflows");
      return std::exp(-z) * s;
    } catch (const ConvergenceError&) {
      // only reached close to the negative real axis, where the series has
      // no significant cancellation
    }
  }
  if (scaled && std::abs(z.real()) > 700.0) throw OverflowError("E1: scaling overflows");
  cplx e = detail::e1_series(z);
  if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
    throw OverflowError("E1: result overflows");
  return scaled ? std::exp(z) * e : e;
}

}  // namespace

cplx detail::e1_signed(cplx z) { return e1_any(z, false); }

cplx exp_integral_e1(cplx z) {
  if (on_cut(z)) throw DomainError("E1: argument on the branch cut");
  return e1_any(z, false);
}

cplx exp_integral_e1_scaled(cplx z) {
  if (on_cut(z)) throw DomainError("E1: argument on the branch cut");
  return e1_any(z, true);
}

// ---------------------------------------------------------------- erfc

// Poppe & Wijers, first quadrant
static cplx w_first_quadrant(double xabs, double yabs) {
  constexpr double factor = 1.12837916709551257388;
  const double x = xabs / 6.3, y = yabs / 4.4;
  double qrho = x * x + y * y;
  double u, v;
  if (qrho < 0.085264) {
    qrho = (1.0 - 0.85 * y) * std::sqrt(qrho);
    const int n = static_cast<int>(std::lround(6.0 + 72.0 * qrho));
    int j = 2 * n + 1;
    double xsum = 1.0 / j, ysum = 0.0;
    const double xquad = (xabs - yabs) * (xabs + yabs);
    const double yquad = 2.0 * xabs * yabs;
    for (int i = n; i >= 1; --i) {
      j -= 2;
      const double xaux = (xsum * xquad - ysum * yquad) / i;
      ysum = (xsum * yquad + ysum * xquad) / i;
      xsum = xaux + 1.0 / j;
    }
    const double u1 = -factor * (xsum * yabs + ysum * xabs) + 1.0;
    const double v1 = factor * (xsum * xabs - ysum * yabs);
    const double daux = std::exp(-xquad);
    const double u2 = daux * std::cos(yquad);
    const double v2 = -daux * std::sin(yquad);
    u = u1 * u2 - v1 * v2;
    v = u1 * v2 + v1 * u2;
  } else {
    double h, h2 = 0.0, qlambda = 0.0;
    int kapn, nu;
    if (qrho > 1.0) {
      h = 0.0;
      kapn = 0;
      qrho = std::sqrt(qrho);
      nu = static_cast<int>(3.0 + 1442.0 / (26.0 * qrho + 77.0));
    } else {
      qrho = (1.0 - y) * std::sqrt(1.0 - qrho);
      h = 1.88 * qrho;
      h2 = 2.0 * h;
      kapn = static_cast<int>(std::lround(7.0 + 34.0 * qrho));
      nu = static_cast<int>(std::lround(16.0 + 26.0 * qrho));
    }
    if (h > 0.0) qlambda = std::pow(h2, kapn);
    double rx = 0, ry = 0, sx = 0, sy = 0;
    for (int n = nu; n >= 0; --n) {
      const double np1 = n + 1;
      double tx = yabs + h + np1 * rx;
      double ty = xabs - np1 * ry;
      const double c = 0.5 / (tx * tx + ty * ty);
      rx = c * tx;
      ry = c * ty;
      if (h > 0.0 && n <= kapn) {
        tx = qlambda + sx;
        sx = rx * tx - ry * sy;
        sy = ry * tx + rx * sy;
        qlambda /= h2;
      }
    }
    if (h == 0.0) {
      u = factor * rx;
      v = factor * ry;
    } else {
      u = factor * sx;
      v = factor * sy;
    }
    if (yabs == 0.0) u = std::exp(-xabs * xabs);
  }
  return {u, v};
}

cplx faddeeva_w(cplx z) {
  const double x = z.real(), y = z.imag();
  if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("w: non-finite argument");
  if (y >= 0.0) {
    cplx w = w_first_quadrant(std::abs(x), y);
    return x < 0.0 ? std::conj(w) : w;
  }
  // w(z) = 2 e^{-z^2} - w(-z)
  cplx wm = w_first_quadrant(std::abs(x), -y);
  if (-x < 0.0) wm = std::conj(wm);
  const cplx mz2 = -z * z;
  if (mz2.real() > 709.0) throw OverflowError("w: e^{-z^2} overflows");
  return 2.0 * std::exp(mz2) - wm;
}

cplx erfcx_complex(cplx z) {
  if (z.real() >= 0.0) return faddeeva_w(cplx(-z.imag(), z.real()));
  const cplx z2 = z * z;
  if (z2.real() > 709.0) throw OverflowError("erfcx: e^{z^2} overflows");
  return 2.0 * std::exp(z2) - faddeeva_w(cplx(z.imag(), -z.real()));
}

cplx erfc_complex(cplx z) {
  if (z.real() < 0.0) return 2.0 - erfc_complex(-z);
  const cplx x = faddeeva_w(cplx(-z.imag(), z.real()));
  const cplx mz2 = -z * z;
  if (x == 0.0) return 0.0;
  if (mz2.real() + std::log(std::abs(x)) > 709.0) throw OverflowError("erfc: result overflows");
  if (mz2.real() < -745.0 - 50.0) return 0.0;
  return std::exp(mz2) * x;
}

cplx detail::scaled_erfcx(cplx z, cplx a) {
  if (z.real() >= 0.0) return std::exp(-a) * erfcx_complex(z);
  return 2.0 * std::exp(z * z - a) - std::exp(-a) * erfcx_complex(-z);
}

cplx detail::one_minus_sqrtpi_x_erfcx(cplx x) {
  const double ax = std::abs(x);
  if (x.real() > 0.0 && ax > 4.0) {
    // sqrt(pi) x erfcx(x) = x / (x + K),  K = (1/2)/(x + 1/(x + (3/2)/(x + ...)))
    // so the difference is K / (x + K)
    constexpr double tiny = 1e-300;
    cplx f = x, c = x, d = 0.0;
    for (int n = 2; n < 2000; ++n) {
      const double a = 0.5 * n;
      d = x + a * d;
      if (d == 0.0) d = tiny;
      c = x + a / c;
      if (c == 0.0) c = tiny;
      d = 1.0 / d;
      const cplx delta = c * d;
      f *= delta;
      if (std::abs(delta - 1.0) < 1e-16) {
        const cplx k = 0.5 / f;
        return k / (x + k);
      }
    }
  }
  return 1.0 - std::sqrt(pi) * x * erfcx_complex(x);
}

// ---------------------------------------------------------------- theta3

double detail::theta3_direct(double z, double q) {
  if (q == 0.0) return 1.0;
  double s = 0.0;
  for (int n = 1;; ++n) {
    const double t = std::pow(q, static_cast<double>(n) * n);
    if (t < 1e-17) break;
    s += t * std::cos(2.0 * n * z);
  }
  return 1.0 + 2.0 * s;
}

namespace {

// (sqrt(pi)/u) sum_m exp(-(z - pi m)^2 / u^2)
double theta3_poisson(double z, double u) {
  double zr = std::remainder(z, pi);
  const double u2 = u * u;
  double s = 0.0;
  for (int m = 0;; ++m) {
    const double a = zr - pi * m, b = zr + pi * m;
    const double ta = std::exp(-a * a / u2);
    const double tb = m == 0 ? 0.0 : std::exp(-b * b / u2);
    s += ta + tb;
    if (m > 0 && (ta + tb <= 1e-18 * s || pi * m - std::abs(zr) > 40.0 * u)) break;
  }
  return std::sqrt(pi) / u * s;
}

}  // namespace

double detail::theta3_modular(double z, double q) {
  if (!(q > 0.0) || q >= 1.0) throw DomainError("theta3: modular form needs 0 < q < 1");
  return theta3_poisson(z, std::sqrt(-std::log(q)));
}

double theta3(double z, double q) {
  if (!(q >= 0.0) || q >= 1.0) throw DomainError("theta3: q outside [0, 1)");
  if (q > 0.5) return detail::theta3_modular(z, q);
  return detail::theta3_direct(z, q);
}

double detail::theta3m1_lognome(double z, double u) {
  if (u * u < 0.1053605156578263) return theta3_poisson(z, u) - 1.0;
  // 2 sum q^{n^2} cos(2nz), q = e^{-u^2}
  const double u2 = u * u;
  double s = 0.0;
  for (int n = 1;; ++n) {
    const double e = u2 * n * n;
    if (e > 39.2) break;
    s += std::exp(-e) * std::cos(2.0 * n * z);
  }
  return 2.0 * s;
}

// ---------------------------------------------------------------- log Gamma

namespace {

// zeta(k) - 1 for k = 2..40
const std::array<double, 41>& zeta_minus_one() {
  static const std::array<double, 41> table = [] {
    std::array<double, 41> t{};
    for (int k = 2; k <= 40; ++k) {
      const int N = 40;
      long double s = 0;
      for (int n = 2; n < N; ++n) s += std::pow(static_cast<long double>(n), -k);
      const long double Nl = N;
      // Euler-Maclaurin tail from N
      long double tail = std::pow(Nl, 1 - k) / (k - 1) + 0.5L * std::pow(Nl, -k) +
                         k * std::pow(Nl, -k - 1) / 12.0L -
                         static_cast<long double>(k) * (k + 1) * (k + 2) * std::pow(Nl, -k - 3) / 720.0L +
                         static_cast<long double>(k) * (k + 1) * (k + 2) * (k + 3) * (k + 4) *
                             std::pow(Nl, -k - 5) / 30240.0L -
                         static_cast<long double>(k) * (k + 1) * (k + 2) * (k + 3) * (k + 4) * (k + 5) *
                             (k + 6) * std::pow(Nl, -k - 7) / 1209600.0L;
      t[k] = static_cast<double>(s + tail);
    }
    return t;
  }();
  return table;
}

// ln Gamma(1 + e) for |e| <= 0.25
cplx lgamma1p_small(cplx e) {
  const auto& zm1 = zeta_minus_one();
  // ln Gamma(1+e) = -ln(1+e) + e(1-gamma) + sum_{k>=2} (-1)^k (zeta(k)-1) e^k / k
  cplx s = 0.0, p = e;
  for (int k = 2; k <= 40; ++k) {
    p *= e;
    const cplx t = (k % 2 == 0 ? 1.0 : -1.0) * zm1[k] * p / static_cast<double>(k);
    s += t;
    if (std::abs(t) < 1e-18 * (std::abs(s) + std::abs(e))) break;
  }
  // ln(1+e) without losing digits for small e
  const cplx l1p(0.5 * std::log1p(2.0 * e.real() + std::norm(e)), std::atan2(e.imag(), 1.0 + e.real()));
  return -l1p + e * (1.0 - static_cast<double>(euler_gamma_l)) + s;
}

cplx lgamma_stirling(cplx w) {
  static constexpr std::array<double, 8> b2k = {1.0 / 6,     -1.0 / 30,        1.0 / 42,
                                                -1.0 / 30,   5.0 / 66,         -691.0 / 2730,
                                                7.0 / 6,     -3617.0 / 510};
  cplx r = (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * pi);
  const cplx w2inv = 1.0 / (w * w);
  cplx wp = 1.0 / w;
  for (int k = 1; k <= 8; ++k) {
    r += b2k[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * wp;
    wp *= w2inv;
  }
  return r;
}

}  // namespace

cplx log_gamma(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("lnGamma: non-finite argument");
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw SingularityError("lnGamma: pole at a nonpositive integer");
  if (std::abs(z - 1.0) <= 0.25) return lgamma1p_small(z - 1.0);
  if (std::abs(z - 2.0) <= 0.25) return lgamma1p_small(z - 2.0) + std::log(z - 1.0);
  cplx w = z, shift = 0.0;
  while (w.real() < 15.0 && std::abs(w) < 15.0) {
    shift += std::log(w);
    w += 1.0;
  }
  if (w.real() < 0.0) {
    // large |Im z| with negative real part: shift until the real part is positive
    while (w.real() < 0.5) {
      shift += std::log(w);
      w += 1.0;
    }
  }
  return lgamma_stirling(w) - shift;
}

double bernoulli2(double x) { return x * x - x + 1.0 / 6.0; }

// ---------------------------------------------------------------- Gamma(s, z)

cplx detail::sqrt_sheet(cplx w, bool lower_sheet) {
  if (!lower_sheet) return std::sqrt(w);
  return cplx(0.0, -1.0) * std::sqrt(-w);
}

cplx upper_gamma_half_orders(int d, cplx z, bool lower_sheet) {
  switch (d) {
    case 1: {
      if (!lower_sheet) return exp_integral_e1(z);
      if (z.imag() > 0.0) return exp_integral_e1(z) + cplx(0.0, 2.0 * pi);
      if (z.imag() == 0.0 && z.real() < 0.0) return detail::e1_signed(cplx(z.real(), -0.0));
      return exp_integral_e1(z);
    }
    case 2:
      return std::sqrt(pi) * erfc_complex(detail::sqrt_sheet(z, lower_sheet));
    case 3:
      return std::exp(-z);
    default:
      throw DomainError("upper_gamma_half_orders: d must be 1, 2 or 3");
  }
}

}  // namespace lb
