#include "latticebands/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>

namespace lb {

QuadRule tanh_sinh_rule(double a, double b, int n) {
  constexpr double halfpi = std::numbers::pi / 2;
  const double tmax = 3.2;
  const int half = std::max(n / 2, 4);
  const double h = tmax / half;
  const double c = 0.5 * (b - a);
  QuadRule r;
  for (int k = -half; k <= half; ++k) {
    const double t = k * h;
    const double s = halfpi * std::sinh(t);
    const double ch = std::cosh(s);
    // distance to each end computed without cancellation
    const double e = std::exp(-2.0 * std::abs(s));
    const double near = 2.0 * c * e / (1.0 + e);
    const double x = s < 0 ? a + near : b - near;
    const double w = c * h * halfpi * std::cosh(t) / (ch * ch);
    if (w < 1e-300 || !std::isfinite(w)) continue;
    r.x.push_back(x);
    r.w.push_back(w);
    r.even.push_back(k % 2 == 0);
  }
  return r;
}

namespace {

constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b;
  std::complex<double> value;
  double error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const std::function<std::complex<double>(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const std::complex<double> fc = f(c);
  std::complex<double> k = fc * wgk[7], g = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    const std::complex<double> s = f(c - dx) + f(c + dx);
    k += wgk[j] * s;
    if (j % 2 == 1) g += wg[j / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

QuadResult adaptive_gk(const std::function<std::complex<double>(double)>& f, double a, double b,
                       double abs_tol, int max_intervals) {
  std::priority_queue<Piece> pq;
  Piece p = gk15(f, a, b);
  std::complex<double> total = p.value;
  double err = p.error;
  pq.push(p);
  int evals = 15;
  while (err > abs_tol && static_cast<int>(pq.size()) < max_intervals) {
    Piece worst = pq.top();
    pq.pop();
    const double m = 0.5 * (worst.a + worst.b);
    Piece l = gk15(f, worst.a, m), r = gk15(f, m, worst.b);
    evals += 30;
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    pq.push(l);
    pq.push(r);
  }
  // recompute the sums to shed accumulated rounding
  total = 0.0;
  err = 0.0;
  while (!pq.empty()) {
    total += pq.top().value;
    err += pq.top().error;
    pq.pop();
  }
  return {total, err, evals};
}

}  // namespace lb
