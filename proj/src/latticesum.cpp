#include "latticebands/latticesum.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "latticebands/errors.hpp"

namespace lb {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I(0.0, 1.0);
// e^{-41.5} ~ 1e-18, the envelope level at which both Ewald halves stop
constexpr double envelope = 41.5;
constexpr double u_max = 6.6;
// largest Re(alpha) the precomputed shells cover
constexpr double alpha_re_max = 4.0;

// e^{i theta} - 1 without cancellation
cplx expm1_i(cplx theta) {
  const cplx z = I * theta;
  const double x = z.real(), y = z.imag();
  const double em1 = std::expm1(x);
  const double s = std::sin(0.5 * y);
  return {em1 * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

void check_dim(int d, const Bloch& beta) {
  if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
  if (static_cast<int>(beta.size()) != d) throw DomainError("Bloch vector length does not match d");
}

}  // namespace

Bloch reduce_to_fbz(const Bloch& beta) {
  Bloch r(beta.size());
  for (std::size_t i = 0; i < beta.size(); ++i) {
    double b = beta[i] - std::floor(beta[i] + 0.5);
    if (b >= 0.5) b -= 1.0;
    r[i] = b;
  }
  return r;
}

void EwaldConfig::validate() const {
  if (!(eta >= 0.2 && eta <= 1.5)) throw DomainError("eta must lie in [0.2, 1.5]");
  if (quad_points < 16) throw DomainError("quad_points must be at least 16");
  if (real_cutoff < 0 || recip_cutoff < 0) throw DomainError("cutoffs must be non-negative");
}

// ---------------------------------------------------------------- d = 1

cplx lattice_sum_1d(cplx alpha, double beta) {
  if (alpha == 0.0) throw DomainError("lattice_sum_1d: alpha = 0");
  const double b = std::abs(reduce_to_fbz({beta})[0]);
  if (alpha.imag() == 0.0) {
    for (double s : {alpha.real() + b, alpha.real() - b})
      if (std::abs(s - std::round(s)) < 1e-15)
        throw SingularityError("lattice_sum_1d: alpha on the light cone |beta + h|");
  }
  const cplx a = alpha;
  cplx s = bernoulli2(b) - 2.0 * a * a + 2.0 * a * a * std::log(a) + a * std::log(2.0 * pi * (a + b)) -
           a * log_gamma(1.0 + a + b) - a * log_gamma(1.0 + a - b);
  s -= a * std::log(-expm1_i(2.0 * pi * (a + b)));
  s -= a * std::log(-expm1_i(2.0 * pi * (a - b)));
  return s;
}

// ---------------------------------------------------------------- Ewald

LatticeSum::LatticeSum(int d, const Bloch& beta, const EwaldConfig& cfg)
    : d_(d), beta_(reduce_to_fbz(beta)), cfg_(cfg) {
  check_dim(d, beta);
  cfg_.validate();
  integer_beta_ = std::all_of(beta_.begin(), beta_.end(), [](double b) { return b == 0.0; });

  if (cfg_.quad_scheme == QuadScheme::TanhSinh) {
    QuadRule rule = tanh_sinh_rule(0.0, u_max, cfg_.quad_points);
    for (std::size_t j = 0; j < rule.x.size(); ++j) {
      const double u = rule.x[j];
      double t = 1.0;
      // expand the product so that small factors do not cancel against 1
      double e[3] = {0, 0, 0};
      for (int i = 0; i < d_; ++i) e[i] = detail::theta3m1_lognome(pi * beta_[i], u);
      if (d_ == 1)
        t = e[0];
      else if (d_ == 2)
        t = e[0] + e[1] + e[0] * e[1];
      else
        t = e[0] + e[1] + e[2] + e[0] * e[1] + e[0] * e[2] + e[1] * e[2] + e[0] * e[1] * e[2];
      u_.push_back(u);
      wu_.push_back(rule.w[j] * u / (pi * pi));
      theta_m1_.push_back(t);
      half_rule_.push_back(rule.even[j]);
    }
  }

  // real-space shells
  const double eta = cfg_.eta;
  double rmax = cfg_.real_cutoff > 0
                    ? cfg_.real_cutoff
                    : eta * std::sqrt(envelope + pi * pi * eta * eta * alpha_re_max * alpha_re_max);
  shell_rmax_ = rmax;
  const int n = static_cast<int>(std::ceil(rmax));
  std::map<long, double> by_r2;
  const int n2 = d_ >= 2 ? n : 0, n3 = d_ >= 3 ? n : 0;
  for (int i = -n; i <= n; ++i)
    for (int j = -n2; j <= n2; ++j)
      for (int k = -n3; k <= n3; ++k) {
        const long r2 = static_cast<long>(i) * i + static_cast<long>(j) * j + static_cast<long>(k) * k;
        if (r2 == 0 || r2 > rmax * rmax) continue;
        double ph = beta_[0] * i;
        if (d_ >= 2) ph += beta_[1] * j;
        if (d_ >= 3) ph += beta_[2] * k;
        by_r2[r2] += std::cos(2.0 * pi * ph);
      }
  for (auto& [r2, c] : by_r2) shells_.push_back({std::sqrt(static_cast<double>(r2)), c});

  // reciprocal lattice |beta + h|
  double qmax = cfg_.recip_cutoff > 0
                    ? cfg_.recip_cutoff
                    : std::sqrt(envelope / (pi * pi * eta * eta) + alpha_re_max * alpha_re_max) + 1.0;
  recip_qmax_ = qmax;
  const int m = static_cast<int>(std::ceil(qmax)) + 1;
  const int m2 = d_ >= 2 ? m : 0, m3 = d_ >= 3 ? m : 0;
  std::vector<double> q2s;
  for (int i = -m; i <= m; ++i)
    for (int j = -m2; j <= m2; ++j)
      for (int k = -m3; k <= m3; ++k) {
        double q2 = (beta_[0] + i) * (beta_[0] + i);
        if (d_ >= 2) q2 += (beta_[1] + j) * (beta_[1] + j);
        if (d_ >= 3) q2 += (beta_[2] + k) * (beta_[2] + k);
        if (q2 <= qmax * qmax) q2s.push_back(q2);
      }
  std::sort(q2s.begin(), q2s.end());
  for (double q2 : q2s) {
    const double q = std::sqrt(q2);
    if (!recip_q_.empty() && std::abs(q - recip_q_.back()) <= 1e-14 * std::max(1.0, q))
      ++recip_mult_.back();
    else {
      recip_q_.push_back(q);
      recip_mult_.push_back(1);
    }
  }
}

cplx LatticeSum::s12_integral(cplx alpha, double* err) const {
  if (!(alpha.real() > 0.0)) throw DomainError("Ewald path requires Re(alpha) > 0");
  auto integrand = [&](double u) -> cplx {
    double e[3] = {0, 0, 0};
    for (int i = 0; i < d_; ++i) e[i] = detail::theta3m1_lognome(pi * beta_[i], u);
    double t = d_ == 1   ? e[0]
               : d_ == 2 ? e[0] + e[1] + e[0] * e[1]
                         : e[0] + e[1] + e[2] + e[0] * e[1] + e[0] * e[2] + e[1] * e[2] + e[0] * e[1] * e[2];
    if (u == 0.0) return 0.0;
    return u / (pi * pi) * detail::one_minus_sqrtpi_x_erfcx(pi * alpha / u) * t;
  };
  if (cfg_.quad_scheme == QuadScheme::TanhSinh) {
    cplx full = 0.0, half = 0.0;
    for (std::size_t j = 0; j < u_.size(); ++j) {
      const cplx v = wu_[j] * detail::one_minus_sqrtpi_x_erfcx(pi * alpha / u_[j]) * theta_m1_[j];
      full += v;
      if (half_rule_[j]) half += 2.0 * v;
    }
    const double e = std::abs(full - half);
    if (e <= 1e-11 * (1.0 + std::abs(full))) {
      if (err) *err = e;
      return full;
    }
  }
  QuadResult r = adaptive_gk(integrand, 0.0, u_max, 1e-13);
  if (r.error > 1e-10) throw ConvergenceError("theta integral: quadrature error " + std::to_string(r.error));
  if (err) *err = r.error;
  return r.value;
}

double LatticeSum::s1() const {
  if (integer_beta_ && d_ >= 2) throw SingularityError("S1 diverges at beta = 0 for d >= 2");
  auto integrand = [&](double u) -> cplx {
    double e[3] = {0, 0, 0};
    for (int i = 0; i < d_; ++i) e[i] = detail::theta3m1_lognome(pi * beta_[i], u);
    double t = d_ == 1   ? e[0]
               : d_ == 2 ? e[0] + e[1] + e[0] * e[1]
                       : e[0] + e[1] + e[2] + e[0] * e[1] + e[0] * e[2] + e[1] * e[2] + e[0] * e[1] * e[2];
    return u / (pi * pi) * t;
  };
  if (cfg_.quad_scheme == QuadScheme::TanhSinh) {
    double full = 0.0, half = 0.0;
    for (std::size_t j = 0; j < u_.size(); ++j) {
      const double v = wu_[j] * theta_m1_[j];
      full += v;
      if (half_rule_[j]) half += 2.0 * v;
    }
    if (std::abs(full - half) <= 1e-11 * (1.0 + std::abs(full))) return full;
  }
  QuadResult r = adaptive_gk(integrand, 0.0, u_max, 1e-13);
  if (r.error > 1e-10) throw ConvergenceError("S1 theta integral: quadrature error " + std::to_string(r.error));
  return r.value.real();
}

cplx LatticeSum::s3_real(cplx alpha) const {
  const double eta = cfg_.eta;
  const double re2 = std::max(0.0, (alpha * alpha).real());
  const double rcut = cfg_.real_cutoff > 0 ? cfg_.real_cutoff : eta * std::sqrt(envelope + pi * pi * eta * eta * re2);
  if (rcut > shell_rmax_ + 1e-9) throw DomainError("Re(alpha) beyond the precomputed real-space range");
  const cplx shift = pi * pi * alpha * alpha * eta * eta;
  cplx s = 0.0;
  for (const Shell& sh : shells_) {
    if (sh.r > rcut) break;
    const cplx a = sh.r * sh.r / (eta * eta) - shift;
    const cplx zp = sh.r / eta + I * pi * alpha * eta;
    const cplx zm = sh.r / eta - I * pi * alpha * eta;
    s += (detail::scaled_erfcx(zp, a) + detail::scaled_erfcx(zm, a)) * (sh.phase / sh.r);
  }
  return 0.5 * alpha * s;
}

cplx LatticeSum::s3_recip(cplx alpha) const {
  const double eta = cfg_.eta;
  const double re2 = std::max(0.0, (alpha * alpha).real());
  const double qcut = cfg_.recip_cutoff > 0 ? cfg_.recip_cutoff : std::sqrt(envelope / (pi * pi * eta * eta) + re2);
  if (qcut > recip_qmax_ + 1e-9) throw DomainError("Re(alpha) beyond the precomputed reciprocal range");
  const double pe2 = pi * pi * eta * eta;
  cplx s = 0.0;
  for (std::size_t j = 0; j < recip_q_.size(); ++j) {
    const double q = recip_q_[j];
    if (q > qcut) break;
    const cplx w = q * q - alpha * alpha;
    if (std::abs(w) < 1e-12 * std::max(1.0, q * q))
      throw SingularityError("alpha on the resonance |beta + h| = " + std::to_string(q));
    const bool lower = alpha.real() > q;
    cplx t;
    if (d_ == 1) {
      t = upper_gamma_half_orders(1, pe2 * w, lower);
    } else if (d_ == 2) {
      const cplx sw = detail::sqrt_sheet(w, lower);
      t = erfc_complex(pi * eta * sw) / sw;
    } else {
      t = std::exp(-pe2 * w) / (pi * w);
    }
    s += static_cast<double>(recip_mult_[j]) * t;
  }
  s *= alpha;
  s += -2.0 * alpha / (std::sqrt(pi) * eta) * std::exp(pe2 * alpha * alpha);
  s += -2.0 * pi * I * alpha * alpha * erfc_complex(-I * pi * alpha * eta);
  return s;
}

cplx LatticeSum::s3(cplx alpha) const { return s3_real(alpha) + s3_recip(alpha); }

cplx LatticeSum::s2(cplx alpha) const { return s12_integral(alpha, nullptr) - s1(); }

SumBreakdown LatticeSum::breakdown(cplx alpha) const {
  SumBreakdown b;
  b.s12 = s12_integral(alpha, &b.quad_error);
  b.s3r = s3_real(alpha);
  b.s3m = s3_recip(alpha);
  b.total = b.s12 + b.s3r + b.s3m;
  if (integer_beta_ && d_ >= 2) {
    b.split_available = false;
  } else {
    b.s1 = s1();
    b.s2 = b.s12 - b.s1;
  }
  b.cutoff_error = 1e-16 * (1.0 + std::abs(b.total)) * 10.0;
  return b;
}

cplx LatticeSum::operator()(cplx alpha) const {
  if (d_ == 1 && !cfg_.cross_check_1d) return lattice_sum_1d(alpha, beta_[0]);
  return s12_integral(alpha, nullptr) + s3_real(alpha) + s3_recip(alpha);
}

double LatticeSum::singular_distance(cplx alpha) const {
  double best = std::numeric_limits<double>::infinity();
  for (double q : recip_q_) best = std::min(best, std::abs(alpha - q));
  return best;
}

std::vector<double> LatticeSum::light_cone(double qmax) const {
  std::vector<double> r;
  for (double q : recip_q_)
    if (q <= qmax) r.push_back(q);
  return r;
}

double s1_theta_integral(int d, const Bloch& beta, const EwaldConfig& cfg) {
  return LatticeSum(d, beta, cfg).s1();
}

cplx s2_theta_integral(int d, cplx alpha, const Bloch& beta, const EwaldConfig& cfg) {
  return LatticeSum(d, beta, cfg).s2(alpha);
}

cplx s3_ewald(int d, cplx alpha, const Bloch& beta, const EwaldConfig& cfg) {
  return LatticeSum(d, beta, cfg).s3(alpha);
}

cplx lattice_sum(int d, cplx alpha, const Bloch& beta, const EwaldConfig& cfg) {
  check_dim(d, beta);
  if (d == 1 && !cfg.cross_check_1d) return lattice_sum_1d(alpha, beta[0]);
  return LatticeSum(d, beta, cfg)(alpha);
}

std::vector<cplx> lattice_sum_batch_serial(int d, const std::vector<SumPoint>& pts, const EwaldConfig& cfg) {
  std::vector<cplx> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = lattice_sum(d, pts[i].alpha, pts[i].beta, cfg);
  return out;
}

std::vector<cplx> lattice_sum_batch(int d, const std::vector<SumPoint>& pts, const EwaldConfig& cfg) {
  std::vector<cplx> out(pts.size());
  const long n = static_cast<long>(pts.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = lattice_sum(d, pts[i].alpha, pts[i].beta, cfg);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace lb
