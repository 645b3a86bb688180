#pragma once

#include <vector>

#include "latticebands/quadrature.hpp"
#include "latticebands/specfun.hpp"

namespace lb {

// Bloch momentum, one component per lattice axis
using Bloch = std::vector<double>;

// wrap every component into [-1/2, 1/2)
Bloch reduce_to_fbz(const Bloch& beta);

enum class QuadScheme { TanhSinh, AdaptiveGK };

struct EwaldConfig {
  double eta = 0.56418958354775628;  // 1/sqrt(pi)
  int real_cutoff = 0;               // 0 selects the envelope rule
  int recip_cutoff = 0;
  int quad_points = 320;
  QuadScheme quad_scheme = QuadScheme::TanhSinh;
  bool cross_check_1d = false;  // route d = 1 through the Ewald engine

  void validate() const;
};

// d = 1 closed form
cplx lattice_sum_1d(cplx alpha, double beta);

struct SumBreakdown {
  cplx s1{0.0}, s2{0.0}, s12{0.0}, s3r{0.0}, s3m{0.0}, total{0.0};
  bool split_available = true;  // false when S1 and S2 diverge separately
  double quad_error = 0.0;
  double cutoff_error = 0.0;
};

// Ewald evaluator with everything that depends only on (d, beta, cfg)
// precomputed, so repeated calls at different alpha are cheap.
class LatticeSum {
 public:
  LatticeSum(int d, const Bloch& beta, const EwaldConfig& cfg = {});

  cplx operator()(cplx alpha) const;
  SumBreakdown breakdown(cplx alpha) const;

  // S1 alone (real); throws SingularityError where it diverges
  double s1() const;
  cplx s2(cplx alpha) const;
  cplx s3(cplx alpha) const;

  // distance from alpha to the nearest light-cone value |beta + h|
  double singular_distance(cplx alpha) const;
  // sorted distinct |beta + h| up to qmax
  std::vector<double> light_cone(double qmax) const;

  int dim() const { return d_; }
  const Bloch& beta() const { return beta_; }
  const EwaldConfig& config() const { return cfg_; }

 private:
  struct Shell {
    double r;
    double phase;  // sum of cos(2 pi beta.n) over the shell
  };
  cplx s12_integral(cplx alpha, double* err) const;
  cplx s3_real(cplx alpha) const;
  cplx s3_recip(cplx alpha) const;
  void ensure_shells(double rmax) const;
  void ensure_recip(double qmax) const;

  int d_;
  Bloch beta_;
  EwaldConfig cfg_;
  bool integer_beta_ = false;
  std::vector<double> u_, wu_, theta_m1_;  // quadrature nodes
  std::vector<bool> half_rule_;
  mutable std::vector<Shell> shells_;
  mutable double shell_rmax_ = 0.0;
  mutable std::vector<double> recip_q_;
  mutable std::vector<int> recip_mult_;
  mutable double recip_qmax_ = 0.0;
};

// free-function forms
double s1_theta_integral(int d, const Bloch& beta, const EwaldConfig& cfg = {});
cplx s2_theta_integral(int d, cplx alpha, const Bloch& beta, const EwaldConfig& cfg = {});
cplx s3_ewald(int d, cplx alpha, const Bloch& beta, const EwaldConfig& cfg = {});
cplx lattice_sum(int d, cplx alpha, const Bloch& beta, const EwaldConfig& cfg = {});

// batch evaluation over many (alpha, beta) points
struct SumPoint {
  cplx alpha;
  Bloch beta;
};
std::vector<cplx> lattice_sum_batch(int d, const std::vector<SumPoint>& pts, const EwaldConfig& cfg = {});
std::vector<cplx> lattice_sum_batch_serial(int d, const std::vector<SumPoint>& pts,
                                           const EwaldConfig& cfg = {});

// ---------------------------------------------------------------- oracles

struct OracleResult {
  cplx value;
  double error_bound;
};

// Smoothly windowed direct summation of G(|n|; 2 pi alpha) e^{-2 pi i beta.n}
// over 0 < |n| <= radius.  The window is (1/2)erfc((r - R0)/w) with
// w = radius/13 and R0 = 6.5 w; the bound is the change against the same
// sum at half the radius plus the Helmholtz tail.
OracleResult direct_sum_oracle(int d, cplx alpha, const Bloch& beta, int radius);
OracleResult direct_sum_oracle_serial(int d, cplx alpha, const Bloch& beta, int radius);

// radius needed for a target accuracy given dist(beta, Z^d) and Im alpha
int oracle_radius(int d, cplx alpha, const Bloch& beta, double tol);

// partial sum of the A(x) series
double a_series_oracle(double x, long terms);
// partial sums at terms, terms/2, terms/4 combined by Richardson extrapolation
double a_series_accelerated(double x, long terms);
double a_closed_form(double x);

}  // namespace lb
