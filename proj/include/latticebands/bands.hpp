#pragma once

#include <string>
#include <vector>

#include "latticebands/latticesum.hpp"

namespace lb {

struct ModelParams {
  double alpha0 = 0.30;
  double kappa = 5e-3;
  int d = 1;
  EwaldConfig ewald;

  void validate() const;
};

double gamma0(const ModelParams& p);

// left side of the pole equation with the lattice sum for one beta cached
class PoleEquation {
 public:
  PoleEquation(const Bloch& beta, const ModelParams& p);
  cplx operator()(cplx alpha) const;
  cplx lattice_sum(cplx alpha) const { return sum_(alpha); }
  double singular_distance(cplx alpha) const { return sum_.singular_distance(alpha); }
  std::vector<double> light_cone(double qmax) const { return sum_.light_cone(qmax); }
  const ModelParams& params() const { return p_; }
  const Bloch& beta() const { return sum_.beta(); }

 private:
  ModelParams p_;
  LatticeSum sum_;
};

cplx pole_equation_residual(cplx alpha, const Bloch& beta, const ModelParams& p);

struct Root {
  cplx alpha;
  double residual = 0.0;
  int iterations = 0;
  // ratio of the last two Newton step lengths; below 1 means the iteration contracted
  double contraction = 0.0;
  bool muller = false;
};

struct SolveReport {
  std::vector<Root> roots;
  std::vector<std::string> failures;
};

// Newton with step-halving, Muller fallback, deflation by merging
SolveReport solve_band(const Bloch& beta, const ModelParams& p, const std::vector<cplx>& guesses);
SolveReport solve_band(const PoleEquation& h, const std::vector<cplx>& guesses);

cplx pole_approximation(const Bloch& beta, const ModelParams& p);
double decay_rate_1d(double beta, const ModelParams& p);

struct PathPoint {
  Bloch beta;
  double s = 0.0;     // cumulative arc length
  std::string label;  // name at segment ends, empty otherwise
};

Bloch named_point(int d, const std::string& name);
std::vector<PathPoint> bz_path(int d, const std::vector<std::string>& names, int points_per_segment);

struct BandPoint {
  Bloch beta;
  double s = 0.0;
  std::vector<Root> roots;   // ordered by Re alpha
  std::vector<int> branch;   // branch label per root
  bool gap_marker = false;   // alpha0 within 1e-3 of a light-cone value
  std::vector<std::string> failures;
};

struct BandStructure {
  ModelParams params;
  std::vector<BandPoint> points;
  int branches = 0;
};

struct SweepOptions {
  int warm_start_every = 8;
  // photon seeds |beta + h| are kept when within this distance of alpha0
  double seed_window = 0.5;
  bool photon_seeds = true;
};

// seeds used at a fresh point: pole approximation and free-photon guesses
std::vector<cplx> default_guesses(const PoleEquation& h, const SweepOptions& opt);

BandStructure band_sweep(const std::vector<PathPoint>& path, const ModelParams& p, const SweepOptions& opt = {});
BandStructure band_sweep_serial(const std::vector<PathPoint>& path, const ModelParams& p,
                                const SweepOptions& opt = {});

struct DecayRow {
  double alpha0;
  double ratio;       // Gamma / Gamma0
  bool flagged;       // nudged off a singular point
};

std::vector<DecayRow> decay_vs_spacing(const Bloch& beta, const std::vector<double>& alpha0_grid,
                                       const ModelParams& p);
std::vector<DecayRow> decay_vs_spacing_serial(const Bloch& beta, const std::vector<double>& alpha0_grid,
                                              const ModelParams& p);

// (m/2) C for m = 1..m_max
std::vector<double> bragg_resonances(const std::string& point, int m_max);

// poles of S(alpha0, beta) on the real axis located by scanning the grid for
// sign changes of Re S and bisecting; zeros are told apart by |S|
std::vector<double> locate_resonances(int d, const Bloch& beta, const std::vector<double>& alpha0_grid,
                                      const EwaldConfig& cfg = {});

}  // namespace lb
