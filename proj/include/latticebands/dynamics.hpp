#pragma once

#include <string>
#include <vector>

#include "latticebands/bands.hpp"

namespace lb {

struct TimeGrid {
  enum class Norm { RawTau, Gamma0Tau };
  std::vector<double> taus;
  Norm normalization = Norm::RawTau;

  void validate() const;
  // raw tau values
  std::vector<double> raw(const ModelParams& p) const;
};

struct WavepacketFrame {
  double tau = 0.0;
  int d = 1;
  int lo = 0, hi = 0;        // site range per axis, inclusive
  std::vector<cplx> amp;     // row-major, first axis slowest

  int extent() const { return hi - lo + 1; }
  cplx at(const std::vector<int>& n) const;
};

struct DynamicsResult {
  std::vector<WavepacketFrame> frames;
  double quad_error = 0.0;     // grid-doubling estimate at tau_max
  double recon_error = 0.0;    // tau = 0 point-source reconstruction
  bool aliasing_warning = false;
};

struct DynamicsOptions {
  int grid_n = 64;
  int window = 16;
  bool full_solver = false;  // atom-like branch from solve_band instead of the pole approximation
  bool refine_check = true;
};

// offset grid (k + 1/2)/n - 1/2
std::vector<double> momentum_grid(int n);

cplx propagator(cplx alpha, double tau);
cplx momentum_propagator(const Bloch& beta, double tau, const ModelParams& p);

// alpha(beta) on the full grid, row-major
std::vector<cplx> band_on_grid(const ModelParams& p, int grid_n, bool full_solver);
std::vector<cplx> band_on_grid_serial(const ModelParams& p, int grid_n, bool full_solver);

// initial: psi(beta, 0) on the grid, empty for a point source
DynamicsResult evolve_wavepacket(const ModelParams& p, const DynamicsOptions& opt, const TimeGrid& times,
                                 const std::vector<cplx>& initial = {});
DynamicsResult evolve_wavepacket_serial(const ModelParams& p, const DynamicsOptions& opt, const TimeGrid& times,
                                        const std::vector<cplx>& initial = {});

// frames from a precomputed band
std::vector<WavepacketFrame> propagate(const std::vector<cplx>& band, int d, int grid_n, int window,
                                       const std::vector<double>& taus, const std::vector<cplx>& initial,
                                       bool parallel);

double frame_norm(const WavepacketFrame& f);

struct ProfileRow {
  std::vector<int> n;
  double prob;
};
struct Profile {
  double tau;
  std::vector<ProfileRow> rows;
};
std::vector<Profile> spatial_profile(const std::vector<WavepacketFrame>& frames, const std::vector<double>& taus);

// max |psi_n|^2 over sites with |n| > radius
double spread_beyond(const WavepacketFrame& f, int radius);

// sqrt(sum |n|^2 |psi_n|^2 / sum |psi_n|^2) over the window
double rms_radius(const WavepacketFrame& f);

}  // namespace lb
