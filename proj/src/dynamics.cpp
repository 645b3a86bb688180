#include "latticebands/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>

#include "latticebands/errors.hpp"

namespace lb {

namespace {

constexpr double pi = std::numbers::pi;

long ipow(long n, int d) {
  long r = 1;
  for (int i = 0; i < d; ++i) r *= n;
  return r;
}

void window_range(int grid_n, int window, int& lo, int& hi) {
  lo = -window;
  hi = window;
  if (2 * window + 1 > grid_n) hi = window - 1;
}

// contract axis `ax` of a tensor of shape `shape` with e[k * m + j]
std::vector<cplx> contract(const std::vector<cplx>& in, std::vector<int>& shape, int ax, const std::vector<cplx>& e,
                           int m) {
  long outer = 1, inner = 1;
  for (int i = 0; i < ax; ++i) outer *= shape[i];
  for (std::size_t i = ax + 1; i < shape.size(); ++i) inner *= shape[i];
  const int n = shape[ax];
  std::vector<cplx> out(static_cast<std::size_t>(outer) * m * inner, 0.0);
  for (long o = 0; o < outer; ++o)
    for (int k = 0; k < n; ++k) {
      const cplx* src = &in[(o * n + k) * inner];
      for (int j = 0; j < m; ++j) {
        const cplx w = e[static_cast<std::size_t>(k) * m + j];
        cplx* dst = &out[(o * m + j) * inner];
        for (long i = 0; i < inner; ++i) dst[i] += w * src[i];
      }
    }
  shape[ax] = m;
  return out;
}

WavepacketFrame one_frame(const std::vector<cplx>& band, int d, int grid_n, int lo, int hi, double tau,
                          const std::vector<cplx>& initial, const std::vector<cplx>& e) {
  const long total = ipow(grid_n, d);
  std::vector<cplx> a(total);
  for (long i = 0; i < total; ++i) {
    a[i] = propagator(band[i], tau) / static_cast<double>(total);
    if (!initial.empty()) a[i] *= initial[i];
  }
  const int m = hi - lo + 1;
  std::vector<int> shape(d, grid_n);
  for (int ax = 0; ax < d; ++ax) a = contract(a, shape, ax, e, m);
  WavepacketFrame f;
  f.tau = tau;
  f.d = d;
  f.lo = lo;
  f.hi = hi;
  f.amp = std::move(a);
  return f;
}

std::vector<WavepacketFrame> propagate_range(const std::vector<cplx>& band, int d, int grid_n, int lo, int hi,
                                             const std::vector<double>& taus, const std::vector<cplx>& initial,
                                             bool parallel);

// key of the cubic-symmetry orbit of a grid point
std::vector<int> orbit_key(std::vector<int> k, int n) {
  for (auto& v : k) v = std::min(v, n - 1 - v);
  std::sort(k.begin(), k.end());
  return k;
}

cplx band_value(const Bloch& beta, const ModelParams& p, bool full_solver) {
  const cplx approx = pole_approximation(beta, p);
  if (!full_solver) return approx;
  PoleEquation h(beta, p);
  SolveReport rep = solve_band(h, {approx, cplx(p.alpha0, -gamma0(p))});
  if (rep.roots.empty()) return approx;
  const Root* best = &rep.roots[0];
  for (auto& r : rep.roots)
    if (std::abs(r.alpha - approx) < std::abs(best->alpha - approx)) best = &r;
  return best->alpha;
}

template <bool Parallel>
std::vector<cplx> band_grid(const ModelParams& p, int n, bool full_solver) {
  p.validate();
  if (n < 2) throw DomainError("grid_n must be at least 2");
  const int d = p.d;
  const std::vector<double> g = momentum_grid(n);
  const long total = ipow(n, d);
  std::map<std::vector<int>, long> slot;
  std::vector<std::vector<int>> keys;
  std::vector<long> owner(total);
  std::vector<int> k(d);
  for (long i = 0; i < total; ++i) {
    long r = i;
    for (int ax = d - 1; ax >= 0; --ax) {
      k[ax] = static_cast<int>(r % n);
      r /= n;
    }
    auto key = orbit_key(k, n);
    auto [it, fresh] = slot.emplace(key, static_cast<long>(keys.size()));
    if (fresh) keys.push_back(key);
    owner[i] = it->second;
  }
  std::vector<cplx> vals(keys.size());
  const long nk = static_cast<long>(keys.size());
  auto eval = [&](long j) {
    Bloch beta(d);
    for (int ax = 0; ax < d; ++ax) beta[ax] = g[keys[j][ax]];
    vals[j] = band_value(beta, p, full_solver);
  };
  if constexpr (Parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long j = 0; j < nk; ++j) {
      try {
        eval(j);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (long j = 0; j < nk; ++j) eval(j);
  }
  std::vector<cplx> band(total);
  for (long i = 0; i < total; ++i) band[i] = vals[owner[i]];
  return band;
}

template <bool Parallel>
DynamicsResult evolve(const ModelParams& p, const DynamicsOptions& opt, const TimeGrid& times,
                      const std::vector<cplx>& initial) {
  times.validate();
  if (opt.window < 0 || 2 * opt.window > opt.grid_n) throw DomainError("window must satisfy 0 <= window <= grid_n/2");
  const long total = ipow(opt.grid_n, p.d);
  if (!initial.empty() && static_cast<long>(initial.size()) != total)
    throw DomainError("initial state does not match the momentum grid");
  const std::vector<double> taus = times.raw(p);
  DynamicsResult res;
  const std::vector<cplx> band = band_grid<Parallel>(p, opt.grid_n, opt.full_solver);
  res.frames = propagate(band, p.d, opt.grid_n, opt.window, taus, initial, Parallel);

  if (initial.empty()) {
    WavepacketFrame f0 = propagate(band, p.d, opt.grid_n, opt.window, {0.0}, {}, false)[0];
    double err = 0.0;
    const int m = f0.extent();
    for (long i = 0; i < static_cast<long>(f0.amp.size()); ++i) {
      long r = i;
      bool origin = true;
      for (int ax = 0; ax < p.d; ++ax) {
        if (r % m + f0.lo != 0) origin = false;
        r /= m;
      }
      err = std::max(err, std::abs(f0.amp[i] - (origin ? 1.0 : 0.0)));
    }
    res.recon_error = err;
    res.aliasing_warning = err > 1e-6;
  }

  if (opt.refine_check && initial.empty() && !taus.empty()) {
    const int n2 = 2 * opt.grid_n;
    const std::vector<cplx> band2 = band_grid<Parallel>(p, n2, opt.full_solver);
    const WavepacketFrame& coarse = res.frames.back();
    const WavepacketFrame fine = propagate_range(band2, p.d, n2, coarse.lo, coarse.hi, {taus.back()}, {}, false)[0];
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.amp.size(); ++i)
      worst = std::max(worst, std::abs(std::norm(coarse.amp[i]) - std::norm(fine.amp[i])));
    res.quad_error = worst + std::abs(frame_norm(coarse) - frame_norm(fine));
  }
  return res;
}

}  // namespace

void TimeGrid::validate() const {
  if (taus.empty()) throw DomainError("time grid is empty");
  if (taus.front() != 0.0) throw DomainError("time grid must start at tau = 0");
  for (std::size_t i = 1; i < taus.size(); ++i)
    if (!(taus[i] > taus[i - 1])) throw DomainError("time grid must be strictly increasing");
}

std::vector<double> TimeGrid::raw(const ModelParams& p) const {
  if (normalization == Norm::RawTau) return taus;
  const double g0 = gamma0(p);
  if (!(g0 > 0.0)) throw DomainError("Gamma0 tau normalization needs kappa > 0");
  std::vector<double> r;
  for (double t : taus) r.push_back(t / g0);
  return r;
}

cplx WavepacketFrame::at(const std::vector<int>& n) const {
  if (static_cast<int>(n.size()) != d) throw DomainError("site index has wrong dimension");
  const int m = extent();
  long idx = 0;
  for (int ax = 0; ax < d; ++ax) {
    if (n[ax] < lo || n[ax] > hi) throw DomainError("site outside the frame window");
    idx = idx * m + (n[ax] - lo);
  }
  return amp[idx];
}

std::vector<double> momentum_grid(int n) {
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = (k + 0.5) / n - 0.5;
  return g;
}

cplx propagator(cplx alpha, double tau) { return std::exp(cplx(0.0, -2.0 * pi * tau) * alpha); }

cplx momentum_propagator(const Bloch& beta, double tau, const ModelParams& p) {
  if (tau < 0.0) throw DomainError("tau must be non-negative");
  if (tau == 0.0) return 1.0;
  return propagator(pole_approximation(beta, p), tau);
}

std::vector<cplx> band_on_grid(const ModelParams& p, int grid_n, bool full_solver) {
  return band_grid<true>(p, grid_n, full_solver);
}

std::vector<cplx> band_on_grid_serial(const ModelParams& p, int grid_n, bool full_solver) {
  return band_grid<false>(p, grid_n, full_solver);
}

std::vector<WavepacketFrame> propagate(const std::vector<cplx>& band, int d, int grid_n, int window,
                                       const std::vector<double>& taus, const std::vector<cplx>& initial,
                                       bool parallel) {
  int lo, hi;
  window_range(grid_n, window, lo, hi);
  return propagate_range(band, d, grid_n, lo, hi, taus, initial, parallel);
}

namespace {

std::vector<WavepacketFrame> propagate_range(const std::vector<cplx>& band, int d, int grid_n, int lo, int hi,
                                             const std::vector<double>& taus, const std::vector<cplx>& initial,
                                             bool parallel) {
  const int m = hi - lo + 1;
  const std::vector<double> g = momentum_grid(grid_n);
  std::vector<cplx> e(static_cast<std::size_t>(grid_n) * m);
  for (int k = 0; k < grid_n; ++k)
    for (int j = 0; j < m; ++j) e[static_cast<std::size_t>(k) * m + j] = std::polar(1.0, 2.0 * pi * g[k] * (lo + j));
  std::vector<WavepacketFrame> frames(taus.size());
  const long nt = static_cast<long>(taus.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long t = 0; t < nt; ++t) frames[t] = one_frame(band, d, grid_n, lo, hi, taus[t], initial, e);
  return frames;
}

}  // namespace

DynamicsResult evolve_wavepacket(const ModelParams& p, const DynamicsOptions& opt, const TimeGrid& times,
                                 const std::vector<cplx>& initial) {
  return evolve<true>(p, opt, times, initial);
}

DynamicsResult evolve_wavepacket_serial(const ModelParams& p, const DynamicsOptions& opt, const TimeGrid& times,
                                        const std::vector<cplx>& initial) {
  return evolve<false>(p, opt, times, initial);
}

double frame_norm(const WavepacketFrame& f) {
  double s = 0.0;
  for (auto& a : f.amp) s += std::norm(a);
  return s;
}

std::vector<Profile> spatial_profile(const std::vector<WavepacketFrame>& frames, const std::vector<double>& taus) {
  std::vector<Profile> out;
  for (double t : taus) {
    auto it = std::find_if(frames.begin(), frames.end(),
                           [&](const WavepacketFrame& f) { return std::abs(f.tau - t) <= 1e-12 * (1.0 + t); });
    if (it == frames.end()) throw DomainError("no frame at tau = " + std::to_string(t));
    Profile pr{it->tau, {}};
    const int m = it->extent();
    for (std::size_t i = 0; i < it->amp.size(); ++i) {
      std::vector<int> n(it->d);
      long r = static_cast<long>(i);
      for (int ax = it->d - 1; ax >= 0; --ax) {
        n[ax] = static_cast<int>(r % m) + it->lo;
        r /= m;
      }
      pr.rows.push_back({n, std::norm(it->amp[i])});
    }
    out.push_back(std::move(pr));
  }
  return out;
}

double spread_beyond(const WavepacketFrame& f, int radius) {
  double best = 0.0;
  const int m = f.extent();
  for (std::size_t i = 0; i < f.amp.size(); ++i) {
    long r = static_cast<long>(i);
    long n2 = 0;
    for (int ax = 0; ax < f.d; ++ax) {
      const long n = r % m + f.lo;
      n2 += n * n;
      r /= m;
    }
    if (n2 > static_cast<long>(radius) * radius) best = std::max(best, std::norm(f.amp[i]));
  }
  return best;
}

double rms_radius(const WavepacketFrame& f) {
  double m2 = 0.0, total = 0.0;
  const int m = f.extent();
  for (std::size_t i = 0; i < f.amp.size(); ++i) {
    long r = static_cast<long>(i);
    double n2 = 0.0;
    for (int ax = 0; ax < f.d; ++ax) {
      const double n = static_cast<double>(r % m + f.lo);
      n2 += n * n;
      r /= m;
    }
    const double p = std::norm(f.amp[i]);
    m2 += n2 * p;
    total += p;
  }
  return total > 0.0 ? std::sqrt(m2 / total) : 0.0;
}

}  // namespace lb
