#include "latticebands/bands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>

#include "latticebands/errors.hpp"

namespace lb {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double merge_tol = 1e-8;
constexpr double accept_residual = 1e-10;
constexpr double accept_imag = 1e-9;
constexpr int max_iter = 200;

std::string fmt_c(cplx z) {
  std::ostringstream os;
  os.precision(10);
  os << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i)";
  return os.str();
}

struct Probe {
  const PoleEquation& h;
  int d;

  bool admissible(cplx a) const {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
    if (a.real() >= 3.9 || std::abs(a) >= 3.9 || std::abs(a.imag()) > 2.0) return false;
    if (d >= 2 && a.real() <= 1e-6) return false;
    if (d == 1 && std::abs(a) < 1e-12) return false;
    return true;
  }

  bool eval(cplx a, cplx& f) const {
    if (!admissible(a)) return false;
    try {
      f = h(a);
    } catch (const std::exception&) {
      return false;
    }
    return std::isfinite(f.real()) && std::isfinite(f.imag());
  }

  // central difference; the step shrinks near light-cone values
  bool derivative(cplx a, cplx& df) const {
    const double dist = h.singular_distance(a);
    double s = std::min(1e-7 * (1.0 + std::abs(a)), 0.1 * dist);
    s = std::max(s, 1e-15 * (1.0 + std::abs(a)));
    cplx fp, fm;
    if (eval(a + s, fp) && eval(a - s, fm)) {
      df = (fp - fm) / (2.0 * s);
    } else {
      const cplx is(0.0, s);
      if (!(eval(a + is, fp) && eval(a - is, fm))) return false;
      df = (fp - fm) / (2.0 * is);
    }
    return std::isfinite(df.real()) && std::isfinite(df.imag()) && std::abs(df) > 0.0;
  }
};

struct Attempt {
  bool ok = false;
  Root root;
  std::string why;
};

Attempt newton(const Probe& pr, cplx a) {
  Attempt out;
  cplx fa;
  if (!pr.eval(a, fa)) {
    out.why = "residual not evaluable at the guess";
    return out;
  }
  double prev = 0.0, contraction = 0.0, best = std::abs(fa);
  int it = 0, stale = 0;
  for (; it < max_iter; ++it) {
    if (std::abs(fa) < 1e-15 * (1.0 + std::abs(a))) break;
    cplx df;
    if (!pr.derivative(a, df)) {
      out.why = "derivative stagnated";
      return out;
    }
    cplx step = -fa / df;
    const double lim = std::min(0.1, 0.5 * pr.h.singular_distance(a));
    if (std::abs(step) > lim) step *= lim / std::abs(step);
    double lam = 1.0;
    cplx an, fn;
    bool moved = false;
    for (int k = 0; k < 24; ++k, lam *= 0.5) {
      an = a + lam * step;
      if (pr.eval(an, fn) && std::abs(fn) < std::abs(fa)) {
        moved = true;
        break;
      }
    }
    if (!moved) break;
    const double len = std::abs(an - a);
    contraction = prev > 0.0 ? len / prev : 0.0;
    prev = len;
    a = an;
    fa = fn;
    if (len < 1e-16 * (1.0 + std::abs(a))) break;
    // slow creep toward a light-cone value
    if (std::abs(fa) < 0.5 * best) {
      best = std::abs(fa);
      stale = 0;
    } else if (++stale > 15) {
      break;
    }
  }
  if (it == max_iter && std::abs(fa) >= accept_residual) {
    out.why = "no convergence after 200 iterations";
    return out;
  }
  out.root = {a, std::abs(fa), it, contraction, false};
  out.ok = std::abs(fa) < accept_residual;
  if (!out.ok) out.why = "line search stalled at |H| = " + std::to_string(std::abs(fa));
  return out;
}

Attempt muller(const Probe& pr, cplx a) {
  Attempt out;
  const double s = std::max(1e-6, std::min(1e-3, 0.25 * pr.h.singular_distance(a)));
  cplx x0 = a - s, x1 = a + s, x2 = a + cplx(0.0, -s);
  cplx f0, f1, f2;
  if (!(pr.eval(x0, f0) && pr.eval(x1, f1) && pr.eval(x2, f2))) {
    out.why = "muller start not evaluable";
    return out;
  }
  double prev = 0.0, contraction = 0.0, best = std::abs(f2);
  int it = 0, stale = 0;
  for (; it < max_iter; ++it) {
    const cplx h1 = x1 - x0, h2 = x2 - x1;
    const cplx d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
    const cplx c2 = (d2 - d1) / (h2 + h1);
    const cplx b = d2 + h2 * c2;
    const cplx disc = std::sqrt(b * b - 4.0 * f2 * c2);
    const cplx den = std::abs(b + disc) > std::abs(b - disc) ? b + disc : b - disc;
    if (std::abs(den) == 0.0) break;
    cplx step = -2.0 * f2 / den;
    const double lim = std::min(0.1, 0.5 * pr.h.singular_distance(x2));
    if (std::abs(step) > lim) step *= lim / std::abs(step);
    cplx x3 = x2 + step, f3;
    int tries = 0;
    while (!pr.eval(x3, f3) && tries++ < 30) {
      step *= 0.5;
      x3 = x2 + step;
    }
    if (tries > 30) break;
    const double len = std::abs(step);
    contraction = prev > 0.0 ? len / prev : 0.0;
    prev = len;
    x0 = x1, f0 = f1;
    x1 = x2, f1 = f2;
    x2 = x3, f2 = f3;
    if (std::abs(f2) < 1e-15 * (1.0 + std::abs(x2)) || len < 1e-16 * (1.0 + std::abs(x2))) break;
    if (std::abs(f2) < best) {
      best = std::abs(f2);
      stale = 0;
    } else if (++stale > 20) {
      break;
    }
  }
  out.root = {x2, std::abs(f2), it, contraction, true};
  out.ok = std::abs(f2) < accept_residual;
  if (!out.ok) out.why = it >= max_iter ? "no convergence after 200 iterations" : "muller stalled at |H| = " + std::to_string(std::abs(f2));
  return out;
}

void merge(std::vector<Root>& roots, const Root& r) {
  for (auto& e : roots)
    if (std::abs(e.alpha - r.alpha) < merge_tol) {
      if (r.residual < e.residual) e = r;
      return;
    }
  roots.push_back(r);
}

bool near_locus(const PoleEquation& h, double alpha0) { return h.singular_distance(cplx(alpha0, 0.0)) < 1e-3; }

}  // namespace

void ModelParams::validate() const {
  if (!(alpha0 > 0.0)) throw DomainError("alpha0 must be positive");
  if (!(kappa >= 0.0)) throw DomainError("kappa must be non-negative");
  if (d < 1 || d > 3) throw DomainError("d must be 1, 2 or 3");
  ewald.validate();
}

double gamma0(const ModelParams& p) { return 2.0 * pi * p.kappa * p.alpha0 * p.alpha0; }

PoleEquation::PoleEquation(const Bloch& beta, const ModelParams& p) : p_(p), sum_(p.d, beta, p.ewald) {
  p_.validate();
}

cplx PoleEquation::operator()(cplx alpha) const {
  const cplx lin = alpha - p_.alpha0 + cplx(0.0, 2.0 * pi * p_.kappa) * alpha * alpha;
  if (p_.kappa == 0.0) return lin;
  return lin + p_.kappa * sum_(alpha);
}

cplx pole_equation_residual(cplx alpha, const Bloch& beta, const ModelParams& p) {
  return PoleEquation(beta, p)(alpha);
}

SolveReport solve_band(const PoleEquation& h, const std::vector<cplx>& guesses) {
  if (guesses.empty()) throw DomainError("solve_band needs at least one guess");
  SolveReport rep;
  const Probe pr{h, h.params().d};
  std::vector<cplx> seen;
  for (cplx g : guesses) {
    if (std::any_of(seen.begin(), seen.end(), [&](cplx s) { return std::abs(s - g) < 1e-14; })) continue;
    seen.push_back(g);
    Attempt a = newton(pr, g);
    if (!a.ok) {
      Attempt m = muller(pr, a.root.alpha == cplx(0.0) ? g : a.root.alpha);
      if (m.ok)
        a = m;
      else
        a.why += "; " + m.why;
    }
    if (!a.ok) {
      std::string tag = h.singular_distance(g) < 1e-3 ? " [near light cone]" : "";
      rep.failures.push_back("guess " + fmt_c(g) + ": " + a.why + tag);
      continue;
    }
    if (a.root.alpha.imag() > accept_imag) continue;  // growing, unphysical
    merge(rep.roots, a.root);
  }
  std::sort(rep.roots.begin(), rep.roots.end(), [](const Root& x, const Root& y) {
    if (x.alpha.real() != y.alpha.real()) return x.alpha.real() < y.alpha.real();
    return x.alpha.imag() < y.alpha.imag();
  });
  return rep;
}

SolveReport solve_band(const Bloch& beta, const ModelParams& p, const std::vector<cplx>& guesses) {
  return solve_band(PoleEquation(beta, p), guesses);
}

cplx pole_approximation(const Bloch& beta, const ModelParams& p) {
  p.validate();
  const double a0 = p.alpha0;
  const cplx s = lattice_sum(p.d, cplx(a0, 0.0), beta, p.ewald);
  return cplx(a0, -2.0 * pi * p.kappa * a0 * a0) - p.kappa * s;
}

double decay_rate_1d(double beta, const ModelParams& p) {
  auto term = [](double x) {
    const double frac = x - std::floor(x);
    const double sg = std::sin(2.0 * pi * x) > 0 ? 1.0 : (std::sin(2.0 * pi * x) < 0 ? -1.0 : 0.0);
    return sg * std::abs(frac - 0.5);
  };
  const double a0 = p.alpha0, k = p.kappa;
  return 2.0 * pi * k * a0 * a0 + pi * k * a0 * (term(a0 + beta) + term(a0 - beta));
}

// ------------------------------------------------------------------ paths

Bloch named_point(int d, const std::string& name) {
  if (d < 1 || d > 3) throw DomainError("d must be 1, 2 or 3");
  std::string n = name;
  if (n == "Gamma" || n == "\xCE\x93" || n == "g") n = "G";
  Bloch b(d, 0.0);
  if (n == "G") return b;
  if (n == "X") {
    b[0] = 0.5;
    return b;
  }
  if (n == "-X" && d == 1) {
    b[0] = -0.5;
    return b;
  }
  if (n == "M" && d >= 2) {
    b[0] = b[1] = 0.5;
    return b;
  }
  if (n == "R" && d == 3) {
    b[0] = b[1] = b[2] = 0.5;
    return b;
  }
  throw DomainError("unknown high-symmetry point '" + name + "' for d = " + std::to_string(d));
}

std::vector<PathPoint> bz_path(int d, const std::vector<std::string>& names, int points_per_segment) {
  if (names.size() < 2) throw DomainError("a path needs at least two named points");
  if (points_per_segment < 2) throw DomainError("points_per_segment must be at least 2");
  std::vector<Bloch> ends;
  for (auto& n : names) ends.push_back(named_point(d, n));
  std::vector<PathPoint> path;
  double s = 0.0;
  for (std::size_t seg = 0; seg + 1 < ends.size(); ++seg) {
    const Bloch& a = ends[seg];
    const Bloch& b = ends[seg + 1];
    double len = 0.0;
    for (int i = 0; i < d; ++i) len += (b[i] - a[i]) * (b[i] - a[i]);
    len = std::sqrt(len);
    const int n = points_per_segment - 1;
    const bool last = seg + 2 == ends.size();
    for (int j = 0; j <= n; ++j) {
      if (j == n && !last) break;
      const double t = static_cast<double>(j) / n;
      PathPoint pp;
      pp.beta.resize(d);
      for (int i = 0; i < d; ++i) pp.beta[i] = a[i] + t * (b[i] - a[i]);
      pp.s = s + t * len;
      if (j == 0) pp.label = names[seg];
      if (j == n) pp.label = names[seg + 1];
      path.push_back(pp);
    }
    s += len;
  }
  return path;
}

// ------------------------------------------------------------------ sweeps

std::vector<cplx> default_guesses(const PoleEquation& h, const SweepOptions& opt) {
  const ModelParams& p = h.params();
  const double a0 = p.alpha0;
  std::vector<cplx> g;
  try {
    g.push_back(cplx(a0, -2.0 * pi * p.kappa * a0 * a0) - p.kappa * h.lattice_sum(cplx(a0, 0.0)));
  } catch (const SingularityError&) {
  }
  g.push_back(cplx(a0, -gamma0(p)));
  if (opt.photon_seeds) {
    for (double q : h.light_cone(a0 + opt.seed_window)) {
      if (std::abs(q - a0) > opt.seed_window || q < 1e-3) continue;
      for (double f : {1.0 - 1e-3, 1.0 + 1e-3, 1.0 - 1e-6}) g.push_back(cplx(q * f, 0.0));
      g.push_back(cplx(q, -gamma0(p)));
    }
  }
  return g;
}

namespace {

BandPoint solve_point(const PathPoint& pt, const ModelParams& p, const SweepOptions& opt,
                      const std::vector<Root>* previous) {
  BandPoint bp;
  bp.beta = pt.beta;
  bp.s = pt.s;
  try {
    PoleEquation h(pt.beta, p);
    bp.gap_marker = near_locus(h, p.alpha0);
    std::vector<cplx> g;
    if (previous)
      for (auto& r : *previous) g.push_back(r.alpha);
    for (cplx c : default_guesses(h, opt)) g.push_back(c);
    SolveReport rep = solve_band(h, g);
    bp.roots = std::move(rep.roots);
    bp.failures = std::move(rep.failures);
  } catch (const std::exception& e) {
    bp.failures.push_back(e.what());
  }
  return bp;
}

// minimal-distance matching between neighbouring points
void label_branches(BandStructure& bs) {
  int next = 0;
  const BandPoint* prev = nullptr;
  for (auto& pt : bs.points) {
    pt.branch.assign(pt.roots.size(), -1);
    if (prev) {
      std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < prev->roots.size(); ++i)
        for (std::size_t j = 0; j < pt.roots.size(); ++j)
          pairs.emplace_back(std::abs(prev->roots[i].alpha - pt.roots[j].alpha), i, j);
      std::sort(pairs.begin(), pairs.end());
      std::vector<bool> used_prev(prev->roots.size(), false);
      for (auto& [dist, i, j] : pairs) {
        if (used_prev[i] || pt.branch[j] >= 0 || dist > 0.05) continue;
        used_prev[i] = true;
        pt.branch[j] = prev->branch[i];
      }
    }
    for (auto& b : pt.branch)
      if (b < 0) b = next++;
    if (!pt.roots.empty() || !prev) prev = &pt;
  }
  bs.branches = next;
}

template <bool Parallel>
BandStructure sweep(const std::vector<PathPoint>& path, const ModelParams& p, const SweepOptions& opt) {
  p.validate();
  BandStructure bs;
  bs.params = p;
  const long n = static_cast<long>(path.size());
  bs.points.resize(n);
  const long k = std::max(1, opt.warm_start_every);
  // warm-start anchors, serial so each inherits the previous anchor's roots
  for (long i = 0; i < n; i += k)
    bs.points[i] = solve_point(path[i], p, opt, i > 0 ? &bs.points[i - k].roots : nullptr);
  const long blocks = (n + k - 1) / k;
  auto block = [&](long b) {
    for (long i = b * k + 1; i < std::min(n, (b + 1) * k); ++i)
      bs.points[i] = solve_point(path[i], p, opt, &bs.points[i - 1].roots);
  };
  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long b = 0; b < blocks; ++b) block(b);
  } else {
    for (long b = 0; b < blocks; ++b) block(b);
  }
  label_branches(bs);
  return bs;
}

}  // namespace

BandStructure band_sweep(const std::vector<PathPoint>& path, const ModelParams& p, const SweepOptions& opt) {
  return sweep<true>(path, p, opt);
}

BandStructure band_sweep_serial(const std::vector<PathPoint>& path, const ModelParams& p, const SweepOptions& opt) {
  return sweep<false>(path, p, opt);
}

// ------------------------------------------------------------------ decay scans

namespace {

DecayRow decay_row(const LatticeSum& ls, double a0) {
  DecayRow row{a0, 0.0, false};
  for (int tries = 0; tries < 4; ++tries) {
    try {
      const cplx s = ls(cplx(row.alpha0, 0.0));
      // Gamma / Gamma0 = 1 + Im S / (2 pi alpha0^2), independent of kappa
      row.ratio = std::max(0.0, 1.0 + s.imag() / (2.0 * pi * row.alpha0 * row.alpha0));
      return row;
    } catch (const SingularityError&) {
      row.alpha0 += 1e-6;
      row.flagged = true;
    }
  }
  throw SingularityError("decay scan: alpha0 = " + std::to_string(a0) + " stays singular after nudging");
}

template <bool Parallel>
std::vector<DecayRow> decay_scan(const Bloch& beta, const std::vector<double>& grid, const ModelParams& p) {
  p.ewald.validate();
  const LatticeSum ls(p.d, beta, p.ewald);
  std::vector<DecayRow> out(grid.size());
  const long n = static_cast<long>(grid.size());
  if constexpr (Parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < n; ++i) {
      try {
        out[i] = decay_row(ls, grid[i]);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (long i = 0; i < n; ++i) out[i] = decay_row(ls, grid[i]);
  }
  return out;
}

}  // namespace

std::vector<DecayRow> decay_vs_spacing(const Bloch& beta, const std::vector<double>& grid, const ModelParams& p) {
  return decay_scan<true>(beta, grid, p);
}

std::vector<DecayRow> decay_vs_spacing_serial(const Bloch& beta, const std::vector<double>& grid,
                                              const ModelParams& p) {
  return decay_scan<false>(beta, grid, p);
}

std::vector<double> bragg_resonances(const std::string& point, int m_max) {
  double c;
  if (point == "X")
    c = 1.0;
  else if (point == "M")
    c = std::sqrt(2.0);
  else if (point == "R")
    c = std::sqrt(3.0);
  else
    throw DomainError("bragg_resonances: unknown point '" + point + "'");
  std::vector<double> r;
  for (int m = 1; m <= m_max; ++m) r.push_back(0.5 * m * c);
  return r;
}

std::vector<double> locate_resonances(int d, const Bloch& beta, const std::vector<double>& grid,
                                      const EwaldConfig& cfg) {
  const LatticeSum ls(d, beta, cfg);
  auto re_s = [&](double& a) {
    for (int t = 0; t < 8; ++t) {
      try {
        return ls(cplx(a, 0.0)).real();
      } catch (const SingularityError&) {
        a += 1e-9;
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<double> poles;
  if (grid.size() < 2) return poles;
  double a = grid[0];
  double fa = re_s(a);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double b = grid[i];
    double fb = re_s(b);
    if (std::isfinite(fa) && std::isfinite(fb) && (fa > 0) != (fb > 0)) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = re_s(mid);
        if (!std::isfinite(fm)) break;
        if ((fm > 0) == (flo > 0))
          lo = mid, flo = fm;
        else
          hi = mid;
      }
      const double mid = 0.5 * (lo + hi);
      double probe = mid + 1e-10;
      const double mag = std::abs(re_s(probe));
      if (mag > 1e6) poles.push_back(mid);
    }
    a = b;
    fa = fb;
  }
  return poles;
}

}  // namespace lb
