#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <variant>

#include "latticebands/bands.hpp"
#include "latticebands/dynamics.hpp"
#include "latticebands/errors.hpp"
#include "latticebands/log.hpp"
#include "latticebands/runconfig.hpp"
#include "latticebands/selftest.hpp"

using namespace lb;
using nlohmann::json;

namespace {

enum Exit { ok = 0, config_error = 1, singular = 2, nonconvergence = 3, selftest_failure = 4 };

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::string> units;
  std::vector<std::vector<Cell>> rows;
};

struct Output {
  std::vector<Table> tables;
  json estimates = json::object();
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell_text(const Cell& c, bool plot) {
  if (auto d = std::get_if<double>(&c)) return num(*d);
  if (auto l = std::get_if<long>(&c)) return std::to_string(*l);
  std::string s = std::get<std::string>(c);
  if (plot) {
    for (auto& ch : s)
      if (ch == ' ' || ch == '\t') ch = '_';
    return s.empty() ? "-" : s;
  }
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return s;
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i], false);
    os << "\n";
  }
}

void write_plot(std::ostream& os, const Table& t) {
  os << "# " << t.name << "\n# columns:";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << " " << t.columns[i] << "[" << t.units[i] << "]";
  os << "\n";
  for (auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << cell_text(r[i], true);
    os << "\n";
  }
}

json table_json(const Table& t) {
  json rows = json::array();
  for (auto& r : t.rows) {
    json row = json::array();
    for (auto& c : r) std::visit([&](auto&& v) { row.push_back(v); }, c);
    rows.push_back(row);
  }
  return {{"columns", t.columns}, {"units", t.units}, {"rows", rows}};
}

std::string sibling(const std::string& path, const std::string& tag) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "_" + tag;
  return path.substr(0, dot) + "_" + tag + path.substr(dot);
}

void emit(const RunConfig& cfg, const Output& out) {
  auto open = [](const std::string& p) {
    auto f = std::make_unique<std::ofstream>(p);
    if (!*f) throw std::runtime_error("cannot write " + p);
    return f;
  };
  if (cfg.format == OutputFormat::Json) {
    json doc;
    doc["config"] = json::parse(serialize_config(cfg));
    doc["results"] = json::object();
    for (auto& t : out.tables) doc["results"][t.name] = table_json(t);
    doc["estimates"] = out.estimates;
    if (cfg.out.empty())
      std::cout << doc.dump(2) << "\n";
    else
      *open(cfg.out) << doc.dump(2) << "\n";
    return;
  }
  for (std::size_t i = 0; i < out.tables.size(); ++i) {
    const Table& t = out.tables[i];
    std::unique_ptr<std::ofstream> f;
    std::ostream* os = &std::cout;
    if (!cfg.out.empty()) {
      f = open(i == 0 ? cfg.out : sibling(cfg.out, t.name));
      os = f.get();
    }
    if (cfg.format == OutputFormat::Csv)
      write_csv(*os, t);
    else
      write_plot(*os, t);
  }
}

// ------------------------------------------------------------------ commands

int cmd_sum(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  const cplx a(cfg.sum.alpha[0], cfg.sum.alpha[1]);
  const Bloch& b = cfg.sum.beta;
  if (static_cast<int>(b.size()) != p.d) throw DomainError("sum.beta must have d components");
  Output out;
  Table t{"sum", {"term", "re", "im"}, {"-", "1", "1"}, {}};
  std::string term = "setup";
  try {
    LatticeSum ls(p.d, b, p.ewald);
    term = "S12 quadrature / S3 Ewald";
    const SumBreakdown bd = ls.breakdown(a);
    if (bd.split_available) {
      t.rows.push_back({std::string("S1"), bd.s1.real(), bd.s1.imag()});
      t.rows.push_back({std::string("S2"), bd.s2.real(), bd.s2.imag()});
    }
    t.rows.push_back({std::string("S1+S2"), bd.s12.real(), bd.s12.imag()});
    t.rows.push_back({std::string("S3r"), bd.s3r.real(), bd.s3r.imag()});
    t.rows.push_back({std::string("S3m"), bd.s3m.real(), bd.s3m.imag()});
    t.rows.push_back({std::string("total_ewald"), bd.total.real(), bd.total.imag()});
    out.estimates["quad_error"] = bd.quad_error;
    out.estimates["cutoff_error"] = bd.cutoff_error;
    if (p.d == 1) {
      term = "closed form";
      const cplx c = lattice_sum_1d(a, b[0]);
      t.rows.push_back({std::string("closed_form"), c.real(), c.imag()});
      out.estimates["closed_form_vs_ewald"] = std::abs(c - bd.total);
    }
  } catch (const SingularityError& e) {
    throw SingularityError(term + ": " + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(term + ": " + e.what());
  }
  out.tables.push_back(std::move(t));
  emit(cfg, out);
  return ok;
}

std::vector<std::string> beta_columns(int d, std::vector<std::string>& units) {
  std::vector<std::string> c;
  const char* names[3] = {"beta_x", "beta_y", "beta_z"};
  for (int i = 0; i < d; ++i) {
    c.push_back(names[i]);
    units.push_back("2pi/a");
  }
  return c;
}

int cmd_bands(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  const auto path = bz_path(p.d, cfg.bands.path, cfg.bands.points_per_segment);
  SweepOptions so;
  so.warm_start_every = cfg.bands.warm_start_every;
  so.seed_window = cfg.bands.seed_window;
  const BandStructure bs = band_sweep(path, p, so);
  Table t{"bands", {"point", "s"}, {"-", "2pi/a"}, {}};
  for (auto& c : beta_columns(p.d, t.units)) t.columns.push_back(c);
  for (auto c : {"branch", "re_alpha", "im_alpha", "residual", "gap_marker"}) t.columns.push_back(c);
  for (auto u : {"-", "a/lambda", "a/lambda", "1", "-"}) t.units.push_back(u);
  long converged = 0;
  for (std::size_t i = 0; i < bs.points.size(); ++i) {
    const BandPoint& pt = bs.points[i];
    if (!pt.roots.empty()) ++converged;
    for (auto& f : pt.failures) log::info("point " + std::to_string(i) + ": " + f);
    for (std::size_t j = 0; j < pt.roots.size(); ++j) {
      std::vector<Cell> row{static_cast<long>(i), pt.s};
      for (double x : pt.beta) row.push_back(x);
      row.push_back(static_cast<long>(pt.branch[j]));
      row.push_back(pt.roots[j].alpha.real());
      row.push_back(pt.roots[j].alpha.imag());
      row.push_back(pt.roots[j].residual);
      row.push_back(static_cast<long>(pt.gap_marker));
      t.rows.push_back(std::move(row));
    }
  }
  Output out;
  out.tables.push_back(std::move(t));
  const double frac = bs.points.empty() ? 0.0 : static_cast<double>(converged) / bs.points.size();
  out.estimates["converged_fraction"] = frac;
  out.estimates["branches"] = bs.branches;
  emit(cfg, out);
  if (frac < 0.95) {
    log::error("only " + num(100.0 * frac) + "% of path points converged");
    return nonconvergence;
  }
  return ok;
}

int cmd_decay(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  const DecaySection& s = cfg.decay;
  if (!(s.alpha0_step > 0.0) || !(s.alpha0_max >= s.alpha0_min) || !(s.alpha0_min > 0.0))
    throw DomainError("decay grid needs 0 < alpha0_min <= alpha0_max and step > 0");
  std::vector<double> grid;
  const long n = static_cast<long>(std::floor((s.alpha0_max - s.alpha0_min) / s.alpha0_step + 1e-9)) + 1;
  for (long i = 0; i < n; ++i) grid.push_back(s.alpha0_min + i * s.alpha0_step);

  std::vector<std::pair<std::string, Bloch>> targets;
  for (auto& name : s.points) targets.emplace_back(name, named_point(p.d, name));
  for (auto& b : s.betas) {
    if (static_cast<int>(b.size()) != p.d) throw DomainError("decay.betas entries must have d components");
    std::ostringstream os;
    for (std::size_t i = 0; i < b.size(); ++i) os << (i ? ";" : "") << num(b[i]);
    targets.emplace_back(os.str(), b);
  }
  Output out;
  Table t{"decay", {"point", "alpha0", "gamma_ratio", "nudged"}, {"-", "a/lambda0", "Gamma/Gamma0", "-"}, {}};
  Table markers{"bragg", {"point", "m", "alpha0"}, {"-", "-", "a/lambda0"}, {}};
  Table poles{"resonances", {"point", "alpha0"}, {"-", "a/lambda0"}, {}};
  for (auto& [name, beta] : targets) {
    for (auto& r : decay_vs_spacing(beta, grid, p)) {
      if (r.flagged) log::info("decay: alpha0 nudged to " + num(r.alpha0) + " at " + name);
      t.rows.push_back({name, r.alpha0, r.ratio, static_cast<long>(r.flagged)});
    }
    if (p.d == 3 && (name == "X" || name == "M" || name == "R")) {
      const auto br = bragg_resonances(name, 3);
      for (std::size_t m = 0; m < br.size(); ++m) markers.rows.push_back({name, static_cast<long>(m + 1), br[m]});
      for (double a : locate_resonances(3, beta, grid, p.ewald)) poles.rows.push_back({name, a});
    }
  }
  out.tables.push_back(std::move(t));
  if (p.d == 3) {
    out.tables.push_back(std::move(markers));
    out.tables.push_back(std::move(poles));
  }
  emit(cfg, out);
  return ok;
}

int cmd_dynamics(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  DynamicsOptions o;
  o.grid_n = cfg.dynamics.grid_n;
  o.window = cfg.dynamics.window;
  o.full_solver = cfg.dynamics.full_solver;
  TimeGrid tg;
  tg.taus = cfg.dynamics.taus;
  tg.normalization = cfg.dynamics.gamma0_units ? TimeGrid::Norm::Gamma0Tau : TimeGrid::Norm::RawTau;
  const DynamicsResult res = evolve_wavepacket(p, o, tg);
  if (res.aliasing_warning) log::warn("aliasing: tau = 0 reconstruction error " + num(res.recon_error));
  const double g0 = gamma0(p);

  std::vector<double> pick = cfg.dynamics.profile_taus;
  if (pick.empty())
    for (auto& f : res.frames) pick.push_back(f.tau);
  else if (cfg.dynamics.gamma0_units)
    for (auto& t : pick) t /= g0;

  Table sites{"frames", {"tau", "gamma0_tau"}, {"a/c", "1"}, {}};
  const char* nn[3] = {"n_x", "n_y", "n_z"};
  for (int i = 0; i < p.d; ++i) {
    sites.columns.push_back(nn[i]);
    sites.units.push_back("site");
  }
  for (auto c : {"re_psi", "im_psi", "prob"}) {
    sites.columns.push_back(c);
    sites.units.push_back("1");
  }
  for (auto& pr : spatial_profile(res.frames, pick)) {
    const auto& f = *std::find_if(res.frames.begin(), res.frames.end(), [&](auto& x) { return x.tau == pr.tau; });
    for (std::size_t i = 0; i < pr.rows.size(); ++i) {
      std::vector<Cell> row{pr.tau, pr.tau * g0};
      for (int x : pr.rows[i].n) row.push_back(static_cast<long>(x));
      row.push_back(f.amp[i].real());
      row.push_back(f.amp[i].imag());
      row.push_back(pr.rows[i].prob);
      sites.rows.push_back(std::move(row));
    }
  }
  Table norm{"norm", {"tau", "gamma0_tau", "norm", "p0"}, {"a/c", "1", "1", "1"}, {}};
  for (auto& f : res.frames)
    norm.rows.push_back({f.tau, f.tau * g0, frame_norm(f), std::norm(f.at(std::vector<int>(p.d, 0)))});
  Output out;
  out.tables.push_back(std::move(sites));
  out.tables.push_back(std::move(norm));
  out.estimates["quad_error"] = res.quad_error;
  out.estimates["recon_error"] = res.recon_error;
  out.estimates["aliasing_warning"] = res.aliasing_warning;
  emit(cfg, out);
  return ok;
}

int cmd_selftest(const RunConfig& cfg, double inject) {
  SelftestOptions o;
  o.quick = cfg.quick;
  o.inject_eta_error = inject;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = run_selftest(o);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool all = true;
  std::printf("%-28s %-6s %-12s %-10s %s\n", "suite", "result", "worst", "tolerance", "seconds");
  for (auto& r : res) {
    std::printf("%-28s %-6s %-12.3e %-10.1e %.2f\n", r.name.c_str(), r.passed ? "pass" : "FAIL", r.worst,
                r.tolerance, r.seconds);
    if (!r.detail.empty()) std::printf("    %s\n", r.detail.c_str());
    all = all && r.passed;
  }
  std::printf("wall time %.2f s\n", wall);
  if (!all) {
    for (auto& r : res)
      if (!r.passed) std::fprintf(stderr, "selftest: invariant '%s' failed\n", r.name.c_str());
    return selftest_failure;
  }
  return ok;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  log::init();
  CLI::App app{"latticebands: lattice sums, band structures and dynamics of atomic lattices"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path, path, out_path, format;
  int d = 0, grid = 0, workers = -1;
  double alpha0 = 0, kappa = 0, eta = 0, inject = 0;
  std::vector<double> alpha, beta;
  bool quick = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--d", d, "lattice dimension")->check(CLI::IsMember({1, 2, 3}));
  app.add_option("--alpha0", alpha0, "atomic resonance a/lambda0");
  app.add_option("--kappa", kappa, "coupling");
  app.add_option("--eta", eta, "Ewald splitting parameter");
  app.add_option("--path", path, "comma-separated high-symmetry points: band path, or decay scan points");
  app.add_option("--grid", grid, "momentum grid per axis (dynamics) or points per path segment (bands)");
  app.add_option("--out", out_path, "output file (stdout when absent)");
  app.add_option("--format", format, "csv, json or plotdata")->check(CLI::IsMember({"csv", "json", "plotdata"}));
  app.add_option("--workers", workers, "OpenMP threads (0 = all cores)");
  app.add_flag("--quick", quick, "reduced self-test grid");
  app.add_option("--alpha", alpha, "complex alpha as 're im' (sum)")->expected(2);
  app.add_option("--beta", beta, "Bloch momentum components (sum)")->expected(1, 3);
  app.add_option("--inject-eta-error", inject, "self-test harness check")->group("");

  std::map<std::string, CLI::App*> subs;
  for (auto name : {"sum", "bands", "decay", "dynamics", "selftest"}) subs[name] = app.add_subcommand(name);
  subs["sum"]->description("lattice sum with its Ewald breakdown");
  subs["bands"]->description("complex band structure along a Brillouin-zone path");
  subs["decay"]->description("collective decay rate against lattice spacing");
  subs["dynamics"]->description("single-excitation wavepacket dynamics");
  subs["selftest"]->description("oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : config_error;
  }

  if (config_path.empty() && app.get_subcommands().empty()) {
    std::fprintf(stderr, "config error: a subcommand or --config is required\n");
    return config_error;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read " + config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      cfg = parse_config(ss.str());
    }
    for (auto& [name, sc] : subs)
      if (sc->parsed()) cfg.command = parse_command(name);
    if (d) {
      if (d != cfg.params.d && app.count("--path") == 0) {
        cfg.bands.path = d == 1 ? std::vector<std::string>{"-X", "G", "X"}
                                : std::vector<std::string>{"G", "X", "M", "G"};
        if (d == 3) cfg.bands.path.push_back("R");
      }
      if (d != cfg.params.d && app.count("--beta") == 0) cfg.sum.beta.assign(d, cfg.sum.beta.empty() ? 0.2 : cfg.sum.beta[0]);
      cfg.params.d = d;
    }
    if (app.count("--alpha0")) cfg.params.alpha0 = alpha0;
    if (app.count("--kappa")) cfg.params.kappa = kappa;
    if (app.count("--eta")) cfg.params.ewald.eta = eta;
    if (!path.empty()) {
      cfg.bands.path = split_names(path);
      cfg.decay.points = cfg.bands.path;
    }
    if (grid) {
      cfg.dynamics.grid_n = grid;
      cfg.dynamics.window = std::min(cfg.dynamics.window, grid / 2);
      cfg.bands.points_per_segment = grid;
    }
    if (app.count("--out")) cfg.out = out_path;
    if (!format.empty()) cfg.format = parse_format(format);
    if (workers >= 0) cfg.workers = workers;
    if (quick) cfg.quick = true;
    if (alpha.size() == 2) cfg.sum.alpha = {alpha[0], alpha[1]};
    if (!beta.empty()) cfg.sum.beta = beta;
    cfg.params.validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return config_error;
  }
  if (cfg.workers > 0) omp_set_num_threads(cfg.workers);

  try {
    switch (cfg.command) {
      case Command::Sum: return cmd_sum(cfg);
      case Command::Bands: return cmd_bands(cfg);
      case Command::Decay: return cmd_decay(cfg);
      case Command::Dynamics: return cmd_dynamics(cfg);
      case Command::Selftest: return cmd_selftest(cfg, inject);
    }
  } catch (const SingularityError& e) {
    std::fprintf(stderr, "singularity: %s\n", e.what());
    return singular;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "no convergence: %s\n", e.what());
    return nonconvergence;
  } catch (const OverflowError& e) {
    std::fprintf(stderr, "overflow: %s\n", e.what());
    return nonconvergence;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return config_error;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return config_error;
  }
  return ok;
}
