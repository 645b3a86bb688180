#include "latticebands/runconfig.hpp"

#include <json.hpp>

namespace lb {

using nlohmann::json;

namespace {

template <class T>
void take(const json& j, const char* key, T& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

std::string scheme_name(QuadScheme s) { return s == QuadScheme::TanhSinh ? "tanh-sinh" : "gauss-kronrod"; }

QuadScheme parse_scheme(const std::string& s) {
  if (s == "tanh-sinh") return QuadScheme::TanhSinh;
  if (s == "gauss-kronrod") return QuadScheme::AdaptiveGK;
  throw ConfigError("unknown quad_scheme '" + s + "'");
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Sum: return "sum";
    case Command::Bands: return "bands";
    case Command::Decay: return "decay";
    case Command::Dynamics: return "dynamics";
    case Command::Selftest: return "selftest";
  }
  return "";
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Plotdata: return "plotdata";
  }
  return "";
}

Command parse_command(const std::string& s) {
  for (Command c : {Command::Sum, Command::Bands, Command::Decay, Command::Dynamics, Command::Selftest})
    if (to_string(c) == s) return c;
  throw ConfigError("unknown command '" + s + "'");
}

OutputFormat parse_format(const std::string& s) {
  for (OutputFormat f : {OutputFormat::Csv, OutputFormat::Json, OutputFormat::Plotdata})
    if (to_string(f) == s) return f;
  throw ConfigError("unknown output format '" + s + "'");
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  RunConfig c;
  try {
    check_keys(j, "config", {"command", "params", "sum", "bands", "decay", "dynamics", "quick", "workers", "output"});
    if (j.contains("command")) c.command = parse_command(j.at("command").get<std::string>());
    if (j.contains("params")) {
      const json& p = j.at("params");
      check_keys(p, "params", {"alpha0", "kappa", "d", "ewald"});
      take(p, "alpha0", c.params.alpha0);
      take(p, "kappa", c.params.kappa);
      take(p, "d", c.params.d);
      if (p.contains("ewald")) {
        const json& e = p.at("ewald");
        check_keys(e, "params.ewald",
                   {"eta", "real_cutoff", "recip_cutoff", "quad_points", "quad_scheme", "cross_check_1d"});
        take(e, "eta", c.params.ewald.eta);
        take(e, "real_cutoff", c.params.ewald.real_cutoff);
        take(e, "recip_cutoff", c.params.ewald.recip_cutoff);
        take(e, "quad_points", c.params.ewald.quad_points);
        if (e.contains("quad_scheme")) c.params.ewald.quad_scheme = parse_scheme(e.at("quad_scheme"));
        take(e, "cross_check_1d", c.params.ewald.cross_check_1d);
      }
    }
    if (j.contains("sum")) {
      const json& s = j.at("sum");
      check_keys(s, "sum", {"alpha", "beta"});
      take(s, "alpha", c.sum.alpha);
      take(s, "beta", c.sum.beta);
    }
    if (j.contains("bands")) {
      const json& b = j.at("bands");
      check_keys(b, "bands", {"path", "points_per_segment", "warm_start_every", "seed_window"});
      take(b, "path", c.bands.path);
      take(b, "points_per_segment", c.bands.points_per_segment);
      take(b, "warm_start_every", c.bands.warm_start_every);
      take(b, "seed_window", c.bands.seed_window);
    }
    if (j.contains("decay")) {
      const json& d = j.at("decay");
      check_keys(d, "decay", {"points", "betas", "alpha0_min", "alpha0_max", "alpha0_step"});
      take(d, "points", c.decay.points);
      take(d, "betas", c.decay.betas);
      take(d, "alpha0_min", c.decay.alpha0_min);
      take(d, "alpha0_max", c.decay.alpha0_max);
      take(d, "alpha0_step", c.decay.alpha0_step);
    }
    if (j.contains("dynamics")) {
      const json& d = j.at("dynamics");
      check_keys(d, "dynamics", {"grid_n", "window", "taus", "normalization", "full_solver", "profile_taus"});
      take(d, "grid_n", c.dynamics.grid_n);
      take(d, "window", c.dynamics.window);
      take(d, "taus", c.dynamics.taus);
      if (d.contains("normalization")) {
        const std::string n = d.at("normalization");
        if (n != "gamma0" && n != "raw") throw ConfigError("dynamics.normalization must be 'gamma0' or 'raw'");
        c.dynamics.gamma0_units = n == "gamma0";
      }
      take(d, "full_solver", c.dynamics.full_solver);
      take(d, "profile_taus", c.dynamics.profile_taus);
    }
    take(j, "quick", c.quick);
    take(j, "workers", c.workers);
    if (j.contains("output")) {
      const json& o = j.at("output");
      check_keys(o, "output", {"path", "format"});
      take(o, "path", c.out);
      if (o.contains("format")) c.format = parse_format(o.at("format"));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value: ") + e.what());
  }
  return c;
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  const auto& e = c.params.ewald;
  j["params"] = {{"alpha0", c.params.alpha0},
                 {"kappa", c.params.kappa},
                 {"d", c.params.d},
                 {"ewald",
                  {{"eta", e.eta},
                   {"real_cutoff", e.real_cutoff},
                   {"recip_cutoff", e.recip_cutoff},
                   {"quad_points", e.quad_points},
                   {"quad_scheme", scheme_name(e.quad_scheme)},
                   {"cross_check_1d", e.cross_check_1d}}}};
  j["sum"] = {{"alpha", c.sum.alpha}, {"beta", c.sum.beta}};
  j["bands"] = {{"path", c.bands.path},
                {"points_per_segment", c.bands.points_per_segment},
                {"warm_start_every", c.bands.warm_start_every},
                {"seed_window", c.bands.seed_window}};
  j["decay"] = {{"points", c.decay.points},
                {"betas", c.decay.betas},
                {"alpha0_min", c.decay.alpha0_min},
                {"alpha0_max", c.decay.alpha0_max},
                {"alpha0_step", c.decay.alpha0_step}};
  j["dynamics"] = {{"grid_n", c.dynamics.grid_n},
                   {"window", c.dynamics.window},
                   {"taus", c.dynamics.taus},
                   {"normalization", c.dynamics.gamma0_units ? "gamma0" : "raw"},
                   {"full_solver", c.dynamics.full_solver},
                   {"profile_taus", c.dynamics.profile_taus}};
  j["quick"] = c.quick;
  j["workers"] = c.workers;
  j["output"] = {{"path", c.out}, {"format", to_string(c.format)}};
  return j.dump(2);
}

}  // namespace lb
