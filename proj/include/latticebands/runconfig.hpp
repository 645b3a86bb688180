#pragma once

#include <array>
#include <string>
#include <vector>

#include "latticebands/bands.hpp"
#include "latticebands/dynamics.hpp"

namespace lb {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Command { Sum, Bands, Decay, Dynamics, Selftest };
enum class OutputFormat { Csv, Json, Plotdata };

struct SumSection {
  std::array<double, 2> alpha{0.3, 0.05};
  Bloch beta{0.2};
};

struct BandsSection {
  std::vector<std::string> path{"-X", "G", "X"};
  int points_per_segment = 41;
  int warm_start_every = 8;
  double seed_window = 0.5;
};

struct DecaySection {
  std::vector<std::string> points{"G"};
  std::vector<Bloch> betas;  // explicit momenta, used in addition to named points
  double alpha0_min = 0.05;
  double alpha0_max = 2.0;
  double alpha0_step = 0.005;
};

struct DynamicsSection {
  int grid_n = 256;
  int window = 32;
  std::vector<double> taus{0, 0.5, 1, 2, 3, 4, 5};
  bool gamma0_units = true;
  bool full_solver = false;
  std::vector<double> profile_taus;
};

struct RunConfig {
  Command command = Command::Selftest;
  ModelParams params;
  SumSection sum;
  BandsSection bands;
  DecaySection decay;
  DynamicsSection dynamics;
  bool quick = false;
  int workers = 0;  // 0 = machine parallelism
  std::string out;  // empty = stdout
  OutputFormat format = OutputFormat::Csv;
};

// throws ConfigError with a diagnostic
RunConfig parse_config(const std::string& text);
// canonical JSON text, every field present
std::string serialize_config(const RunConfig& cfg);

std::string to_string(Command c);
std::string to_string(OutputFormat f);
Command parse_command(const std::string& s);
OutputFormat parse_format(const std::string& s);

}  // namespace lb
