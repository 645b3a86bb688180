#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"
#include "latticebands/runconfig.hpp"

using namespace lb;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int rc;
  std::string out, err;
};

fs::path scratch() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("lb_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path errf = scratch() / "stderr.txt";
  const std::string cmd = env + std::string(LATTICEBANDS_CLI) + " " + args + " 2> " + errf.string();
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = ::pclose(p);
  return {WEXITSTATUS(status), out, slurp(errf)};
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

std::map<std::string, std::complex<double>> sum_terms(const std::string& out) {
  std::map<std::string, std::complex<double>> m;
  auto rows = csv(out);
  for (std::size_t i = 1; i < rows.size(); ++i) m[rows[i][0]] = {std::stod(rows[i][1]), std::stod(rows[i][2])};
  return m;
}

}  // namespace

TEST_CASE("sum: closed form and Ewald agree in 1D") {
  const Run r = run("sum --d 1 --alpha 0.3 0.05 --beta 0.2 --format csv");
  REQUIRE(r.rc == 0);
  const auto t = sum_terms(r.out);
  REQUIRE(t.count("closed_form"));
  REQUIRE(t.count("total_ewald"));
  CHECK(std::abs(t.at("closed_form") - t.at("total_ewald")) < 1e-9);
  for (auto k : {"S1", "S2", "S3r", "S3m"}) CHECK(t.count(k));
}

TEST_CASE("sum: eta independence in 2D") {
  const Run a = run("sum --d 2 --eta 0.45 --format csv");
  const Run b = run("sum --d 2 --eta 0.8 --format csv");
  REQUIRE(a.rc == 0);
  REQUIRE(b.rc == 0);
  const auto x = sum_terms(a.out).at("total_ewald"), y = sum_terms(b.out).at("total_ewald");
  CHECK(std::abs(x - y) < 1e-9 * std::abs(x));
}

TEST_CASE("numbers carry 17 significant digits") {
  const Run r = run("sum --d 1 --format csv");
  REQUIRE(r.rc == 0);
  CHECK(r.out.find("0.0066666666666666654") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run("sum --d 1 --alpha 0.3 0 --beta 0.3").rc == 2);
  CHECK(run("sum --d 1 --alpha 0.3 0 --beta 0.3").err.find("S") != std::string::npos);
  const auto bad = write("bad.json", "{bad");
  const Run r = run("--config " + bad.string() + " sum");
  CHECK(r.rc == 1);
  CHECK(r.err.find("parse error") != std::string::npos);
  CHECK(run("--config " + write("unknown.json", R"({"command":"sum","colour":1})").string()).rc == 1);
  CHECK(run("sum --alpha0 -1").rc == 1);
  CHECK(run("").rc == 1);
  CHECK(run("--config /nonexistent/file.json").rc == 1);
  const Run st = run("selftest --quick --inject-eta-error 1e-3");
  CHECK(st.rc == 4);
  CHECK(st.err.find("eta_invariance") != std::string::npos);
}

TEST_CASE("selftest quick passes") {
  const Run r = run("selftest --quick");
  CHECK(r.rc == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("json: config echo, results and estimates") {
  const Run r = run("sum --d 2 --format json");
  REQUIRE(r.rc == 0);
  const json j = json::parse(r.out);
  CHECK(j.contains("config"));
  CHECK(j.contains("results"));
  CHECK(j.contains("estimates"));
  CHECK(j["config"]["command"] == "sum");
  CHECK(j["config"]["params"]["d"] == 2);
}

TEST_CASE("a run is reproducible from its echoed config") {
  const Run a = run("sum --d 3 --alpha0 0.45 --format json");
  REQUIRE(a.rc == 0);
  const auto cfg = write("echo.json", json::parse(a.out)["config"].dump());
  const Run b = run("--config " + cfg.string());
  CHECK(b.rc == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("flags override the config file") {
  const auto cfg = write("base.json", R"({"command":"sum","params":{"d":2,"alpha0":0.3}})");
  const Run r = run("--config " + cfg.string() + " --d 1 --format json");
  REQUIRE(r.rc == 0);
  CHECK(json::parse(r.out)["config"]["params"]["d"] == 1);
}

TEST_CASE("config round trip") {
  const std::string text = serialize_config(RunConfig{});
  CHECK(serialize_config(parse_config(text)) == text);
  for_all(100, 601, [](gen::Rng& r) {
    RunConfig c;
    c.command = static_cast<Command>(static_cast<int>(gen::uniform(r, 0, 4.999)));
    c.format = static_cast<OutputFormat>(static_cast<int>(gen::uniform(r, 0, 2.999)));
    c.params.d = 1 + static_cast<int>(gen::uniform(r, 0, 2.999));
    c.params.alpha0 = gen::uniform(r, 0.01, 3.0);
    c.params.kappa = gen::uniform(r, 0.0, 0.1);
    c.params.ewald.eta = gen::uniform(r, 0.3, 1.0);
    c.sum.alpha = {gen::uniform(r, 0.0, 2.0), gen::uniform(r, -0.5, 0.5)};
    c.sum.beta = gen::bloch(r, c.params.d, 0.0);
    c.bands.points_per_segment = 2 + static_cast<int>(gen::uniform(r, 0, 100));
    c.decay.alpha0_step = gen::uniform(r, 1e-4, 0.1);
    c.decay.betas = {gen::bloch(r, c.params.d, 0.0)};
    c.dynamics.grid_n = 2 * (1 + static_cast<int>(gen::uniform(r, 0, 100)));
    c.dynamics.taus = {0.0, gen::uniform(r, 0.1, 10.0)};
    c.quick = gen::uniform(r, 0, 1) < 0.5;
    c.workers = static_cast<int>(gen::uniform(r, 0, 16));
    c.out = gen::uniform(r, 0, 1) < 0.5 ? "" : "x.csv";
    const std::string s = serialize_config(c);
    const std::string s2 = serialize_config(parse_config(s));
    CHECK(s == s2);
    CHECK(json::parse(s) == json::parse(s2));
  });
  CHECK_THROWS_AS(parse_config("[]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"params":{"d":"two"}})"), ConfigError);
}

TEST_CASE("bands: 1D determinism, worker independence, two branches") {
  const Run a = run("bands --d 1 --grid 21 --format csv --workers 1");
  const Run b = run("bands --d 1 --grid 21 --format csv --workers 4");
  const Run c = run("bands --d 1 --grid 21 --format csv --workers 4");
  REQUIRE(a.rc == 0);
  CHECK(a.out == b.out);
  CHECK(b.out == c.out);
  const auto rows = csv(a.out);
  const auto& head = rows[0];
  const auto col = [&](const std::string& n) {
    return static_cast<std::size_t>(std::find(head.begin(), head.end(), n) - head.begin());
  };
  REQUIRE(col("branch") < head.size());
  REQUIRE(col("re_alpha") < head.size());
  std::set<std::string> branches;
  for (std::size_t i = 1; i < rows.size(); ++i) branches.insert(rows[i][col("branch")]);
  CHECK(branches.size() >= 2);
}

TEST_CASE("bands: small 3D sweep is real") {
  const Run r = run("bands --d 3 --grid 3 --format plotdata");
  REQUIRE(r.rc == 0);
  std::istringstream is(r.out);
  std::string line, cols;
  double worst = 0.0;
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.rfind("# columns:", 0) == 0) cols = line;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    REQUIRE(v.size() == 10u);
    worst = std::max(worst, std::abs(v[7]));
    ++rows;
  }
  CHECK(cols.find("im_alpha") != std::string::npos);
  CHECK(rows > 9);
  CHECK(worst < 1e-6);
}

TEST_CASE("decay: 1D onset and 2D dark X point") {
  const auto cfg = write("d1.json", R"({"command":"decay","params":{"d":1},
    "decay":{"points":[],"betas":[[0.25]],"alpha0_min":0.05,"alpha0_max":0.6,"alpha0_step":0.005}})");
  const Run r = run("--config " + cfg.string() + " --format csv", "LATTICEBANDS_LOG=info ");
  REQUIRE(r.rc == 0);
  const auto rows = csv(r.out);
  double onset = -1;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (onset < 0 && std::stod(rows[i][2]) > 1e-8) onset = std::stod(rows[i][1]);
  CHECK(std::abs(onset - 0.25) <= 0.005);
  CHECK(r.err.find("nudg") != std::string::npos);

  const Run x = run("decay --d 2 --path X --format csv");
  REQUIRE(x.rc == 0);
  const auto xr = csv(x.out);
  for (std::size_t i = 1; i < xr.size(); ++i)
    if (std::stod(xr[i][1]) < 0.5) CHECK(std::stod(xr[i][2]) < 1e-8);
}

TEST_CASE("decay: 3D markers") {
  const fs::path out = scratch() / "d3.csv";
  const Run r = run("decay --d 3 --path X --out " + out.string());
  REQUIRE(r.rc == 0);
  CHECK(fs::exists(out));
  CHECK(fs::exists(scratch() / "d3_bragg.csv"));
  CHECK(fs::exists(scratch() / "d3_resonances.csv"));
  CHECK(slurp(scratch() / "d3_bragg.csv").find("0.5") != std::string::npos);
}

TEST_CASE("dynamics: frames and norm summary") {
  const fs::path out = scratch() / "dyn.csv";
  const Run r = run("dynamics --d 3 --grid 8 --out " + out.string());
  REQUIRE(r.rc == 0);
  const auto norm = csv(slurp(scratch() / "dyn_norm.csv"));
  REQUIRE(norm.size() > 2);
  CHECK(norm[0][2] == "norm");
  CHECK(std::stod(norm[1][2]) == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t i = 1; i < norm.size(); ++i) CHECK(std::abs(std::stod(norm[i][2]) - 1.0) < 1e-3);
  CHECK(slurp(out).rfind("tau,gamma0_tau,n_x,n_y,n_z", 0) == 0);
}

TEST_CASE("plotdata headers carry units") {
  const Run r = run("decay --d 2 --format plotdata");
  REQUIRE(r.rc == 0);
  CHECK(r.out.rfind("#", 0) == 0);
  CHECK(r.out.find("alpha0[a/lambda0]") != std::string::npos);
}
