#include "doctest.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "biphoton/cli.hpp"
#include "json.hpp"

using namespace biphoton;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("biphoton_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("tomo reports the metrics") {
  const auto start = std::chrono::steady_clock::now();
  const auto r = run({"tomo", "--p", "0.517", "--visibility", "0.701"});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  CHECK(std::abs(j["purity"].get<double>() - 0.746) <= 1e-3);
  CHECK(std::abs(j["fidelity"].get<double>() - 0.851) <= 1e-3);
  CHECK(std::abs(j["concurrence"].get<double>() - 0.701) <= 1e-3);
  CHECK(j["matrix_real"].size() == 4);
  CHECK(j["matrix_imag"][1][2].get<double>() == 0.0);
  CHECK(seconds < 1.0);
  const auto u = run({"tomo", "--p", "0.517", "--visibility", "0.701", "--sigma-p", "0.005", "--sigma-visibility",
                      "0.011"});
  CHECK(json::parse(u.out)["uncertainty"]["concurrence"].get<double>() == doctest::Approx(0.011));
}

TEST_CASE("closed-form interferogram shape") {
  const auto r = run({"hom", "--closed-form"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "tau_ps,p_coincidence");
  double min_v = 1.0, max_v = 0.0, at_zero = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double t = std::stod(line.substr(0, comma));
    const double v = std::stod(line.substr(comma + 1));
    if (std::abs(t) < 1e-9) at_zero = v;
    min_v = std::min(min_v, v);
    max_v = std::max(max_v, v);
    ++rows;
  }
  CHECK(rows == 601);
  CHECK(at_zero == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(min_v >= 0.0);
  CHECK(max_v > 0.9);
}

TEST_CASE("outputs are deterministic") {
  const std::vector<std::string> quad = {"hom", "--tau-min-ps", "-5", "--tau-max-ps", "5", "--step-ps", "0.5"};
  CHECK(run(quad).out == run(quad).out);
  const std::vector<std::string> noisy = {"hom", "--closed-form", "--poisson-counts", "1000", "--seed", "42"};
  const auto a = run(noisy);
  CHECK(a.code == kExitOk);
  CHECK(a.out == run(noisy).out);
  auto other = noisy;
  other.back() = "43";
  CHECK(a.out != run(other).out);
}

TEST_CASE("hom output feeds fit unchanged") {
  const auto csv = scratch_dir() / "hom.csv";
  REQUIRE(run({"-o", csv.string(), "hom", "--closed-form"}).code == kExitOk);
  const auto r = run({"fit", csv.string()});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j["params"]["V"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(j["delta_tau_ps"].get<double>() == doctest::Approx(10.5).epsilon(0.01));
  CHECK(j["converged"].get<bool>());

  const auto counts = scratch_dir() / "counts.csv";
  REQUIRE(run({"-o", counts.string(), "hom", "--closed-form", "--poisson-counts", "1000", "--seed", "3"}).code ==
          kExitOk);
  const auto c = json::parse(run({"fit", counts.string(), "--count-scale", "1000"}).out);
  CHECK(c["params"]["V"].get<double>() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(c["count_scale"].get<double>() == 1000.0);
}

TEST_CASE("cavity scan without reflection equals the ideal quadrature") {
  const std::vector<std::string> range = {"--tau-min-ps", "-3", "--tau-max-ps", "3", "--step-ps", "0.25"};
  std::vector<std::string> hom = {"hom"};
  std::vector<std::string> fp = {"hom-fp", "--reflectivity", "0"};
  hom.insert(hom.end(), range.begin(), range.end());
  fp.insert(fp.end(), range.begin(), range.end());
  const auto a = run(hom);
  const auto b = run(fp);
  REQUIRE(a.code == kExitOk);
  REQUIRE(b.code == kExitOk);
  CHECK(a.out == b.out);
}

TEST_CASE("JSI grid, marginals and ingestion") {
  const auto grid = scratch_dir() / "jsi.csv";
  REQUIRE(run({"-o", grid.string(), "jsi"}).code == kExitOk);
  const std::string text = slurp(grid);
  CHECK(text.rfind("lambda_s_nm\\lambda_i_nm,", 0) == 0);
  const auto ingest = run({"jsi", "--ingest", grid.string()});
  REQUIRE(ingest.code == kExitOk);
  CHECK(json::parse(ingest.out)["p"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));

  const auto prefix = scratch_dir() / "marg";
  REQUIRE(run({"-o", prefix.string(), "jsi", "--marginals"}).code == kExitOk);
  const std::string sig = slurp(scratch_dir() / "marg_signal.csv");
  CHECK(sig.rfind("lambda_nm,intensity\n", 0) == 0);
  CHECK(fs::exists(scratch_dir() / "marg_idler.csv"));
  CHECK(run({"jsi", "--marginals"}).code == kExitConfig);
}

TEST_CASE("tunability table") {
  const auto r = run({"tunability", "--points", "5"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("theta_deg,lambda_s_HV_nm,lambda_i_HV_nm,lambda_s_VH_nm,lambda_i_VH_nm\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);
}

TEST_CASE("exit codes and error reports") {
  const auto bad_cfg = scratch_dir() / "bad.cfg";
  {
    std::ofstream f(bad_cfg);
    f << "[pump]\nlambda_p_nm = 773.15\ncolour = blue\n";
  }
  const auto c = run({"-c", bad_cfg.string(), "tomo", "--p", "0.5", "--visibility", "1"});
  CHECK(c.code == kExitConfig);
  const auto e = json::parse(c.err);
  CHECK(e["error"] == "config");
  CHECK(e["command"] == "tomo");
  CHECK(e["line"] == 3);
  CHECK(e["column"] == 1);

  const auto phys = run({"tomo", "--p", "0.9", "--visibility", "0.9"});
  CHECK(phys.code == kExitConfig);
  CHECK(json::parse(phys.err)["error"] == "physicality");

  CHECK(run({"frobnicate"}).code == kExitConfig);
  CHECK(run({}).code == kExitConfig);

  const auto res = run({"hom", "--tau-min-ps", "100", "--tau-max-ps", "101"});
  CHECK(res.code == kExitNumeric);
  CHECK(json::parse(res.err)["error"] == "resolution");

  const auto csv = scratch_dir() / "slow.csv";
  REQUIRE(run({"-o", csv.string(), "hom", "--closed-form"}).code == kExitOk);
  const auto nc = run({"fit", csv.string(), "--max-iterations", "1"});
  CHECK(nc.code == kExitNonConvergence);
  CHECK(json::parse(nc.err)["error"] == "non_convergence");

  CHECK(run({"fit", (scratch_dir() / "missing.csv").string()}).code != kExitOk);
}

TEST_CASE("bundled configuration runs") {
  const auto r = run({"-c", BIPHOTON_SOURCE_DIR "/configs/reference_device.cfg", "hom", "--closed-form"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == run({"hom", "--closed-form"}).out);
}
