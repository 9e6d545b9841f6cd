#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nvgeo/cli.hpp"
#include "nvgeo/config.hpp"
#include "nvgeo/io.hpp"

namespace fs = std::filesystem;
using nvgeo::io::read_file;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "nvgeo_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "nvgeo");
  std::ostringstream out, err;
  const int code = nvgeo::cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string out_dir(const std::string& name) { return (scratch() / name).string(); }

}  // namespace

TEST_CASE("echo-decay writes curve, sidecar, manifest and replay config") {
  const std::string dir = out_dir("echo");
  REQUIRE(run({"echo-decay", "--field-mT", "0", "--seed", "7", "--tau-max-us", "200",
               "--tau-points", "256", "--out", dir}) == 0);
  const std::string csv = read_file(dir + "/echo_decay.csv");
  CHECK(csv.rfind("t_seconds,signal\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);

  const auto sidecar = nlohmann::json::parse(read_file(dir + "/echo_decay.json"));
  CHECK(sidecar["fit"]["decay_time_seconds"].get<double>() > 30e-6);
  CHECK(sidecar["config"]["seed"] == "7");
  CHECK(sidecar["config"].size() == nvgeo::config_keys().size());

  const auto manifest = nlohmann::json::parse(read_file(dir + "/manifest.json"));
  CHECK(manifest["tool"] == "nvgeo");
  CHECK(manifest["command"] == "echo-decay");
  bool saw_csv = false;
  for (const auto& o : manifest["outputs"]) {
    const std::string content = read_file(dir + "/" + o["file"].get<std::string>());
    CHECK(o["sha256"] == nvgeo::io::sha256_hex(content));
    CHECK(o["bytes"] == content.size());
    saw_csv |= o["file"] == "echo_decay.csv";
  }
  CHECK(saw_csv);

  // replay from the snapshot
  const std::string replay = out_dir("echo_replay");
  REQUIRE(run({"echo-decay", "--config", dir + "/run.cfg", "--out", replay}) == 0);
  CHECK(read_file(replay + "/echo_decay.csv") == csv);

  // bath reloaded from JSON gives the same curve
  const std::string gen = out_dir("bathgen");
  REQUIRE(run({"bath-gen", "--seed", "7", "--radius-nm", "4", "--abundance", "0.011", "--out", gen}) == 0);
  const std::string from_file = out_dir("echo_file");
  REQUIRE(run({"echo-decay", "--bath", gen + "/bath.json", "--tau-points", "256", "--out", from_file}) == 0);
  CHECK(read_file(from_file + "/echo_decay.csv") == csv);
}

TEST_CASE("t2-scan is byte-identical across thread counts") {
  const std::string a = out_dir("scan1"), b = out_dir("scan3");
  const std::vector<std::string> common{"t2-scan", "--fields-mT", "0:0.12:5", "--tau-points", "128"};
  auto with = [&](const std::string& dir, const std::string& threads) {
    auto v = common;
    v.insert(v.end(), {"--threads", threads, "--out", dir, "--gnuplot"});
    return v;
  };
  REQUIRE(run(with(a, "1")) == 0);
  REQUIRE(run(with(b, "3")) == 0);
  CHECK(read_file(a + "/t2_scan.csv") == read_file(b + "/t2_scan.csv"));
  CHECK(fs::exists(a + "/t2_scan.gp"));
  CHECK(fs::exists(a + "/t2_scan.json"));
}

TEST_CASE("other subcommands") {
  CHECK(run({"rabi", "--out", out_dir("rabi")}) == 0);
  CHECK(fs::exists(out_dir("rabi") + "/rabi.csv"));
  CHECK(run({"ramsey", "--out", out_dir("ramsey")}) == 0);
  const auto r = nlohmann::json::parse(read_file(out_dir("ramsey") + "/ramsey.json"));
  CHECK(r["dominant_frequency_Hz"].get<double>() == doctest::Approx(4.35e6).epsilon(0.01));
  CHECK(run({"fid", "--out", out_dir("fid")}) == 0);
  CHECK(run({"refocus", "--tau1-us", "35", "--out", out_dir("refocus")}) == 0);
  CHECK(read_file(out_dir("refocus") + "/refocus.csv").rfind("t_seconds,population_0\n", 0) == 0);
  CHECK(run({"dimer-hist", "--n-configs", "10", "--tau-points", "128", "--out", out_dir("hist")}) == 0);
  CHECK(fs::exists(out_dir("hist") + "/dimer_hist_seeds.csv"));
  CHECK(fs::exists(out_dir("hist") + "/bath_selected.json"));
}

TEST_CASE("exit codes") {
  std::string err;
  CHECK(run({"echo-decay", "--bogus"}, &err) == 2);
  CHECK(err.find("--bogus") != std::string::npos);
  CHECK(run({}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"echo-decay", "--radius-nm", "40", "--out", out_dir("bad")}, &err) == 2);
  CHECK(err.find("radius_nm") != std::string::npos);
  CHECK(run({"echo-decay", "--config", out_dir("missing.cfg")}) == 2);

  // fully strain-protected echo cannot be fitted; the curve is still written
  const std::string dir = out_dir("protected");
  CHECK(run({"echo-decay", "--strain-MHz", "0.23", "--m-I", "0", "--tau-points", "64", "--out", dir}, &err) == 3);
  CHECK(fs::exists(dir + "/echo_decay.csv"));
  const auto sidecar = nlohmann::json::parse(read_file(dir + "/echo_decay.json"));
  CHECK(sidecar["fit_error"] == "insufficient decay");

  const std::string cmd = std::string(NVGEO_BINARY) + " echo-decay --no-such-flag > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
