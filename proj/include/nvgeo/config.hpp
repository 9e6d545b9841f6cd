#pragma once

// Run configuration: line-oriented `key = value` files with unit-suffixed
// keys. Later settings (CLI flags) override earlier ones (the file).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nvgeo/echo.hpp"

namespace nvgeo {

/// start:stop:count with count >= 1 (count == 1 yields just `start`).
struct FieldGrid {
  double start = 0.0;
  double stop = 0.12;
  std::size_t count = 25;

  std::vector<double> values() const;
};

FieldGrid parse_field_grid(const std::string& text);

struct RunConfig {
  // NV parameters as written in the file; converted to rad/s by nv()
  double D_Hz = 2.87e9;
  double Ex_Hz = 0.0;
  double Ey_Hz = 0.0;
  double Az_Hz = 2.175e6;
  double gamma_e = -1.76e11;
  double gamma_c = 6.73e7;
  double mu0 = kMu0;
  double T1_s = 700e-6;

  std::uint64_t seed = 7;
  double abundance = 0.011;
  double radius_nm = 4.0;
  std::optional<std::string> bath_file;

  double field_mT = 0.0;
  FieldGrid fields_mT;
  double tau_max_us = 200.0;
  std::size_t tau_points = 512;
  double tau1_us = 35.0;
  std::optional<double> time_max_us;  // rabi / ramsey / fid / refocus window
  std::size_t time_points = 1001;

  std::optional<double> strain_MHz;   // full ODMR splitting
  double broadening_MHz = 0.0;        // FWHM
  MiPolicy m_i_policy = MiPolicy::Mixture();

  double rabi_MHz = 10.0;
  bool ramsey_envelope = true;
  bool include_t1 = false;

  std::size_t n_configs = 100;
  double bin_width_us = 10.0;
  double target_t2_us = 75.0;

  std::string output_dir = "out";
  unsigned threads = 0;  // 0: hardware concurrency
  bool gnuplot = false;

  NvParams nv() const;
};

/// Applies one setting; throws ConfigError naming the key on failure.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Applies a batch of settings, collecting every offending key into one error.
void apply_settings(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv);

/// Range checks across the whole configuration; lists every offending key.
void validate(const RunConfig& cfg);

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// All keys with their resolved values, in a fixed order; feeding the
/// output back through parse_config_text reproduces the configuration.
std::vector<std::pair<std::string, std::string>> config_snapshot(const RunConfig& cfg);
std::string config_text(const RunConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace nvgeo
