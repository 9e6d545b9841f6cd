#include "nvgeo/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "nvgeo/analysis.hpp"
#include "nvgeo/config.hpp"
#include "nvgeo/io.hpp"

#ifndef NVGEO_VERSION
#define NVGEO_VERSION "0.0.0"
#endif

namespace nvgeo::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

unsigned resolve_threads(const RunConfig& cfg) {
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NVGEO_THREADS")) {
    try {
      const unsigned long v = std::stoul(env);
      if (v > 0 && v <= 1024) threads = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw ConfigError("NVGEO_THREADS must be a positive integer");
    }
  }
  return threads;
}

// Collects the files of one run and writes them plus the manifest.
class RunWriter {
 public:
  RunWriter(const RunConfig& cfg, std::string command)
      : cfg_(cfg), command_(std::move(command)), started_(utc_now()) {}

  void add(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }

  // CSV body plus a JSON sidecar holding the resolved configuration.
  void add_table(const std::string& stem, std::string csv, json extra) {
    extra["command"] = command_;
    extra["csv"] = stem + ".csv";
    extra["config"] = config_json();
    add(stem + ".csv", std::move(csv));
    add(stem + ".json", extra.dump(2) + "\n");
    if (cfg_.gnuplot) {
      add(stem + ".gp", "set datafile separator ','\nset key autotitle columnhead\nplot '" +
                            stem + ".csv' using 1:2 with linespoints\npause -1\n");
    }
  }

  json config_json() const {
    json j = json::object();
    for (const auto& [k, v] : config_snapshot(cfg_)) j[k] = v;
    return j;
  }

  void commit() {
    add("run.cfg", config_text(cfg_));
    const fs::path dir(cfg_.output_dir);
    json outputs = json::array();
    for (const auto& [name, content] : files_) {
      io::write_file(dir / name, content);
      outputs.push_back({{"file", name}, {"sha256", io::sha256_hex(content)},
                         {"bytes", content.size()}});
    }
    json manifest{{"tool", "nvgeo"},
                  {"version", NVGEO_VERSION},
                  {"command", command_},
                  {"started_utc", started_},
                  {"finished_utc", utc_now()},
                  {"config", config_json()},
                  {"outputs", outputs}};
    io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  const RunConfig& cfg_;
  std::string command_;
  std::string started_;
  std::vector<std::pair<std::string, std::string>> files_;
};

BathConfig make_bath(const RunConfig& cfg, const NvParams& p) {
  if (cfg.bath_file) {
    try {
      return bath_from_json(json::parse(io::read_file(*cfg.bath_file)));
    } catch (const json::exception& e) {
      throw ConfigError("bath_file: " + std::string(e.what()));
    }
  }
  const Lattice lattice = diamond_lattice(cfg.radius_nm * 1e-9);
  return sample_bath(lattice, cfg.abundance, cfg.seed, p);
}

std::vector<double> tau_grid(const RunConfig& cfg) {
  return linear_grid(cfg.tau_max_us * 1e-6, cfg.tau_points);
}

std::vector<double> time_grid(const RunConfig& cfg, double default_max_us) {
  return linear_grid(cfg.time_max_us.value_or(default_max_us) * 1e-6, cfg.time_points);
}

// ODMR splitting is 2 sqrt(Ex^2 + Ey^2); the strain is put along x.
double strain_ex(const RunConfig& cfg) { return kTwoPi * (*cfg.strain_MHz) * 1e6 / 2.0; }

EchoCurve echo_for(const RunConfig& cfg, const BathConfig& bath, const NvParams& p,
                   double bz, std::span<const double> taus) {
  if (!cfg.strain_MHz) {
    return bath_echo_curve(bath, p, Vector3(0.0, 0.0, bz), cfg.m_i_policy, std::nullopt, taus);
  }
  const ScanStrain strain{strain_ex(cfg), 0.0, kTwoPi * cfg.broadening_MHz * 1e6};
  return strained_echo_curve(bath, p, bz, strain, cfg.m_i_policy, taus);
}

int cmd_echo_decay(const RunConfig& cfg, std::ostream& out) {
  const NvParams p = cfg.nv();
  const BathConfig bath = make_bath(cfg, p);
  const auto taus = tau_grid(cfg);
  const EchoCurve curve = echo_for(cfg, bath, p, cfg.field_mT * 1e-3, taus);
  RunWriter w(cfg, "echo-decay");
  json extra{{"metadata", io::to_json(curve.meta)},
             {"singles", bath.singles.size()},
             {"dimers", bath.dimers.size()}};
  int code = kExitOk;
  try {
    const FitResult fit = fit_stretched_exp(curve);
    extra["fit"] = io::to_json(fit);
    out << "T2 = " << fit.decay_time * 1e6 << " us\n";
  } catch (const NumericalError& e) {
    extra["fit_error"] = e.what();
    code = kExitNumerical;
  }
  w.add_table("echo_decay", io::echo_csv(curve), extra);
  w.commit();
  return code;
}

int cmd_fid(const RunConfig& cfg, std::ostream& out) {
  const NvParams p = cfg.nv();
  const BathConfig bath = make_bath(cfg, p);
  const auto taus = time_grid(cfg, 5.0);
  const EchoCurve curve =
      fid_curve(bath, p, Vector3(0.0, 0.0, cfg.field_mT * 1e-3), cfg.m_i_policy, taus);
  RunWriter w(cfg, "fid");
  json extra{{"metadata", io::to_json(curve.meta)}};
  int code = kExitOk;
  try {
    const FitResult fit = fit_gaussian(curve);
    extra["fit"] = io::to_json(fit);
    out << "T2* = " << fit.decay_time * 1e6 << " us\n";
  } catch (const NumericalError& e) {
    extra["fit_error"] = e.what();
    code = kExitNumerical;
  }
  w.add_table("fid", io::echo_csv(curve), extra);
  w.commit();
  return code;
}

int cmd_rabi(const RunConfig& cfg, std::ostream& out) {
  const NvParams p = cfg.nv();
  const auto ts = time_grid(cfg, 1.0);
  const SequenceResult r = rabi_signal(kTwoPi * cfg.rabi_MHz * 1e6, ts, p, cfg.m_i_policy);
  // first local minimum of the |0> population
  double t_min = r.times.back();
  for (std::size_t i = 1; i + 1 < r.times.size(); ++i) {
    if (r.population_0[i] <= r.population_0[i - 1] && r.population_0[i] < r.population_0[i + 1]) {
      t_min = r.times[i];
      break;
    }
  }
  RunWriter w(cfg, "rabi");
  w.add_table("rabi", io::sequence_csv(r),
              {{"rabi_frequency_rad_per_s", kTwoPi * cfg.rabi_MHz * 1e6},
               {"m_I_policy", cfg.m_i_policy.label()},
               {"first_minimum_seconds", t_min}});
  w.commit();
  out << "pi pulse ~ " << t_min * 1e9 << " ns\n";
  return kExitOk;
}

int cmd_ramsey(const RunConfig& cfg, std::ostream& out) {
  const NvParams p = cfg.nv();
  const auto taus = time_grid(cfg, 3.0);
  std::optional<EchoCurve> envelope;
  if (cfg.ramsey_envelope) {
    const BathConfig bath = make_bath(cfg, p);
    envelope = fid_curve(bath, p, Vector3::Zero(), cfg.m_i_policy, taus);
  }
  SequenceOptions opts;
  opts.m_i_policy = cfg.m_i_policy;
  opts.include_t1 = cfg.include_t1;
  const SequenceResult r = ramsey_population(taus, p, envelope ? &*envelope : nullptr, opts);

  json extra{{"m_I_policy", cfg.m_i_policy.label()}, {"envelope", cfg.ramsey_envelope}};
  int code = kExitOk;
  try {
    const double f = dominant_frequency(r.times, r.population_0, 0.5e6, 50e6);
    extra["dominant_frequency_Hz"] = f;
    out << "dominant frequency = " << f * 1e-6 << " MHz\n";
  } catch (const Error& e) {
    extra["frequency_error"] = e.what();
  }
  if (envelope) {
    try {
      const FitResult fit = fit_ramsey_envelope(r, p, cfg.m_i_policy);
      extra["envelope_fit"] = io::to_json(fit);
      out << "T2* (envelope) = " << fit.decay_time * 1e6 << " us\n";
    } catch (const NumericalError& e) {
      extra["envelope_fit_error"] = e.what();
      code = kExitNumerical;
    }
  }
  RunWriter w(cfg, "ramsey");
  w.add_table("ramsey", io::sequence_csv(r), extra);
  w.commit();
  return code;
}

int cmd_refocus(const RunConfig& cfg, std::ostream& out) {
  const NvParams p = cfg.nv();
  const BathConfig bath = make_bath(cfg, p);
  const double tau1 = cfg.tau1_us * 1e-6;
  const double window = cfg.time_max_us.value_or(2.0) * 1e-6;
  std::vector<double> tau2;
  for (std::size_t i = 0; i < cfg.time_points; ++i) {
    const double v = tau1 - window + 2.0 * window * static_cast<double>(i) /
                                         static_cast<double>(cfg.time_points - 1);
    if (v >= 0.0) tau2.push_back(v);
  }
  if (tau2.empty()) throw ConfigError("refocus: empty tau2 window");
  const double tau_needed = 0.5 * (tau1 + tau2.back());
  const auto taus = linear_grid(std::max(cfg.tau_max_us * 1e-6, tau_needed), cfg.tau_points);
  const EchoCurve bath_factor = echo_for(cfg, bath, p, cfg.field_mT * 1e-3, taus);

  SequenceOptions opts;
  opts.m_i_policy = cfg.m_i_policy;
  opts.include_t1 = cfg.include_t1;
  opts.mismatch_envelope =
      fid_curve(bath, p, Vector3(0.0, 0.0, cfg.field_mT * 1e-3), cfg.m_i_policy,
                linear_grid(window, cfg.time_points));
  const SequenceResult r = echo_sequence_population(tau1, tau2, p, &bath_factor, opts);

  RunWriter w(cfg, "refocus");
  w.add_table("refocus", io::sequence_csv(r),
              {{"tau1_seconds", tau1},
               {"bath_echo_at_2tau1", interpolate(bath_factor, 2.0 * tau1)},
               {"m_I_policy", cfg.m_i_policy.label()}});
  w.commit();
  out << "refocus written (" << r.times.size() << " points)\n";
  return kExitOk;
}

int cmd_t2_scan(const RunConfig& cfg, std::ostream& out, unsigned threads) {
  const NvParams p = cfg.nv();
  const BathConfig bath = make_bath(cfg, p);
  std::vector<double> fields = cfg.fields_mT.values();
  for (double& f : fields) f *= 1e-3;
  std::optional<ScanStrain> strain;
  if (cfg.strain_MHz) {
    strain = ScanStrain{strain_ex(cfg), 0.0, kTwoPi * cfg.broadening_MHz * 1e6};
  }
  const FieldScan scan =
      t2_field_scan(bath, p, fields, strain, cfg.m_i_policy, {tau_grid(cfg), threads});
  std::size_t ok = 0;
  for (const auto& e : scan.errors) ok += e.empty();

  RunWriter w(cfg, "t2-scan");
  w.add_table("t2_scan", io::field_scan_csv(scan),
              {{"bath_seed", bath.seed},
               {"singles", bath.singles.size()},
               {"dimers", bath.dimers.size()},
               {"points_ok", ok},
               {"strain", strain ? json{{"ex_rad_per_s", strain->ex},
                                        {"broadening_fwhm_rad_per_s", strain->broadening_fwhm},
                                        {"quadrature_order", strain->quadrature_order}}
                                 : json(nullptr)}});
  w.commit();
  out << ok << "/" << scan.fields.size() << " field points fitted\n";
  return ok == 0 ? kExitNumerical : kExitOk;
}

int cmd_dimer_hist(const RunConfig& cfg, std::ostream& out, unsigned threads) {
  const NvParams p = cfg.nv();
  HistogramOptions opts;
  opts.tau_grid = tau_grid(cfg);
  opts.bin_width = cfg.bin_width_us * 1e-6;
  opts.target_t2 = cfg.target_t2_us * 1e-6;
  opts.threads = threads;
  const DimerHistogram h =
      dimer_t2_histogram(cfg.n_configs, cfg.seed, p, cfg.radius_nm * 1e-9, cfg.abundance, opts);

  RunWriter w(cfg, "dimer-hist");
  json extra{{"per_seed_table", "dimer_hist_seeds.csv"}, {"bin_width_seconds", h.bin_width}};
  const auto fitted = h.fitted();
  extra["fitted_configs"] = fitted.size();
  int code = kExitOk;
  if (fitted.empty()) {
    code = kExitNumerical;
  } else {
    extra["median_t2_seconds"] = median(fitted);
    extra["selected_seed"] = *h.selected_seed;
    extra["selected_t2_seconds"] = h.selected_t2;
    extra["selected_bath"] = "bath_selected.json";
    const Lattice lattice = diamond_lattice(cfg.radius_nm * 1e-9);
    const BathConfig selected = sample_bath(lattice, cfg.abundance, *h.selected_seed, p);
    w.add("bath_selected.json", bath_to_json(selected).dump(2) + "\n");
    out << "selected seed " << *h.selected_seed << " with T2 = " << h.selected_t2 * 1e6
        << " us\n";
  }
  w.add("dimer_hist_seeds.csv", io::histogram_seeds_csv(h));
  w.add_table("dimer_hist", io::histogram_csv(h), extra);
  w.commit();
  return code;
}

int cmd_bath_gen(const RunConfig& cfg, std::ostream& out) {
  const NvParams p = cfg.nv();
  const BathConfig bath = make_bath(cfg, p);
  RunWriter w(cfg, "bath-gen");
  w.add("bath.json", bath_to_json(bath).dump(2) + "\n");
  w.commit();
  out << bath.singles.size() << " singles, " << bath.dimers.size() << " dimers\n";
  return kExitOk;
}

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagSpec kValueFlags[] = {
    {"--field-mT", "field_mT", "external field along the NV axis (mT)"},
    {"--fields-mT", "fields_mT", "field grid start:stop:count (mT)"},
    {"--seed", "seed", "bath seed (base seed for dimer-hist)"},
    {"--abundance", "abundance", "13C abundance"},
    {"--radius-nm", "radius_nm", "bath radius (nm)"},
    {"--bath", "bath_file", "load the bath from a JSON document"},
    {"--tau-max-us", "tau_max_us", "largest echo half-time tau (us)"},
    {"--tau-points", "tau_points", "number of tau samples"},
    {"--tau1-us", "tau1_us", "first free evolution of the refocus sequence (us)"},
    {"--time-max-us", "time_max_us", "time window for rabi/ramsey/fid/refocus (us)"},
    {"--time-points", "time_points", "samples in that window"},
    {"--strain-MHz", "strain_MHz", "ODMR strain splitting (MHz)"},
    {"--broadening-MHz", "broadening_MHz", "inhomogeneous broadening FWHM (MHz)"},
    {"--m-I", "m_I", "14N projection: mix, -1, 0 or 1"},
    {"--rabi-MHz", "rabi_MHz", "Rabi frequency (MHz)"},
    {"--n-configs", "n_configs", "number of random baths"},
    {"--bin-width-us", "bin_width_us", "histogram bin width (us)"},
    {"--target-t2-us", "target_t2_us", "T2 used to select a bath (us)"},
    {"--out", "output_dir", "output directory"},
    {"--threads", "threads", "worker threads"},
};

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric spin-echo simulator for an NV centre in a 13C bath", "nvgeo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NVGEO_VERSION);

  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"rabi", "Rabi oscillation between |B> and |0>"},
      {"ramsey", "pi - tau - pi Ramsey interference"},
      {"fid", "free-induction coherence of the bath"},
      {"echo-decay", "geometric echo decay and T2 fit"},
      {"refocus", "pi - tau1 - 2pi - tau2 - pi refocusing"},
      {"t2-scan", "T2 versus field along the NV axis"},
      {"dimer-hist", "histogram of dimer-only zero-field T2"},
      {"bath-gen", "generate and save a bath configuration"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option_function<std::string>(
        "--config", [&](const std::string& v) { config_path = v; }, "key = value config file");
    for (const auto& f : kValueFlags) {
      const std::string key = f.key;
      sub->add_option_function<std::string>(
          f.flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
          f.help);
    }
    sub->add_flag_callback("--gnuplot", [&] { overrides.emplace_back("gnuplot", "true"); },
                           "also write gnuplot scripts");
    sub->add_flag_callback("--include-t1", [&] { overrides.emplace_back("include_t1", "true"); },
                           "apply T1 relaxation to pulse-sequence populations");
    sub->add_flag_callback("--no-envelope",
                           [&] { overrides.emplace_back("ramsey_envelope", "false"); },
                           "ramsey without the bath envelope");
  }

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << NVGEO_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg;
    if (config_path) {
      apply_settings(cfg, parse_config_text(io::read_file(*config_path)));
    }
    apply_settings(cfg, overrides);
    validate(cfg);
    const unsigned threads = resolve_threads(cfg);

    if (command == "echo-decay") return cmd_echo_decay(cfg, out);
    if (command == "fid") return cmd_fid(cfg, out);
    if (command == "rabi") return cmd_rabi(cfg, out);
    if (command == "ramsey") return cmd_ramsey(cfg, out);
    if (command == "refocus") return cmd_refocus(cfg, out);
    if (command == "t2-scan") return cmd_t2_scan(cfg, out, threads);
    if (command == "dimer-hist") return cmd_dimer_hist(cfg, out, threads);
    if (command == "bath-gen") return cmd_bath_gen(cfg, out);
    err << "error: unknown subcommand " << command << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace nvgeo::cli
