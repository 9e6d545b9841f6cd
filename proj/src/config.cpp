#include "nvgeo/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "nvgeo/io.hpp"

namespace nvgeo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(out)) {
    throw ConfigError("not a finite number: '" + v + "'");
  }
  return out;
}

std::uint64_t to_uint(const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("not a non-negative integer: '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("not a boolean: '" + v + "'");
}

std::string fmt(double v) { return io::format_double(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Key double_key(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) { c.*member = to_double(v); },
          [member](const RunConfig& c) { return fmt(c.*member); }};
}

Key size_key(std::size_t RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) {
            c.*member = static_cast<std::size_t>(to_uint(v));
          },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Key bool_key(bool RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) { c.*member = to_bool(v); },
          [member](const RunConfig& c) { return fmt(c.*member); }};
}

Key optional_double_key(std::optional<double> RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) {
            if (v == "none") {
              c.*member = std::nullopt;
            } else {
              c.*member = to_double(v);
            }
          },
          [member](const RunConfig& c) { return c.*member ? fmt(*(c.*member)) : "none"; }};
}

// Ordered: config_snapshot emits keys in this order.
const std::vector<std::pair<std::string, Key>>& key_table() {
  static const std::vector<std::pair<std::string, Key>> table = {
      {"D_Hz", double_key(&RunConfig::D_Hz)},
      {"Ex_Hz", double_key(&RunConfig::Ex_Hz)},
      {"Ey_Hz", double_key(&RunConfig::Ey_Hz)},
      {"Az_Hz", double_key(&RunConfig::Az_Hz)},
      {"gamma_e_rad_per_s_per_T", double_key(&RunConfig::gamma_e)},
      {"gamma_c_rad_per_s_per_T", double_key(&RunConfig::gamma_c)},
      {"mu0_T_m_per_A", double_key(&RunConfig::mu0)},
      {"T1_s", double_key(&RunConfig::T1_s)},
      {"seed",
       {[](RunConfig& c, const std::string& v) { c.seed = to_uint(v); },
        [](const RunConfig& c) { return std::to_string(c.seed); }}},
      {"abundance", double_key(&RunConfig::abundance)},
      {"radius_nm", double_key(&RunConfig::radius_nm)},
      {"bath_file",
       {[](RunConfig& c, const std::string& v) {
          c.bath_file = (v == "none" || v.empty()) ? std::nullopt : std::optional(v);
        },
        [](const RunConfig& c) { return c.bath_file.value_or("none"); }}},
      {"field_mT", double_key(&RunConfig::field_mT)},
      {"fields_mT",
       {[](RunConfig& c, const std::string& v) { c.fields_mT = parse_field_grid(v); },
        [](const RunConfig& c) {
          return fmt(c.fields_mT.start) + ":" + fmt(c.fields_mT.stop) + ":" +
                 std::to_string(c.fields_mT.count);
        }}},
      {"tau_max_us", double_key(&RunConfig::tau_max_us)},
      {"tau_points", size_key(&RunConfig::tau_points)},
      {"tau1_us", double_key(&RunConfig::tau1_us)},
      {"time_max_us", optional_double_key(&RunConfig::time_max_us)},
      {"time_points", size_key(&RunConfig::time_points)},
      {"strain_MHz", optional_double_key(&RunConfig::strain_MHz)},
      {"broadening_MHz", double_key(&RunConfig::broadening_MHz)},
      {"m_I",
       {[](RunConfig& c, const std::string& v) {
          if (v == "mix" || v == "mixture") {
            c.m_i_policy = MiPolicy::Mixture();
          } else if (v == "-1" || v == "0" || v == "1" || v == "+1") {
            c.m_i_policy = MiPolicy::Fixed(v == "-1" ? -1 : (v == "0" ? 0 : 1));
          } else {
            throw ConfigError("expected mix, -1, 0 or 1, got '" + v + "'");
          }
        },
        [](const RunConfig& c) {
          return c.m_i_policy.mixture ? std::string("mix") : std::to_string(c.m_i_policy.fixed);
        }}},
      {"rabi_MHz", double_key(&RunConfig::rabi_MHz)},
      {"ramsey_envelope", bool_key(&RunConfig::ramsey_envelope)},
      {"include_t1", bool_key(&RunConfig::include_t1)},
      {"n_configs", size_key(&RunConfig::n_configs)},
      {"bin_width_us", double_key(&RunConfig::bin_width_us)},
      {"target_t2_us", double_key(&RunConfig::target_t2_us)},
      {"output_dir",
       {[](RunConfig& c, const std::string& v) { c.output_dir = v; },
        [](const RunConfig& c) { return c.output_dir; }}},
      {"threads",
       {[](RunConfig& c, const std::string& v) { c.threads = static_cast<unsigned>(to_uint(v)); },
        [](const RunConfig& c) { return std::to_string(c.threads); }}},
      {"gnuplot", bool_key(&RunConfig::gnuplot)},
  };
  return table;
}

const Key* find_key(const std::string& name) {
  for (const auto& [k, key] : key_table()) {
    if (k == name) return &key;
  }
  return nullptr;
}

}  // namespace

NvParams RunConfig::nv() const {
  NvParams p;
  p.D = kTwoPi * D_Hz;
  p.Ex = kTwoPi * Ex_Hz;
  p.Ey = kTwoPi * Ey_Hz;
  p.Az = kTwoPi * Az_Hz;
  p.gamma_e = gamma_e;
  p.gamma_c = gamma_c;
  p.mu0 = mu0;
  p.T1 = T1_s;
  return p;
}

std::vector<double> FieldGrid::values() const {
  std::vector<double> out;
  if (count == 1) return {start};
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(start + (stop - start) * static_cast<double>(i) /
                              static_cast<double>(count - 1));
  }
  return out;
}

FieldGrid parse_field_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw ConfigError("field grid must be start:stop:count, got '" + text + "'");
  }
  FieldGrid g;
  g.start = to_double(trim(text.substr(0, a)));
  g.stop = to_double(trim(text.substr(a + 1, b - a - 1)));
  g.count = static_cast<std::size_t>(to_uint(trim(text.substr(b + 1))));
  if (g.count == 0) throw ConfigError("field grid count must be positive");
  if (g.count > 1 && !(g.stop > g.start)) throw ConfigError("field grid must be ascending");
  return g;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Key* k = find_key(key);
  if (!k) throw ConfigError("unknown key '" + key + "'");
  try {
    k->set(cfg, value);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

void apply_settings(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::vector<std::string> problems;
  for (const auto& [key, value] : kv) {
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "configuration errors:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
}

void validate(const RunConfig& cfg) {
  std::vector<std::string> problems;
  const auto check = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  try {
    cfg.nv().validate();
  } catch (const ConfigError& e) {
    problems.push_back(e.what());
  }
  check(cfg.abundance > 0.0 && cfg.abundance <= 0.5, "abundance: must lie in (0, 0.5]");
  check(cfg.radius_nm > 0.0 && cfg.radius_nm <= kMaxLatticeRadius * 1e9,
        "radius_nm: must lie in (0, 6]");
  check(std::abs(cfg.field_mT) <= 1e3, "field_mT: magnitude above 1 T");
  check(cfg.tau_max_us > 0.0, "tau_max_us: must be positive");
  check(cfg.tau_points >= 8 && cfg.tau_points <= 1000000, "tau_points: must lie in [8, 1e6]");
  check(cfg.tau1_us >= 0.0, "tau1_us: must be non-negative");
  check(!cfg.time_max_us || *cfg.time_max_us > 0.0, "time_max_us: must be positive");
  check(cfg.time_points >= 8 && cfg.time_points <= 1000000, "time_points: must lie in [8, 1e6]");
  check(!cfg.strain_MHz || *cfg.strain_MHz >= 0.0, "strain_MHz: must be non-negative");
  check(cfg.broadening_MHz >= 0.0, "broadening_MHz: must be non-negative");
  check(cfg.rabi_MHz > 0.0, "rabi_MHz: must be positive");
  check(cfg.n_configs >= 10, "n_configs: must be at least 10");
  check(cfg.bin_width_us > 0.0, "bin_width_us: must be positive");
  check(cfg.target_t2_us > 0.0, "target_t2_us: must be positive");
  check(!cfg.output_dir.empty(), "output_dir: must not be empty");
  check(cfg.threads <= 1024, "threads: at most 1024");
  if (!problems.empty()) {
    std::string msg = "configuration errors:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::vector<std::string> problems;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  if (!problems.empty()) {
    std::string msg = "configuration errors:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return kv;
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig cfg;
  apply_settings(cfg, parse_config_text(io::read_file(path)));
  validate(cfg);
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_snapshot(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, key] : key_table()) out.emplace_back(name, key.get(cfg));
  return out;
}

std::string config_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_snapshot(cfg)) out += k + " = " + v + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, key] : key_table()) keys.push_back(name);
  return keys;
}

}  // namespace nvgeo
