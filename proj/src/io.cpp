#include "nvgeo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace nvgeo::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string echo_csv(const EchoCurve& curve) {
  std::string out = "t_seconds,signal\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    out += format_double(curve.times[i]) + "," + format_double(curve.signal[i]) + "\n";
  }
  return out;
}

std::string sequence_csv(const SequenceResult& r) {
  std::string out = "t_seconds,population_0\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out += format_double(r.times[i]) + "," + format_double(r.population_0[i]) + "\n";
  }
  return out;
}

std::string field_scan_csv(const FieldScan& scan) {
  std::string out = "field_tesla,t2_seconds,std_error_seconds,residual_rms,status\n";
  for (std::size_t i = 0; i < scan.fields.size(); ++i) {
    const auto& fit = scan.fits[i];
    out += format_double(scan.fields[i]) + "," + format_double(scan.t2[i]) + ",";
    out += (fit ? format_double(fit->std_error) : "nan") + ",";
    out += (fit ? format_double(fit->residual_rms) : "nan") + ",";
    out += scan.errors[i].empty() ? "ok" : scan.errors[i];
    out += "\n";
  }
  return out;
}

std::string histogram_csv(const DimerHistogram& h) {
  std::string out = "bin_low_seconds,bin_high_seconds,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += format_double(h.bin_width * static_cast<double>(i)) + "," +
           format_double(h.bin_width * static_cast<double>(i + 1)) + "," +
           std::to_string(h.counts[i]) + "\n";
  }
  return out;
}

std::string histogram_seeds_csv(const DimerHistogram& h) {
  std::string out = "seed,dimer_count,t2_seconds,status\n";
  for (const auto& row : h.rows) {
    out += std::to_string(row.seed) + "," + std::to_string(row.dimer_count) + "," +
           (row.t2 ? format_double(*row.t2) : "nan") + "," + row.status + "\n";
  }
  return out;
}

nlohmann::json to_json(const FitResult& fit) {
  return {{"decay_time_seconds", fit.decay_time}, {"exponent", fit.exponent},
          {"amplitude", fit.amplitude},           {"offset", fit.offset},
          {"residual_rms", fit.residual_rms},     {"std_error_seconds", fit.std_error}};
}

nlohmann::json to_json(const EchoMetadata& meta) {
  nlohmann::json j{{"kind", meta.kind},
                   {"b_ext_tesla", {meta.b_ext.x(), meta.b_ext.y(), meta.b_ext.z()}},
                   {"m_I_policy", meta.m_i_policy},
                   {"bath_seed", meta.seed}};
  if (meta.strain) {
    j["strain"] = {{"ex_rad_per_s", meta.strain->ex},
                   {"ey_rad_per_s", meta.strain->ey},
                   {"z_offset_rad_per_s", meta.strain->z_offset}};
  } else {
    j["strain"] = nullptr;
  }
  return j;
}

nlohmann::json to_json(const NvParams& p) {
  return {{"D_rad_per_s", p.D},         {"Ex_rad_per_s", p.Ex},
          {"Ey_rad_per_s", p.Ey},       {"Az_rad_per_s", p.Az},
          {"gamma_e_rad_per_s_per_T", p.gamma_e},
          {"gamma_c_rad_per_s_per_T", p.gamma_c},
          {"mu0_T_m_per_A", p.mu0},      {"T1_seconds", p.T1}};
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nvgeo::io
