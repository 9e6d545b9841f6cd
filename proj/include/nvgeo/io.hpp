#pragma once

// CSV bodies and JSON sidecars. Floats are written with 17 significant
// digits, LF line endings, one header row, no comments.

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "nvgeo/analysis.hpp"

namespace nvgeo::io {

std::string format_double(double v);

std::string echo_csv(const EchoCurve& curve);
std::string sequence_csv(const SequenceResult& r);
std::string field_scan_csv(const FieldScan& scan);
std::string histogram_csv(const DimerHistogram& h);
std::string histogram_seeds_csv(const DimerHistogram& h);

nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const EchoMetadata& meta);
nlohmann::json to_json(const NvParams& p);

std::string sha256_hex(std::string_view data);

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace nvgeo::io
