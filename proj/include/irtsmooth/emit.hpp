#pragma once

#include "irtsmooth/analysis.hpp"
#include "irtsmooth/simulation.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace irtsmooth {

inline constexpr int kSchemaVersion = 1;

struct ManifestEntry
{
  std::string path;
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct Manifest
{
  std::string root;
  std::vector<ManifestEntry> files;
};

std::string sha256_hex(std::string_view bytes);

//! Shortest round-trip text of a double; "NA" for non-finite values.
std::string csv_number(double value);

//! Writes files under a root directory and records each in the manifest.
class ArtifactWriter
{
public:
  explicit ArtifactWriter(std::string root);

  void write(const std::string& relative, std::string_view content);
  //! Writes manifest.json (entries sorted by path) and returns the manifest.
  Manifest finish();

private:
  Manifest manifest_;
};

std::string manifest_json(const Manifest& manifest);

//! Data artifacts, requested plots and, when present, DIF outputs.
Manifest write_analysis(const Model& model, const std::string& out_dir);

Manifest write_cv_profile(const CvProfile& profile, const std::string& out_dir);

//! Response CSV of a simulation: item labels as header, 1-based codes.
std::string responses_csv(const ResponseMatrix& data);

//! File-name-safe form of an item or group label.
std::string safe_name(std::string_view label);

} // namespace irtsmooth
