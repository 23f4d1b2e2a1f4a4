#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stinsim/config_io.hpp"
#include "stinsim/engine.hpp"
#include "stinsim/error.hpp"
#include "stinsim/version.hpp"

namespace stinsim {

struct RunManifest {
  std::vector<KeyValue> config;  ///< full key/value snapshot, file order
  std::uint64_t master_seed = 0;
  std::string version = kVersion;
  double runtime_s = 0.0;
  std::vector<std::pair<std::string, std::string>> outputs;  ///< curve name -> file name
};

inline RunManifest make_manifest(const ExperimentConfig& config) {
  RunManifest m;
  m.config = config_to_key_values(config);
  m.master_seed = config.master_seed;
  return m;
}

inline std::string format_sig9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::string coverage_csv(const std::vector<CoverageEstimate>& curve) {
  std::string out = "threshold_db,p_hat,ci_low,ci_high,n\n";
  for (const auto& p : curve) {
    out += format_sig9(p.threshold_dB) + "," + format_sig9(p.p_hat) + "," + format_sig9(p.ci_low) +
           "," + format_sig9(p.ci_high) + "," + std::to_string(p.n) + "\n";
  }
  return out;
}

inline std::string discrepancy_csv(const std::vector<DiscrepancyPoint>& curve) {
  std::string out = "num_pilots,ks_mean,ci_low,ci_high,seeds\n";
  for (const auto& p : curve) {
    out += std::to_string(p.num_pilots) + "," + format_sig9(p.ks_mean) + "," + format_sig9(p.ci_low) +
           "," + format_sig9(p.ci_high) + "," + std::to_string(p.seeds) + "\n";
  }
  return out;
}

inline nlohmann::ordered_json manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "stinsim";
  j["version"] = m.version;
  j["master_seed"] = m.master_seed;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.config) cfg[k] = v;
  j["config"] = cfg;
  j["runtime_s"] = m.runtime_s;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  for (const auto& [name, file] : m.outputs) outputs[name] = file;
  j["outputs"] = outputs;
  return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

/// One CSV per curve plus manifest.json. Returns the paths written.
inline std::vector<std::filesystem::path> write_results(const ExperimentResult& result,
                                                        RunManifest manifest,
                                                        const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  manifest.outputs.clear();
  for (const auto& curve : result.coverage) {
    const auto file = curve.name + ".csv";
    write_text_file(out_dir / file, coverage_csv(curve.points));
    manifest.outputs.emplace_back(curve.name, file);
    written.push_back(out_dir / file);
  }
  if (!result.discrepancy.empty()) {
    const std::string file = "discrepancy.csv";
    write_text_file(out_dir / file, discrepancy_csv(result.discrepancy));
    manifest.outputs.emplace_back("discrepancy", file);
    written.push_back(out_dir / file);
  }
  write_text_file(out_dir / "manifest.json", manifest_json(manifest).dump(2) + "\n");
  written.push_back(out_dir / "manifest.json");
  return written;
}

/// Rebuilds the exact configuration recorded in a manifest.
inline ExperimentConfig config_from_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest '" + path.string() + "'");
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!j.contains("config") || !j["config"].is_object()) {
    throw ConfigError("manifest '" + path.string() + "' has no config object");
  }
  std::vector<KeyValue> kv;
  for (const auto& [k, v] : j["config"].items()) {
    if (!v.is_string()) throw ConfigError("manifest config value for '" + k + "' must be a string");
    kv.emplace_back(k, v.get<std::string>());
  }
  return config_from_key_values(kv);
}

}  // namespace stinsim
