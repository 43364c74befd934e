#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oa/arch.hpp"
#include "oa/predictor.hpp"
#include "oa/search.hpp"

namespace oa {

// Provenance block embedded in every machine-readable output. The timestamp
// is informational only; all payload bytes are reproducible from the seed.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
  std::string tool_version;
  std::string timestamp;  // ISO-8601 UTC, omitted from CSV headers

  static RunManifest make(const std::string& command,
                          const std::vector<std::string>& inputs,
                          std::optional<std::uint64_t> seed);
};

nlohmann::json to_json(const RunManifest& manifest, bool with_timestamp);
nlohmann::json to_json(const AcceleratorConfig& config);
nlohmann::json to_json(const CostReport& report, bool per_layer,
                       bool dram_energy);
nlohmann::json to_json(const MetricStats& stats);
nlohmann::json to_json(const SearchResult& result);

// Full report documents (manifest included).
nlohmann::json report_document(const CostReport& report,
                               const RunManifest& manifest,
                               const std::string& network, bool per_layer,
                               bool dram_energy);

// Frozen CSV schemas; column orders are documented in the README.
std::string report_csv(const CostReport& report, const RunManifest& manifest,
                       bool per_layer);
std::string trajectory_csv(const SearchResult& result,
                           const RunManifest& manifest,
                           const SearchSpaceDef& space);
std::string compare_csv(const std::vector<std::string>& names,
                        const std::vector<CostReport>& reports,
                        const RunManifest& manifest);

// CSV "# manifest ..." header line (no timestamp, keeps outputs bit-stable).
std::string manifest_csv_line(const RunManifest& manifest);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace oa
