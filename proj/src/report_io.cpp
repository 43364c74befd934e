#include "oa/report_io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "oa/version.hpp"

namespace oa {

namespace {

std::string iso_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

// JSON has no infinity; encode the hard-reject sentinel as a string.
nlohmann::json json_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  return value;
}

std::string csv_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

}  // namespace

RunManifest RunManifest::make(const std::string& command,
                              const std::vector<std::string>& inputs,
                              std::optional<std::uint64_t> seed) {
  RunManifest manifest;
  manifest.command = command;
  manifest.inputs = inputs;
  manifest.seed = seed;
  manifest.tool_version = kToolVersion;
  manifest.timestamp = iso_utc_now();
  return manifest;
}

nlohmann::json to_json(const RunManifest& manifest, bool with_timestamp) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["inputs"] = manifest.inputs;
  if (manifest.seed) j["seed"] = *manifest.seed;
  j["tool_version"] = manifest.tool_version;
  if (with_timestamp) j["timestamp"] = manifest.timestamp;
  return j;
}

nlohmann::json to_json(const AcceleratorConfig& config) {
  nlohmann::json j;
  j["k_t"] = config.k_t;
  j["k_ocu"] = config.k_ocu;
  j["ocu_type"] = to_string(config.ocu_type);
  j["n"] = config.n;
  j["q_rf"] = config.q_rf;
  j["q_glb"] = config.q_glb;
  j["b"] = config.b;
  j["loop_order"] = to_string(config.mapping.loop_order);
  j["tile_d"] = config.mapping.tile_d;
  j["tile_c"] = config.mapping.tile_c;
  return j;
}

nlohmann::json to_json(const CostReport& report, bool per_layer,
                       bool dram_energy) {
  nlohmann::json j;
  j["macs"] = report.macs;
  nlohmann::json totals;
  totals["energy_pj"] = report.energy_pj;
  totals["bottleneck_latency_ns"] = report.bottleneck_latency_ns;
  totals["throughput_mac_per_s"] = report.throughput_mac_per_s;
  totals["area_mm2"] = report.area_mm2;
  if (dram_energy) totals["dram_energy_pj"] = report.dram_energy_pj;
  j["totals"] = totals;
  nlohmann::json derived;
  derived["compute_density_ops_mm2"] = report.compute_density_ops_mm2;
  derived["ops_per_joule"] = report.ops_per_joule;
  derived["fps"] = report.fps;
  derived["fps_per_watt"] = report.fps_per_watt;
  j["derived"] = derived;
  if (per_layer) {
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t i = 0; i < report.layers.size(); ++i) {
      const auto& layer = report.layers[i];
      nlohmann::json row;
      row["index"] = i + 1;
      row["kind"] = to_string(layer.kind);
      row["e_mem_pj"] = layer.e_mem_pj;
      row["e_comp_pj"] = layer.e_comp_pj;
      row["l_mem_ns"] = layer.l_mem_ns;
      row["l_comp_ns"] = layer.l_comp_ns;
      row["l_layer_ns"] = layer.l_layer_ns;
      if (dram_energy) row["e_dram_pj"] = layer.e_dram_pj;
      layers.push_back(row);
    }
    j["per_layer"] = layers;
  }
  return j;
}

nlohmann::json to_json(const MetricStats& stats) {
  nlohmann::json j;
  j["mean_energy_pj"] = stats.mean_energy_pj;
  j["mean_area_mm2"] = stats.mean_area_mm2;
  j["mean_ops_per_joule"] = stats.mean_ops_per_joule;
  j["count"] = stats.count;
  return j;
}

nlohmann::json to_json(const SearchResult& result) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["success"] = result.success;
  if (!result.success) j["failure_reason"] = result.failure_reason;
  j["seed"] = result.seed;
  j["evaluations"] = result.evaluations;
  j["infeasible_steps"] = result.infeasible_steps;
  j["wall_clock_s"] = result.wall_clock_s;
  j["objective_scale"] = to_json(result.stats);
  if (result.success) {
    nlohmann::json best;
    best["config"] = to_json(result.best_config);
    best["objective"] = result.best_objective;
    best["report"] = to_json(result.best_report, false, false);
    j["best"] = best;
    nlohmann::json final_design;
    final_design["config"] = to_json(result.final_design);
    final_design["objective"] = json_number(result.final_design_objective);
    final_design["feasible"] = result.final_design_feasible;
    j["final_design"] = final_design;
  }
  nlohmann::json gamma = nlohmann::json::array();
  for (const auto& row : result.final_gamma.logits) {
    gamma.push_back(row);
  }
  j["gamma"] = gamma;
  j["trajectory_points"] = result.trajectory.size();
  return j;
}

nlohmann::json report_document(const CostReport& report,
                               const RunManifest& manifest,
                               const std::string& network, bool per_layer,
                               bool dram_energy) {
  nlohmann::json j = to_json(report, per_layer, dram_energy);
  j["schema_version"] = kSchemaVersion;
  j["network"] = network;
  j["manifest"] = to_json(manifest, true);
  return j;
}

std::string manifest_csv_line(const RunManifest& manifest) {
  // timestamp deliberately omitted so fixed-seed outputs are byte-stable
  return "# manifest " + to_json(manifest, false).dump();
}

std::string report_csv(const CostReport& report, const RunManifest& manifest,
                       bool per_layer) {
  std::ostringstream out;
  out << manifest_csv_line(manifest) << "\n";
  out << "row,layer,kind,e_mem_pj,e_comp_pj,l_mem_ns,l_comp_ns,l_layer_ns,"
         "energy_pj,bottleneck_latency_ns,throughput_mac_per_s,area_mm2,"
         "compute_density_ops_mm2,ops_per_joule,fps,fps_per_watt\n";
  if (per_layer) {
    for (std::size_t i = 0; i < report.layers.size(); ++i) {
      const auto& layer = report.layers[i];
      out << "layer," << (i + 1) << ',' << to_string(layer.kind) << ','
          << csv_double(layer.e_mem_pj) << ',' << csv_double(layer.e_comp_pj)
          << ',' << csv_double(layer.l_mem_ns) << ','
          << csv_double(layer.l_comp_ns) << ',' << csv_double(layer.l_layer_ns)
          << ",,,,,,,,\n";
    }
  }
  out << "total,,,,,,,," << csv_double(report.energy_pj) << ','
      << csv_double(report.bottleneck_latency_ns) << ','
      << csv_double(report.throughput_mac_per_s) << ','
      << csv_double(report.area_mm2) << ','
      << csv_double(report.compute_density_ops_mm2) << ','
      << csv_double(report.ops_per_joule) << ',' << csv_double(report.fps)
      << ',' << csv_double(report.fps_per_watt) << "\n";
  return out.str();
}

std::string trajectory_csv(const SearchResult& result,
                           const RunManifest& manifest,
                           const SearchSpaceDef&) {
  std::ostringstream out;
  out << manifest_csv_line(manifest) << "\n";
  out << "step,sampled_objective,best_so_far";
  for (std::size_t dim = 0; dim < SearchSpaceDef::kDims; ++dim) {
    out << ",entropy_" << SearchSpaceDef::dim_names()[dim];
  }
  out << "\n";
  for (const auto& point : result.trajectory) {
    out << point.step << ',' << csv_double(point.sampled_objective) << ','
        << csv_double(point.best_so_far);
    for (std::size_t dim = 0; dim < SearchSpaceDef::kDims; ++dim) {
      out << ',';
      if (dim < point.entropy.size()) out << csv_double(point.entropy[dim]);
    }
    out << "\n";
  }
  return out.str();
}

std::string compare_csv(const std::vector<std::string>& names,
                        const std::vector<CostReport>& reports,
                        const RunManifest& manifest) {
  std::ostringstream out;
  out << manifest_csv_line(manifest) << "\n";
  out << "config,energy_pj,bottleneck_latency_ns,throughput_mac_per_s,"
         "area_mm2,compute_density_ops_mm2,ops_per_joule,fps,fps_per_watt\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& report = reports[i];
    out << names[i] << ',' << csv_double(report.energy_pj) << ','
        << csv_double(report.bottleneck_latency_ns) << ','
        << csv_double(report.throughput_mac_per_s) << ','
        << csv_double(report.area_mm2) << ','
        << csv_double(report.compute_density_ops_mm2) << ','
        << csv_double(report.ops_per_joule) << ',' << csv_double(report.fps)
        << ',' << csv_double(report.fps_per_watt) << "\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << content;
}

}  // namespace oa
