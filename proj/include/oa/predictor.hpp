#pragma once

#include <cstdint>
#include <vector>

#include "oa/arch.hpp"
#include "oa/model.hpp"
#include "oa/tech.hpp"

namespace oa {

// Entry counts the memory hierarchy must serve to produce output pixels of
// one layer. A "3D output pixel" is one (e,f) position across all D output
// channels.
struct LayerWorkingSet {
  std::int64_t q_rf_req = 0;   // RF entries per 3D output pixel
  std::int64_t q_glb_req = 0;  // GLB-resident entries per round
  std::int64_t q_dram = 0;     // first-touch DRAM transfers for the layer
};

struct LayerCost {
  LayerKind kind = LayerKind::Conv;
  double e_mem_pj = 0.0;
  double e_comp_pj = 0.0;
  double l_mem_ns = 0.0;
  double l_comp_ns = 0.0;
  double l_layer_ns = 0.0;  // max(l_mem, l_comp)
  double e_dram_pj = 0.0;   // optional extra, see PredictorOptions
};

struct CostReport {
  std::vector<LayerCost> layers;  // one row per model row, inert rows zeroed
  std::int64_t macs = 0;
  double energy_pj = 0.0;              // sum of e_mem + e_comp over layers
  double bottleneck_latency_ns = 0.0;  // max over costed layers of l_layer
  double throughput_mac_per_s = 0.0;   // macs / bottleneck latency
  double area_mm2 = 0.0;
  // derived figures of merit
  double compute_density_ops_mm2 = 0.0;  // throughput / area
  double ops_per_joule = 0.0;            // macs / total energy
  double fps = 0.0;                      // 1 / bottleneck latency
  double fps_per_watt = 0.0;             // fps / steady-state watts
  double dram_energy_pj = 0.0;           // populated only when requested
};

struct PredictorOptions {
  // DRAM access energy is not part of the access-energy model; when true it
  // is reported as a separate additive field, never folded into energy_pj.
  bool include_dram_energy = false;
};

// Entry demand at each memory level for one layer under a mapping. The GLB
// formula depends on the loop order:
//   OutputStationary: tile_c*Z^2*C + tile_d*D*N_b
//   InputStationary:  tile_c*Z^2*C + D*N_b      (all psum slices resident)
LayerWorkingSet working_set(const LayerShape& layer,
                            const AcceleratorConfig& config,
                            const TechParams& tech);

// Data access energy: input reads, psum traffic at RF (GLB path for E-OCUs,
// which keep no weights stationary and additionally stream weights per
// output pixel), inter-OCU psum traffic at GLB, and output writes.
double layer_access_energy(const LayerShape& layer,
                           const AcceleratorConfig& config,
                           const TechParams& tech);

// Data computation energy: D/A + E/O conversion, per-symbol MAC + tuning
// (scaled by the MZI/EOM energy ratio for E/Z types), O/E + A/D + shift-add.
double layer_compute_energy(const LayerShape& layer,
                            const AcceleratorConfig& config,
                            const TechParams& tech);

// Average access time over the RF/GLB/DRAM hierarchy, hit fractions taken
// against the working set; capacity surpluses clamp to zero miss traffic.
double layer_access_latency(const LayerShape& layer,
                            const AcceleratorConfig& config,
                            const TechParams& tech,
                            const LayerWorkingSet& ws);

// Symbol time per 3D output pixel times E*F, divided by the MR symbol rate;
// E-OCUs pay N*B symbol times per matvec.
double layer_compute_latency(const LayerShape& layer,
                             const AcceleratorConfig& config,
                             const TechParams& tech);

// Chip area: RF + GLB storage (entries are B-bit words) plus OCU arrays.
double area(const AcceleratorConfig& config, const TechParams& tech);

// Whole-network roll-up with layer-wise pipelining: energies add, the
// slowest layer bounds throughput.
CostReport network_cost(const DnnModel& model, const AcceleratorConfig& config,
                        const TechParams& tech,
                        const PredictorOptions& options = {});

}  // namespace oa
