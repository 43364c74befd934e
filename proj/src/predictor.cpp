#include "oa/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "oa/units.hpp"

namespace oa {

namespace {

std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  return (num + den - 1) / den;
}

// ceil(num/den - 1) clamped at 0, in exact integer arithmetic.
std::int64_t ceil_div_minus_one_clamped(std::int64_t num, std::int64_t den) {
  if (num <= den) return 0;
  return ceil_div(num - den, den);
}

struct LayerGeometry {
  std::int64_t ef;      // E*F output pixels
  std::int64_t z2c;     // Z^2 * C inputs per output pixel
  std::int64_t d;       // output channels
  std::int64_t nb;      // device slots per weight
  std::int64_t groups_in;   // ceil(Z^2 C / N)
  std::int64_t groups_out;  // ceil(D * nb / N)
};

LayerGeometry geometry(const LayerShape& layer, const AcceleratorConfig& config,
                       const OcuCharacteristics& ocu) {
  LayerGeometry g;
  g.ef = layer.e * layer.f;
  g.z2c = layer.z * layer.z * layer.c;
  g.d = layer.d;
  g.nb = ocu.mrs_per_weight;
  g.groups_in = ceil_div(g.z2c, config.n);
  g.groups_out = ceil_div(g.d * g.nb, config.n);
  return g;
}

}  // namespace

LayerWorkingSet working_set(const LayerShape& layer,
                            const AcceleratorConfig& config,
                            const TechParams& tech) {
  const auto ocu = ocu_characteristics(config.ocu_type, config.n, config.b, tech);
  const std::int64_t z2c = layer.z * layer.z * layer.c;
  const std::int64_t psum_slots = layer.d * ocu.mrs_per_weight;

  LayerWorkingSet ws;
  ws.q_rf_req = z2c + psum_slots;
  switch (config.mapping.loop_order) {
    case LoopOrder::OutputStationary:
      // tile_d psum working sets staged per round
      ws.q_glb_req = config.mapping.tile_c * z2c +
                     config.mapping.tile_d * psum_slots;
      break;
    case LoopOrder::InputStationary:
      // inputs pinned across rounds, all psum slices of a pixel resident
      ws.q_glb_req = config.mapping.tile_c * z2c + psum_slots;
      break;
  }
  ws.q_dram = layer.h * layer.w * layer.c + z2c * layer.d;
  return ws;
}

double layer_access_energy(const LayerShape& layer,
                           const AcceleratorConfig& config,
                           const TechParams& tech) {
  if (!layer.costed()) return 0.0;
  const auto ocu = ocu_characteristics(config.ocu_type, config.n, config.b, tech);
  const auto g = geometry(layer, config, ocu);
  const std::int64_t ocus = config.k_t * config.k_ocu;

  const double e_input = (tech.e_glb_read + tech.e_rf_read) *
                         static_cast<double>(g.ef * g.z2c * g.groups_out);

  // psum accumulation local to the OCU; E-OCUs keep no stationary weights,
  // so their psum round-trips land on the GLB instead of the RF
  const double psum_unit = ocu.stationary_weights
                               ? tech.e_rf_read + tech.e_rf_write
                               : tech.e_glb_read + tech.e_glb_write;
  const double e_psum_local =
      psum_unit * static_cast<double>(g.ef * g.d * g.nb * g.groups_in);

  const double e_psum_glb =
      (tech.e_glb_read + tech.e_glb_write) *
      static_cast<double>(g.ef * g.d * g.nb *
                          ceil_div_minus_one_clamped(g.groups_in * g.groups_out,
                                                     ocus));

  const double e_output =
      tech.e_glb_write * static_cast<double>(g.ef * g.d);

  double total = e_input + e_psum_local + e_psum_glb + e_output;
  if (!ocu.stationary_weights) {
    // streamed weights travel the same GLB->RF path as inputs, once per
    // 3D output pixel
    total += (tech.e_glb_read + tech.e_rf_read) *
             static_cast<double>(g.ef * g.z2c * g.d);
  }
  return total;
}

double layer_compute_energy(const LayerShape& layer,
                            const AcceleratorConfig& config,
                            const TechParams& tech) {
  if (!layer.costed()) return 0.0;
  const auto ocu = ocu_characteristics(config.ocu_type, config.n, config.b, tech);
  const auto g = geometry(layer, config, ocu);

  const double e_da = (tech.e_da + tech.e_tx) *
                      static_cast<double>(g.ef * g.z2c * g.groups_out);
  const double e_mac = ocu.symbol_energy_scale * (tech.e_r + tech.e_tune) *
                       static_cast<double>(g.ef * g.d * g.nb * g.z2c);
  const double e_ad = (tech.e_rx + tech.e_ad + tech.e_sa) *
                      static_cast<double>(g.ef * g.d * g.nb * g.groups_in);
  return e_da + e_mac + e_ad;
}

double layer_access_latency(const LayerShape& layer,
                            const AcceleratorConfig& config,
                            const TechParams& tech,
                            const LayerWorkingSet& ws) {
  if (!layer.costed()) return 0.0;
  const double ef = static_cast<double>(layer.e * layer.f);
  const double rf_capacity =
      static_cast<double>(config.q_rf * config.k_t * config.k_ocu);
  const double glb_capacity = static_cast<double>(config.q_glb * config.k_t);
  const double q_rf_req = static_cast<double>(ws.q_rf_req);
  const double q_glb_req = static_cast<double>(ws.q_glb_req);
  const double q_dram = static_cast<double>(ws.q_dram);
  auto clamp0 = [](double x) { return x > 0.0 ? x : 0.0; };

  const double l_rf = tech.l_rf * std::min(rf_capacity / q_rf_req, 1.0);

  // GLB serves RF misses plus inter-OCU psum movement; the second term is a
  // hit fraction saturating at 1
  const double l_glb =
      tech.l_glb * (clamp0(std::min(static_cast<double>(config.q_glb),
                                    q_rf_req - rf_capacity)) /
                        q_rf_req +
                    std::min(glb_capacity / q_glb_req, 1.0));

  const double l_dram =
      tech.l_dram *
      (clamp0(std::min(q_dram, q_rf_req - rf_capacity - glb_capacity)) /
           q_rf_req +
       clamp0(std::min(q_dram, q_glb_req - glb_capacity)) / q_glb_req);

  return ef * (l_rf + l_glb + l_dram);
}

double layer_compute_latency(const LayerShape& layer,
                             const AcceleratorConfig& config,
                             const TechParams& tech) {
  if (!layer.costed()) return 0.0;
  const auto ocu = ocu_characteristics(config.ocu_type, config.n, config.b, tech);
  const auto g = geometry(layer, config, ocu);
  const std::int64_t ocus = config.k_t * config.k_ocu;
  const std::int64_t cycles = ceil_div(g.groups_in * g.groups_out, ocus);
  return static_cast<double>(g.ef * cycles * ocu.matvec_latency_symbols) /
         tech.r_r;
}

double area(const AcceleratorConfig& config, const TechParams& tech) {
  const auto ocu = ocu_characteristics(config.ocu_type, config.n, config.b, tech);
  // storage entries are B-bit words; a_rf/a_glb are per byte
  const double bytes_per_entry = static_cast<double>(config.b) / 8.0;
  const double a_rf_total = tech.a_rf * bytes_per_entry *
                            static_cast<double>(config.q_rf) *
                            static_cast<double>(config.k_t * config.k_ocu);
  const double a_glb_total = tech.a_glb * bytes_per_entry *
                             static_cast<double>(config.q_glb) *
                             static_cast<double>(config.k_t);
  const double a_ocu_total = ocu.area_mr_equiv * tech.a_r *
                             static_cast<double>(config.k_t * config.k_ocu);
  return a_rf_total + a_glb_total + a_ocu_total;
}

CostReport network_cost(const DnnModel& model, const AcceleratorConfig& config,
                        const TechParams& tech,
                        const PredictorOptions& options) {
  CostReport report;
  report.layers.reserve(model.layers.size());
  report.macs = count_macs(model);

  for (const auto& layer : model.layers) {
    LayerCost cost;
    cost.kind = layer.kind;
    if (layer.costed()) {
      const auto ws = working_set(layer, config, tech);
      cost.e_mem_pj = layer_access_energy(layer, config, tech);
      cost.e_comp_pj = layer_compute_energy(layer, config, tech);
      cost.l_mem_ns = layer_access_latency(layer, config, tech, ws);
      cost.l_comp_ns = layer_compute_latency(layer, config, tech);
      cost.l_layer_ns = std::max(cost.l_mem_ns, cost.l_comp_ns);
      if (options.include_dram_energy) {
        cost.e_dram_pj =
            tech.e_dram_read * static_cast<double>(ws.q_dram) +
            tech.e_dram_write * static_cast<double>(layer.e * layer.f * layer.d);
      }
      report.energy_pj += cost.e_mem_pj + cost.e_comp_pj;
      report.bottleneck_latency_ns =
          std::max(report.bottleneck_latency_ns, cost.l_layer_ns);
      report.dram_energy_pj += cost.e_dram_pj;
    }
    report.layers.push_back(cost);
  }

  report.area_mm2 = area(config, tech);
  const double latency_s = units::ns_to_seconds(report.bottleneck_latency_ns);
  const double energy_j = units::pj_to_joules(report.energy_pj);
  report.throughput_mac_per_s = static_cast<double>(report.macs) / latency_s;
  report.compute_density_ops_mm2 =
      report.throughput_mac_per_s / report.area_mm2;
  report.ops_per_joule = static_cast<double>(report.macs) / energy_j;
  report.fps = 1.0 / latency_s;
  // steady-state watts = energy per inference * fps, so fps/W = 1/E_J
  report.fps_per_watt = 1.0 / energy_j;
  return report;
}

}  // namespace oa
