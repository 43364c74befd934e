#include "oa/tech.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "oa/textfile.hpp"

namespace oa {

namespace {

std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  return (num + den - 1) / den;
}

}  // namespace

const char* to_string(OcuType type) {
  switch (type) {
    case OcuType::R: return "R";
    case OcuType::E: return "E";
    case OcuType::Z_SVD: return "Z_SVD";
    case OcuType::Z_FFT: return "Z_FFT";
  }
  return "?";
}

OcuType parse_ocu_type(const std::string& text) {
  if (text == "R") return OcuType::R;
  if (text == "E") return OcuType::E;
  if (text == "Z_SVD") return OcuType::Z_SVD;
  if (text == "Z_FFT") return OcuType::Z_FFT;
  throw ParseError("unknown OCU type '" + text + "'");
}

TechParams default_tech() { return TechParams{}; }

void validate(const TechParams& tech) {
  auto require_positive = [](double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument(std::string("tech parameter ") + field +
                                  " must be > 0");
    }
  };
  require_positive(tech.e_rf_read, "e_rf_read");
  require_positive(tech.e_rf_write, "e_rf_write");
  require_positive(tech.e_glb_read, "e_glb_read");
  require_positive(tech.e_glb_write, "e_glb_write");
  require_positive(tech.e_dram_read, "e_dram_read");
  require_positive(tech.e_dram_write, "e_dram_write");
  require_positive(tech.l_rf, "l_rf");
  require_positive(tech.l_glb, "l_glb");
  require_positive(tech.l_dram, "l_dram");
  require_positive(tech.e_tx, "e_tx");
  require_positive(tech.e_rx, "e_rx");
  require_positive(tech.e_r, "e_r");
  require_positive(tech.e_tune, "e_tune");
  require_positive(tech.e_da, "e_da");
  require_positive(tech.e_ad, "e_ad");
  require_positive(tech.e_sa, "e_sa");
  require_positive(tech.r_r, "r_r");
  require_positive(tech.a_r, "a_r");
  require_positive(tech.a_rf, "a_rf");
  require_positive(tech.a_glb, "a_glb");
  if (tech.n_b < 1) {
    throw std::invalid_argument("tech parameter n_b must be >= 1");
  }
  if (tech.alpha < 1.0) {
    throw std::invalid_argument("tech parameter alpha must be >= 1");
  }
  if (tech.beta < 1.0) {
    throw std::invalid_argument("tech parameter beta must be >= 1");
  }
}

TechParams load_tech(const std::string& path) {
  TechParams tech = default_tech();
  std::map<std::string, std::function<void(double)>> setters = {
      {"e_rf_read", [&](double v) { tech.e_rf_read = v; }},
      {"e_rf_write", [&](double v) { tech.e_rf_write = v; }},
      {"e_glb_read", [&](double v) { tech.e_glb_read = v; }},
      {"e_glb_write", [&](double v) { tech.e_glb_write = v; }},
      {"e_dram_read", [&](double v) { tech.e_dram_read = v; }},
      {"e_dram_write", [&](double v) { tech.e_dram_write = v; }},
      {"l_rf", [&](double v) { tech.l_rf = v; }},
      {"l_glb", [&](double v) { tech.l_glb = v; }},
      {"l_dram", [&](double v) { tech.l_dram = v; }},
      {"e_tx", [&](double v) { tech.e_tx = v; }},
      {"e_rx", [&](double v) { tech.e_rx = v; }},
      {"e_r", [&](double v) { tech.e_r = v; }},
      {"e_tune", [&](double v) { tech.e_tune = v; }},
      {"e_da", [&](double v) { tech.e_da = v; }},
      {"e_ad", [&](double v) { tech.e_ad = v; }},
      {"e_sa", [&](double v) { tech.e_sa = v; }},
      {"r_r", [&](double v) { tech.r_r = v; }},
      {"a_r", [&](double v) { tech.a_r = v; }},
      {"a_rf", [&](double v) { tech.a_rf = v; }},
      {"a_glb", [&](double v) { tech.a_glb = v; }},
      {"alpha", [&](double v) { tech.alpha = v; }},
      {"beta", [&](double v) { tech.beta = v; }},
      {"n_b",
       [&](double v) { tech.n_b = static_cast<std::int64_t>(std::llround(v)); }},
  };
  for (const auto& line : textfile::read_lines(path)) {
    const std::string where = path + ":" + std::to_string(line.number);
    if (line.tokens.size() != 2) {
      throw ParseError(where + ": expected '<key> <value>'");
    }
    auto it = setters.find(line.tokens[0]);
    if (it == setters.end()) {
      throw ParseError(where + ": unknown key '" + line.tokens[0] + "'");
    }
    double value =
        textfile::parse_double(line.tokens[1], where + " key " + line.tokens[0]);
    if (!(value > 0.0)) {
      throw ParseError(where + ": key " + line.tokens[0] + " must be > 0");
    }
    it->second(value);
  }
  try {
    validate(tech);
  } catch (const std::invalid_argument& err) {
    throw ParseError(path + ": " + err.what());
  }
  return tech;
}

OcuCharacteristics ocu_characteristics(OcuType type, std::int64_t n,
                                       std::int64_t b,
                                       const TechParams& tech) {
  if (n < 2) {
    throw std::invalid_argument("OCU port count N must be >= 2, got " +
                                std::to_string(n));
  }
  if (b < 1) {
    throw std::invalid_argument("operand precision B must be >= 1, got " +
                                std::to_string(b));
  }
  OcuCharacteristics ocu;
  ocu.type = type;
  const double mesh = static_cast<double>(n) * static_cast<double>(n - 1);
  switch (type) {
    case OcuType::R: {
      // spatially-multiplexed micro-resonator array, one matvec per symbol
      const std::int64_t slices = ceil_div(b, tech.n_b);
      ocu.wavelengths = slices;
      ocu.power_units = static_cast<double>(n * n * slices);
      ocu.matvec_latency_symbols = 1;
      ocu.area_mr_equiv = static_cast<double>(n * n * slices);
      ocu.mrs_per_weight = slices;
      ocu.symbol_energy_scale = 1.0;
      ocu.stationary_weights = true;
      break;
    }
    case OcuType::E:
      // single modulator, time/wavelength interleaved, weights streamed
      ocu.wavelengths = n * n * b;
      ocu.power_units = tech.beta;
      ocu.matvec_latency_symbols = n * b;
      ocu.area_mr_equiv = tech.alpha;
      ocu.mrs_per_weight = 1;
      ocu.symbol_energy_scale = tech.beta;
      ocu.stationary_weights = false;
      break;
    case OcuType::Z_SVD:
      ocu.wavelengths = 1;
      ocu.power_units = tech.beta * mesh;
      ocu.matvec_latency_symbols = 1;
      ocu.area_mr_equiv = tech.alpha * mesh;
      ocu.mrs_per_weight = 1;
      ocu.symbol_energy_scale = tech.beta;
      ocu.stationary_weights = true;
      break;
    case OcuType::Z_FFT:
      // butterfly mesh, ~4x the area efficiency of the SVD layout
      ocu.wavelengths = 1;
      ocu.power_units = tech.beta * mesh;
      ocu.matvec_latency_symbols = 1;
      ocu.area_mr_equiv = tech.alpha / 4.0 * mesh;
      ocu.mrs_per_weight = 1;
      ocu.symbol_energy_scale = tech.beta;
      ocu.stationary_weights = true;
      break;
  }
  return ocu;
}

}  // namespace oa
