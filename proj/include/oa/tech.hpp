#pragma once

#include <cstdint>
#include <string>

namespace oa {

// Optical convolution unit families. R = micro-resonator arrays,
// E = electro-optical modulator (time/wavelength interleaved, weights not
// stationary), Z = Mach-Zehnder interferometer meshes in SVD or FFT layout.
enum class OcuType { R, E, Z_SVD, Z_FFT };

const char* to_string(OcuType type);
OcuType parse_ocu_type(const std::string& text);

// Unit energies/latencies/areas/rates for the memories and optical devices.
// Values shipped in configs/tech/default.tech are illustrative process
// numbers, documented there; every field must stay strictly positive.
struct TechParams {
  // memory unit energies (pJ per access)
  double e_rf_read = 0.05;
  double e_rf_write = 0.06;
  double e_glb_read = 1.2;
  double e_glb_write = 1.4;
  double e_dram_read = 100.0;
  double e_dram_write = 120.0;
  // absolute hit latencies (ns per access)
  double l_rf = 0.3;
  double l_glb = 1.5;
  double l_dram = 50.0;
  // optical device unit energies (pJ)
  double e_tx = 0.3;    // transmitter (laser/comb line)
  double e_rx = 0.4;    // receiver (photodetector)
  double e_r = 0.06;    // per-symbol energy of one MR
  double e_tune = 0.04; // MR tuning
  double e_da = 0.2;    // D/A conversion
  double e_ad = 0.8;    // A/D conversion
  double e_sa = 0.1;    // shift-and-add
  // rates and areas
  double r_r = 5.0;      // MR symbol rate (symbols/ns)
  double a_r = 4e-4;     // area of one MR (mm^2)
  double a_rf = 5e-6;    // register-file area (mm^2 per byte)
  double a_glb = 2.4e-6; // global-buffer area (mm^2 per byte)
  // MZI/EOM-to-MR conversion ratios (dimensionless, >= 1)
  double alpha = 25.0;   // area ratio
  double beta = 10.0;    // energy ratio
  // multi-bit capability of one MR (bits)
  std::int64_t n_b = 1;
};

// Baseline parameter set (same values as the shipped default file).
TechParams default_tech();

// Loads a technology file as an overlay on default_tech(): listed keys
// replace defaults, everything else keeps its default. Unknown keys and
// non-positive values are rejected with a ParseError naming the key.
TechParams load_tech(const std::string& path);

// Validates positivity/ratio invariants; throws std::invalid_argument
// naming the first offending field.
void validate(const TechParams& tech);

// Characteristics of one OCU processing a [1,N] x [N,N] matrix-vector
// product at operand precision B, with device counts expressed in
// MR equivalents.
struct OcuCharacteristics {
  OcuType type = OcuType::R;
  std::int64_t wavelengths = 1;          // wavelength channels used
  double power_units = 1.0;              // MR-equivalent energy units
  std::int64_t matvec_latency_symbols = 1;  // symbol times per matvec
  double area_mr_equiv = 1.0;            // MR equivalents
  std::int64_t mrs_per_weight = 1;       // device slots mapping one weight
  double symbol_energy_scale = 1.0;      // multiplies (e_r + e_tune)
  bool stationary_weights = true;
};

// Pure table lookup. R rows follow the spatially-multiplexed micro-resonator
// organization; Z rows need N >= 2 (the mesh degenerates below that).
// Throws std::invalid_argument on bad N/B.
OcuCharacteristics ocu_characteristics(OcuType type, std::int64_t n,
                                       std::int64_t b, const TechParams& tech);

}  // namespace oa
