#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oa/tech.hpp"

namespace oa {

// Which operand class the GLB keeps resident across a round; selects the
// GLB working-set formula in the predictor.
enum class LoopOrder { OutputStationary, InputStationary };

const char* to_string(LoopOrder order);
LoopOrder parse_loop_order(const std::string& text);

struct MappingChoice {
  LoopOrder loop_order = LoopOrder::OutputStationary;
  std::int64_t tile_d = 1;  // staged psum working sets per GLB round
  std::int64_t tile_c = 1;  // staged input working sets per GLB round

  bool operator==(const MappingChoice& other) const = default;
};

// One point in the accelerator design space.
struct AcceleratorConfig {
  std::int64_t k_t = 1;     // tiles per accelerator
  std::int64_t k_ocu = 1;   // OCUs per tile
  OcuType ocu_type = OcuType::R;
  std::int64_t n = 8;       // OCU port count (N x N)
  std::int64_t q_rf = 16;   // register-file entries per OCU
  std::int64_t q_glb = 4096;  // global-buffer entries per tile
  std::int64_t b = 8;       // operand precision (bits)
  MappingChoice mapping;

  bool operator==(const AcceleratorConfig& other) const = default;
};

// Structural invariants (k_t,k_ocu,n,q_rf,q_glb >= 1, b in 1..16, tiles >= 1).
// Throws std::invalid_argument naming the field.
void validate_fields(const AcceleratorConfig& config);

// Stable text key, also used for hashing/dedup.
std::string config_key(const AcceleratorConfig& config);

AcceleratorConfig load_config(const std::string& path);
void save_config(const AcceleratorConfig& config, const std::string& path);

// Explicit finite candidate lists, one per design dimension.
struct SearchSpaceDef {
  std::vector<std::int64_t> k_t{1};
  std::vector<std::int64_t> k_ocu{1};
  std::vector<OcuType> ocu_type{OcuType::R};
  std::vector<std::int64_t> n{8};
  std::vector<std::int64_t> q_rf{16};
  std::vector<std::int64_t> q_glb{4096};
  std::vector<std::int64_t> b{8};
  std::vector<LoopOrder> loop_order{LoopOrder::OutputStationary};
  std::vector<std::int64_t> tile_d{1};
  std::vector<std::int64_t> tile_c{1};
  std::optional<double> area_cap;  // mm^2

  static constexpr std::size_t kDims = 10;
  static const std::array<const char*, kDims>& dim_names();

  std::size_t dim_size(std::size_t dim) const;
  // Human-readable value label for dimension `dim`, choice `idx`.
  std::string value_name(std::size_t dim, std::size_t idx) const;
  // Builds the config selected by one choice index per dimension.
  AcceleratorConfig config_at(const std::array<std::size_t, kDims>& idx) const;
  // Exact cartesian product of the list lengths.
  unsigned __int128 cardinality() const;
};

std::string format_u128(unsigned __int128 value);

SearchSpaceDef load_space(const std::string& path);

// Throws std::invalid_argument if any dimension's value list is empty.
void check_space(const SearchSpaceDef& space);

struct Violation {
  std::string dimension;
  std::string message;
};

// Membership of every field in its admissible list, plus the area cap when
// set. Returns an empty list when the config is admissible; never throws
// for out-of-space values.
std::vector<Violation> validate(const AcceleratorConfig& config,
                                const SearchSpaceDef& space,
                                const TechParams& tech);

// Deterministic lexicographic enumeration over the dimension order of
// dim_names() (last dimension fastest). Throws std::length_error carrying
// the exact cardinality if it exceeds `limit`.
void enumerate(const SearchSpaceDef& space, std::uint64_t limit,
               const std::function<void(const AcceleratorConfig&)>& visit);

std::vector<AcceleratorConfig> enumerate_all(const SearchSpaceDef& space,
                                             std::uint64_t limit);

}  // namespace oa
