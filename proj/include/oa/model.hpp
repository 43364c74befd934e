#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace oa {

// Conv and Fc layers drive the cost model. Pool/Act rows are carried for
// topology fidelity but contribute zero cost everywhere.
enum class LayerKind { Conv, Fc, Pool, Act };

const char* to_string(LayerKind kind);

struct LayerShape {
  LayerKind kind = LayerKind::Conv;
  std::int64_t c = 1;  // input channels
  std::int64_t d = 1;  // output channels
  std::int64_t h = 1;  // input feature-map height
  std::int64_t w = 1;  // input feature-map width
  std::int64_t z = 1;  // square kernel size
  std::int64_t s = 1;  // stride
  std::int64_t p = 0;  // symmetric zero padding
  std::int64_t e = 1;  // output height (derived)
  std::int64_t f = 1;  // output width (derived)

  bool costed() const { return kind == LayerKind::Conv || kind == LayerKind::Fc; }
};

struct DnnModel {
  std::string name;
  std::vector<LayerShape> layers;  // all rows, in file order, inert rows included

  std::size_t costed_layers() const;
  // Compact counts summary, e.g. "3C,2P,2F".
  std::string topology() const;
};

// Output feature-map dims for a conv layer: floor((in + 2P - Z)/S) + 1.
// Throws std::invalid_argument if either derived dim is < 1.
std::pair<std::int64_t, std::int64_t> derive_output_dims(const LayerShape& layer);

// Loads a network file (see configs/networks/*.net), derives E/F and
// normalizes Fc rows. Throws ParseError with file:line diagnostics.
DnnModel load_network(const std::string& path);

// Total multiply-accumulates over Conv/Fc rows: sum of E*F*D*Z^2*C.
std::int64_t count_macs(const DnnModel& model);
std::int64_t count_macs(const LayerShape& layer);

}  // namespace oa
