#include "oa/model.hpp"

#include <map>
#include <stdexcept>

#include "oa/textfile.hpp"

namespace oa {

namespace {

std::string layer_where(const std::string& path, int line_number) {
  return path + ":" + std::to_string(line_number);
}

LayerKind parse_kind(const std::string& text, const std::string& where) {
  if (text == "conv") return LayerKind::Conv;
  if (text == "fc") return LayerKind::Fc;
  if (text == "pool") return LayerKind::Pool;
  if (text == "act") return LayerKind::Act;
  throw ParseError(where + ": unknown layer kind '" + text + "'");
}

void check_positive(std::int64_t value, const char* field,
                    const std::string& where) {
  if (value < 1) {
    throw ParseError(where + ": field " + field + " must be >= 1, got " +
                     std::to_string(value));
  }
}

}  // namespace

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::Fc: return "fc";
    case LayerKind::Pool: return "pool";
    case LayerKind::Act: return "act";
  }
  return "?";
}

std::size_t DnnModel::costed_layers() const {
  std::size_t count = 0;
  for (const auto& layer : layers) {
    if (layer.costed()) ++count;
  }
  return count;
}

std::string DnnModel::topology() const {
  std::size_t convs = 0, pools = 0, fcs = 0;
  for (const auto& layer : layers) {
    switch (layer.kind) {
      case LayerKind::Conv: ++convs; break;
      case LayerKind::Pool: ++pools; break;
      case LayerKind::Fc: ++fcs; break;
      case LayerKind::Act: break;
    }
  }
  return std::to_string(convs) + "C," + std::to_string(pools) + "P," +
         std::to_string(fcs) + "F";
}

std::pair<std::int64_t, std::int64_t> derive_output_dims(
    const LayerShape& layer) {
  std::int64_t e = (layer.h + 2 * layer.p - layer.z) / layer.s + 1;
  std::int64_t f = (layer.w + 2 * layer.p - layer.z) / layer.s + 1;
  if (e < 1 || f < 1) {
    throw std::invalid_argument(
        "derived output dims must be >= 1 (E=" + std::to_string(e) +
        ", F=" + std::to_string(f) + " for H=" + std::to_string(layer.h) +
        " W=" + std::to_string(layer.w) + " Z=" + std::to_string(layer.z) +
        " S=" + std::to_string(layer.s) + " P=" + std::to_string(layer.p) +
        ")");
  }
  return {e, f};
}

DnnModel load_network(const std::string& path) {
  DnnModel model;
  bool saw_name = false;
  for (const auto& line : textfile::read_lines(path)) {
    const std::string where = layer_where(path, line.number);
    const std::string& head = line.tokens.front();
    if (head == "name") {
      if (line.tokens.size() != 2) {
        throw ParseError(where + ": expected 'name <identifier>'");
      }
      model.name = line.tokens[1];
      saw_name = true;
      continue;
    }
    if (head != "layer") {
      throw ParseError(where + ": expected 'name' or 'layer', got '" + head +
                       "'");
    }
    if (line.tokens.size() < 2) {
      throw ParseError(where + ": layer row needs a kind");
    }
    LayerShape layer;
    layer.kind = parse_kind(line.tokens[1], where);

    std::map<std::string, std::int64_t> fields;
    for (std::size_t i = 2; i < line.tokens.size(); ++i) {
      std::string key, value;
      if (!textfile::split_kv(line.tokens[i], key, value)) {
        throw ParseError(where + ": expected key=value, got '" +
                         line.tokens[i] + "'");
      }
      fields[key] = textfile::parse_int(value, where + " field " + key);
    }
    auto take = [&](const char* key, std::int64_t fallback,
                    bool required) -> std::int64_t {
      auto it = fields.find(key);
      if (it == fields.end()) {
        if (required) {
          throw ParseError(where + ": missing required field " +
                           std::string(key));
        }
        return fallback;
      }
      std::int64_t value = it->second;
      fields.erase(it);
      return value;
    };

    switch (layer.kind) {
      case LayerKind::Conv:
        layer.c = take("C", 1, true);
        layer.d = take("D", 1, true);
        layer.h = take("H", 1, true);
        layer.w = take("W", 1, true);
        layer.z = take("Z", 1, true);
        layer.s = take("S", 1, false);
        layer.p = take("P", 0, false);
        break;
      case LayerKind::Fc:
        layer.c = take("C", 1, true);
        layer.d = take("D", 1, true);
        // any geometry fields are normalized to a 1x1 conv on a 1x1 map
        for (const char* key : {"H", "W", "Z", "S", "P"}) take(key, 0, false);
        layer.h = layer.w = layer.z = layer.s = 1;
        layer.p = 0;
        break;
      case LayerKind::Pool:
        layer.c = take("C", 1, true);
        layer.d = take("D", layer.c, false);  // pooling keeps channels
        layer.h = take("H", 1, true);
        layer.w = take("W", layer.h, false);
        layer.z = take("Z", 1, true);
        layer.s = take("S", layer.z, false);
        layer.p = take("P", 0, false);
        break;
      case LayerKind::Act:
        layer.c = take("C", 1, false);
        layer.d = layer.c;
        break;
    }
    if (!fields.empty()) {
      throw ParseError(where + ": unknown field " + fields.begin()->first);
    }

    check_positive(layer.c, "C", where);
    check_positive(layer.d, "D", where);
    check_positive(layer.h, "H", where);
    check_positive(layer.w, "W", where);
    check_positive(layer.z, "Z", where);
    check_positive(layer.s, "S", where);
    if (layer.p < 0) {
      throw ParseError(where + ": field P must be >= 0");
    }

    if (layer.kind == LayerKind::Fc || layer.kind == LayerKind::Act) {
      layer.e = layer.f = 1;
    } else {
      try {
        std::tie(layer.e, layer.f) = derive_output_dims(layer);
      } catch (const std::invalid_argument& err) {
        throw ParseError(where + ": " + err.what());
      }
    }
    model.layers.push_back(layer);
  }
  if (!saw_name) {
    throw ParseError(path + ": missing 'name' line");
  }
  if (model.layers.empty()) {
    throw ParseError(path + ": network has no layers");
  }
  return model;
}

std::int64_t count_macs(const LayerShape& layer) {
  if (!layer.costed()) return 0;
  return layer.e * layer.f * layer.d * layer.z * layer.z * layer.c;
}

std::int64_t count_macs(const DnnModel& model) {
  std::int64_t total = 0;
  for (const auto& layer : model.layers) {
    total += count_macs(layer);
  }
  return total;
}

}  // namespace oa
