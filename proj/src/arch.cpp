#include "oa/arch.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "oa/predictor.hpp"
#include "oa/textfile.hpp"

namespace oa {

const char* to_string(LoopOrder order) {
  switch (order) {
    case LoopOrder::OutputStationary: return "output_stationary";
    case LoopOrder::InputStationary: return "input_stationary";
  }
  return "?";
}

LoopOrder parse_loop_order(const std::string& text) {
  if (text == "output_stationary") return LoopOrder::OutputStationary;
  if (text == "input_stationary") return LoopOrder::InputStationary;
  throw ParseError("unknown loop order '" + text + "'");
}

void validate_fields(const AcceleratorConfig& config) {
  auto require_min = [](std::int64_t value, std::int64_t min,
                        const char* field) {
    if (value < min) {
      throw std::invalid_argument(std::string("config field ") + field +
                                  " must be >= " + std::to_string(min) +
                                  ", got " + std::to_string(value));
    }
  };
  require_min(config.k_t, 1, "k_t");
  require_min(config.k_ocu, 1, "k_ocu");
  require_min(config.n, 1, "n");
  require_min(config.q_rf, 1, "q_rf");
  require_min(config.q_glb, 1, "q_glb");
  require_min(config.mapping.tile_d, 1, "tile_d");
  require_min(config.mapping.tile_c, 1, "tile_c");
  if (config.b < 1 || config.b > 16) {
    throw std::invalid_argument("config field b must be in 1..16, got " +
                                std::to_string(config.b));
  }
}

std::string config_key(const AcceleratorConfig& config) {
  std::ostringstream key;
  key << config.k_t << '/' << config.k_ocu << '/' << to_string(config.ocu_type)
      << '/' << config.n << '/' << config.q_rf << '/' << config.q_glb << '/'
      << config.b << '/' << to_string(config.mapping.loop_order) << '/'
      << config.mapping.tile_d << '/' << config.mapping.tile_c;
  return key.str();
}

AcceleratorConfig load_config(const std::string& path) {
  AcceleratorConfig config;
  std::set<std::string> seen;
  for (const auto& line : textfile::read_lines(path)) {
    const std::string where = path + ":" + std::to_string(line.number);
    if (line.tokens.size() != 2) {
      throw ParseError(where + ": expected '<key> <value>'");
    }
    const std::string& key = line.tokens[0];
    const std::string& value = line.tokens[1];
    if (!seen.insert(key).second) {
      throw ParseError(where + ": duplicate key '" + key + "'");
    }
    try {
      if (key == "k_t") config.k_t = textfile::parse_int(value, where);
      else if (key == "k_ocu") config.k_ocu = textfile::parse_int(value, where);
      else if (key == "ocu_type") config.ocu_type = parse_ocu_type(value);
      else if (key == "n") config.n = textfile::parse_int(value, where);
      else if (key == "q_rf") config.q_rf = textfile::parse_int(value, where);
      else if (key == "q_glb") config.q_glb = textfile::parse_int(value, where);
      else if (key == "b") config.b = textfile::parse_int(value, where);
      else if (key == "loop_order")
        config.mapping.loop_order = parse_loop_order(value);
      else if (key == "tile_d")
        config.mapping.tile_d = textfile::parse_int(value, where);
      else if (key == "tile_c")
        config.mapping.tile_c = textfile::parse_int(value, where);
      else throw ParseError(where + ": unknown key '" + key + "'");
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& err) {
      throw ParseError(where + ": " + err.what());
    }
  }
  try {
    validate_fields(config);
  } catch (const std::invalid_argument& err) {
    throw ParseError(path + ": " + err.what());
  }
  return config;
}

void save_config(const AcceleratorConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << "k_t " << config.k_t << "\n"
      << "k_ocu " << config.k_ocu << "\n"
      << "ocu_type " << to_string(config.ocu_type) << "\n"
      << "n " << config.n << "\n"
      << "q_rf " << config.q_rf << "\n"
      << "q_glb " << config.q_glb << "\n"
      << "b " << config.b << "\n"
      << "loop_order " << to_string(config.mapping.loop_order) << "\n"
      << "tile_d " << config.mapping.tile_d << "\n"
      << "tile_c " << config.mapping.tile_c << "\n";
}

const std::array<const char*, SearchSpaceDef::kDims>&
SearchSpaceDef::dim_names() {
  static const std::array<const char*, kDims> names = {
      "k_t", "k_ocu", "ocu_type", "n",      "q_rf",
      "q_glb", "b",   "loop_order", "tile_d", "tile_c"};
  return names;
}

std::size_t SearchSpaceDef::dim_size(std::size_t dim) const {
  switch (dim) {
    case 0: return k_t.size();
    case 1: return k_ocu.size();
    case 2: return ocu_type.size();
    case 3: return n.size();
    case 4: return q_rf.size();
    case 5: return q_glb.size();
    case 6: return b.size();
    case 7: return loop_order.size();
    case 8: return tile_d.size();
    case 9: return tile_c.size();
  }
  throw std::out_of_range("dimension index " + std::to_string(dim));
}

std::string SearchSpaceDef::value_name(std::size_t dim, std::size_t idx) const {
  switch (dim) {
    case 0: return std::to_string(k_t.at(idx));
    case 1: return std::to_string(k_ocu.at(idx));
    case 2: return to_string(ocu_type.at(idx));
    case 3: return std::to_string(n.at(idx));
    case 4: return std::to_string(q_rf.at(idx));
    case 5: return std::to_string(q_glb.at(idx));
    case 6: return std::to_string(b.at(idx));
    case 7: return to_string(loop_order.at(idx));
    case 8: return std::to_string(tile_d.at(idx));
    case 9: return std::to_string(tile_c.at(idx));
  }
  throw std::out_of_range("dimension index " + std::to_string(dim));
}

AcceleratorConfig SearchSpaceDef::config_at(
    const std::array<std::size_t, kDims>& idx) const {
  AcceleratorConfig config;
  config.k_t = k_t.at(idx[0]);
  config.k_ocu = k_ocu.at(idx[1]);
  config.ocu_type = ocu_type.at(idx[2]);
  config.n = n.at(idx[3]);
  config.q_rf = q_rf.at(idx[4]);
  config.q_glb = q_glb.at(idx[5]);
  config.b = b.at(idx[6]);
  config.mapping.loop_order = loop_order.at(idx[7]);
  config.mapping.tile_d = tile_d.at(idx[8]);
  config.mapping.tile_c = tile_c.at(idx[9]);
  return config;
}

unsigned __int128 SearchSpaceDef::cardinality() const {
  unsigned __int128 product = 1;
  for (std::size_t dim = 0; dim < kDims; ++dim) {
    product *= dim_size(dim);
  }
  return product;
}

std::string format_u128(unsigned __int128 value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  return {digits.rbegin(), digits.rend()};
}

SearchSpaceDef load_space(const std::string& path) {
  SearchSpaceDef space;
  std::set<std::string> seen;
  for (const auto& line : textfile::read_lines(path)) {
    const std::string where = path + ":" + std::to_string(line.number);
    const std::string& key = line.tokens[0];
    if (!seen.insert(key).second) {
      throw ParseError(where + ": duplicate dimension '" + key + "'");
    }
    if (line.tokens.size() < 2) {
      throw ParseError(where + ": dimension '" + key + "' has no values");
    }
    std::vector<std::string> values(line.tokens.begin() + 1,
                                    line.tokens.end());
    auto as_ints = [&]() {
      std::vector<std::int64_t> parsed;
      for (const auto& value : values) {
        parsed.push_back(textfile::parse_int(value, where + " key " + key));
      }
      return parsed;
    };
    try {
      if (key == "k_t") space.k_t = as_ints();
      else if (key == "k_ocu") space.k_ocu = as_ints();
      else if (key == "n") space.n = as_ints();
      else if (key == "q_rf") space.q_rf = as_ints();
      else if (key == "q_glb") space.q_glb = as_ints();
      else if (key == "b") space.b = as_ints();
      else if (key == "tile_d") space.tile_d = as_ints();
      else if (key == "tile_c") space.tile_c = as_ints();
      else if (key == "ocu_type") {
        space.ocu_type.clear();
        for (const auto& value : values)
          space.ocu_type.push_back(parse_ocu_type(value));
      } else if (key == "loop_order") {
        space.loop_order.clear();
        for (const auto& value : values)
          space.loop_order.push_back(parse_loop_order(value));
      } else if (key == "area_cap") {
        if (values.size() != 1) {
          throw ParseError(where + ": area_cap takes one value");
        }
        space.area_cap = textfile::parse_double(values[0], where);
      } else {
        throw ParseError(where + ": unknown dimension '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& err) {
      throw ParseError(where + ": " + err.what());
    }
  }
  for (std::size_t dim = 0; dim < SearchSpaceDef::kDims; ++dim) {
    if (!seen.count(SearchSpaceDef::dim_names()[dim])) {
      throw ParseError(path + ": missing dimension '" +
                       SearchSpaceDef::dim_names()[dim] + "'");
    }
  }
  if (space.area_cap && !(*space.area_cap > 0.0)) {
    throw ParseError(path + ": area_cap must be > 0");
  }
  // every listed value must produce a costable config
  auto check_min = [&](const std::vector<std::int64_t>& values,
                       std::int64_t min, const char* dim) {
    for (std::int64_t value : values) {
      if (value < min) {
        throw ParseError(path + ": dimension " + dim + " value " +
                         std::to_string(value) + " must be >= " +
                         std::to_string(min));
      }
    }
  };
  check_min(space.k_t, 1, "k_t");
  check_min(space.k_ocu, 1, "k_ocu");
  check_min(space.n, 2, "n");
  check_min(space.q_rf, 1, "q_rf");
  check_min(space.q_glb, 1, "q_glb");
  check_min(space.tile_d, 1, "tile_d");
  check_min(space.tile_c, 1, "tile_c");
  for (std::int64_t value : space.b) {
    if (value < 1 || value > 16) {
      throw ParseError(path + ": dimension b value " + std::to_string(value) +
                       " must be in 1..16");
    }
  }
  return space;
}

void check_space(const SearchSpaceDef& space) {
  for (std::size_t dim = 0; dim < SearchSpaceDef::kDims; ++dim) {
    if (space.dim_size(dim) == 0) {
      throw std::invalid_argument(std::string("search-space dimension ") +
                                  SearchSpaceDef::dim_names()[dim] +
                                  " has no admissible values");
    }
  }
}

namespace {

template <typename T>
bool contains(const std::vector<T>& values, const T& value) {
  for (const auto& candidate : values) {
    if (candidate == value) return true;
  }
  return false;
}

}  // namespace

std::vector<Violation> validate(const AcceleratorConfig& config,
                                const SearchSpaceDef& space,
                                const TechParams& tech) {
  std::vector<Violation> violations;
  auto check = [&](bool member, const char* dim, const std::string& value) {
    if (!member) {
      violations.push_back({dim, "value " + value + " not in the admissible list"});
    }
  };
  check(contains(space.k_t, config.k_t), "k_t", std::to_string(config.k_t));
  check(contains(space.k_ocu, config.k_ocu), "k_ocu",
        std::to_string(config.k_ocu));
  check(contains(space.ocu_type, config.ocu_type), "ocu_type",
        to_string(config.ocu_type));
  check(contains(space.n, config.n), "n", std::to_string(config.n));
  check(contains(space.q_rf, config.q_rf), "q_rf",
        std::to_string(config.q_rf));
  check(contains(space.q_glb, config.q_glb), "q_glb",
        std::to_string(config.q_glb));
  check(contains(space.b, config.b), "b", std::to_string(config.b));
  check(contains(space.loop_order, config.mapping.loop_order), "loop_order",
        to_string(config.mapping.loop_order));
  check(contains(space.tile_d, config.mapping.tile_d), "tile_d",
        std::to_string(config.mapping.tile_d));
  check(contains(space.tile_c, config.mapping.tile_c), "tile_c",
        std::to_string(config.mapping.tile_c));
  if (space.area_cap && violations.empty()) {
    try {
      double predicted = area(config, tech);
      if (predicted > *space.area_cap) {
        std::ostringstream message;
        message << "predicted area " << predicted << " mm^2 exceeds cap "
                << *space.area_cap << " mm^2";
        violations.push_back({"area_cap", message.str()});
      }
    } catch (const std::invalid_argument& err) {
      violations.push_back({"area_cap", err.what()});
    }
  }
  return violations;
}

void enumerate(const SearchSpaceDef& space, std::uint64_t limit,
               const std::function<void(const AcceleratorConfig&)>& visit) {
  check_space(space);
  const unsigned __int128 total = space.cardinality();
  if (total > limit) {
    throw std::length_error("search space cardinality " + format_u128(total) +
                            " exceeds enumeration limit " +
                            std::to_string(limit));
  }
  std::array<std::size_t, SearchSpaceDef::kDims> idx{};
  while (true) {
    visit(space.config_at(idx));
    // odometer increment, last dimension fastest
    std::size_t dim = SearchSpaceDef::kDims;
    while (dim > 0) {
      --dim;
      if (++idx[dim] < space.dim_size(dim)) break;
      idx[dim] = 0;
      if (dim == 0) return;
    }
  }
}

std::vector<AcceleratorConfig> enumerate_all(const SearchSpaceDef& space,
                                             std::uint64_t limit) {
  std::vector<AcceleratorConfig> configs;
  configs.reserve(static_cast<std::size_t>(space.cardinality() > limit
                                               ? 0
                                               : space.cardinality()));
  enumerate(space, limit,
            [&](const AcceleratorConfig& config) { configs.push_back(config); });
  return configs;
}

}  // namespace oa
