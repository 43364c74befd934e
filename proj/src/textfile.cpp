#include "oa/textfile.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace oa::textfile {

std::vector<Line> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  std::vector<Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    auto hash = raw.find('#');
    if (hash != std::string::npos) {
      raw.erase(hash);
    }
    std::istringstream tokens(raw);
    Line line;
    line.number = number;
    std::string token;
    while (tokens >> token) {
      line.tokens.push_back(token);
    }
    if (!line.tokens.empty()) {
      lines.push_back(std::move(line));
    }
  }
  return lines;
}

bool split_kv(const std::string& token, std::string& key, std::string& value) {
  auto eq = token.find('=');
  if (eq == std::string::npos || eq == 0) {
    return false;
  }
  key = token.substr(0, eq);
  value = token.substr(eq + 1);
  return true;
}

std::int64_t parse_int(const std::string& text, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  long long parsed = std::strtoll(text.c_str(), &end, 10);
  if (errno != 0 || end == text.c_str() || *end != '\0') {
    throw ParseError(where + ": expected integer, got '" + text + "'");
  }
  return parsed;
}

double parse_double(const std::string& text, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  double parsed = std::strtod(text.c_str(), &end);
  if (errno != 0 || end == text.c_str() || *end != '\0') {
    throw ParseError(where + ": expected number, got '" + text + "'");
  }
  return parsed;
}

}  // namespace oa::textfile
