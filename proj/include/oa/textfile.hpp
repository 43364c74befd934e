#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace oa {

// Raised by all config-file loaders. Message carries file:line and the
// offending field where known.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace textfile {

// One non-blank, non-comment line of a config file.
struct Line {
  int number = 0;                    // 1-based line number in the file
  std::vector<std::string> tokens;   // whitespace-separated
};

// Reads a file, strips '#' comments and blank lines, tokenizes the rest.
// Throws ParseError if the file cannot be opened.
std::vector<Line> read_lines(const std::string& path);

// "key=value" split; returns false if there is no '='.
bool split_kv(const std::string& token, std::string& key, std::string& value);

// Strict numeric parsers; `where` is prepended to error messages.
std::int64_t parse_int(const std::string& text, const std::string& where);
double parse_double(const std::string& text, const std::string& where);

}  // namespace textfile
}  // namespace oa
