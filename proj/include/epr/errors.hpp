#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epr {

// Malformed input file (trace CSV or config). The message carries the
// source name and the offending line number.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& source, std::size_t line,
              const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what) {}
};

}  // namespace epr
