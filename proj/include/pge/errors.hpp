#pragma once

#include <stdexcept>
#include <string>

namespace pge {

// CLI exit codes: 0 success, 1 validation, 2 data/parse, 3 numeric fault.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericFault : std::runtime_error {
  explicit NumericFault(const std::string& msg) : std::runtime_error(msg) {}
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return 1;
  if (dynamic_cast<const DataError*>(&e)) return 2;
  if (dynamic_cast<const NumericFault*>(&e)) return 3;
  return 1;
}

}  // namespace pge
