#pragma once

#include <stdexcept>
#include <string>

namespace ftf {

// All library errors carry the name of the module that raised them, so the
// CLI can surface failures with their provenance.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

}  // namespace ftf
