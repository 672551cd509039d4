#pragma once

#include <stdexcept>
#include <string>

namespace fpbh {

/// Invalid input. `path()` names the offending field, e.g. "laminate.layers[1].thickness".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string path, const std::string& what)
      : std::invalid_argument(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A numerical precondition failed at run time (step too large, unstable run).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fpbh
