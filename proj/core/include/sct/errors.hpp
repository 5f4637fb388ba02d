#pragma once

#include <stdexcept>
#include <string>

namespace sct {

/// Solver or training produced a non-finite or diverging result.
class numerical_error : public std::runtime_error {
  public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be read, written, or parsed.
class io_error : public std::runtime_error {
  public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sct
