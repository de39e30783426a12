#pragma once

#include <stdexcept>
#include <string>

namespace hdsft {

/// Parameters that individually look fine but cannot be realized together
/// (s >= F, empty odd range for the hash draw, grids that do not fit, ...).
class InfeasibleParameters : public std::runtime_error {
 public:
  explicit InfeasibleParameters(const std::string& what) : std::runtime_error(what) {}
};

/// Instance generation failed, e.g. k tones cannot be packed with gap eta.
class InfeasibleInstance : public std::runtime_error {
 public:
  explicit InfeasibleInstance(const std::string& what) : std::runtime_error(what) {}
};

/// A dense oracle was asked for a grid above the desk-scale guard.
class GridTooLarge : public std::runtime_error {
 public:
  explicit GridTooLarge(const std::string& what) : std::runtime_error(what) {}
};

/// Internal consistency failure. Should be unreachable.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace hdsft
