#pragma once

#include <stdexcept>
#include <string>

namespace ioncrystal {

/// Invalid input parameters (bad config, nonpositive mass, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Coincident ions or other points where the potential is undefined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A detuning that falls on an axial mode frequency.
class ResonanceError : public std::runtime_error {
 public:
  ResonanceError(const std::string& what, std::size_t mode)
      : std::runtime_error(what), mode_(mode) {}
  std::size_t mode() const noexcept { return mode_; }

 private:
  std::size_t mode_;
};

}  // namespace ioncrystal
