#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splitform {

/// Raised when a scalar function receives an argument outside its domain
/// (non-positive input to a mean, non-finite input, ...).
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, double value)
      : std::domain_error(what + " (value " + std::to_string(value) + ")"),
        value_(value) {}

  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Raised for non-physical Euler states. Carries the offending quantity and,
/// when known, the location (global DOF node, element and local node).
class InvalidStateError : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  InvalidStateError(const std::string& quantity, double value,
                    std::size_t node = npos, std::size_t element = npos)
      : std::runtime_error(format(quantity, value, node, element)),
        quantity_(quantity),
        value_(value),
        node_(node),
        element_(element) {}

  const std::string& quantity() const noexcept { return quantity_; }
  double value() const noexcept { return value_; }
  std::size_t node() const noexcept { return node_; }
  std::size_t element() const noexcept { return element_; }

  InvalidStateError at(std::size_t node, std::size_t element = npos) const {
    return InvalidStateError(quantity_, value_, node, element);
  }

 private:
  static std::string format(const std::string& quantity, double value,
                            std::size_t node, std::size_t element) {
    std::string msg = "invalid state: " + quantity + " = " + std::to_string(value);
    if (element != npos) msg += " in element " + std::to_string(element);
    if (node != npos) msg += " at node " + std::to_string(node);
    return msg;
  }

  std::string quantity_;
  double value_;
  std::size_t node_;
  std::size_t element_;
};

/// Raised for invalid construction parameters (too few nodes, unknown names).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace splitform
