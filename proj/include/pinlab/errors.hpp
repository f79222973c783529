#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace pinlab {

// a run would exceed an explicit resource budget (cutoff caps, enumeration
// limits); carries what the run would have needed
struct ResourceCapError : std::runtime_error {
  explicit ResourceCapError(const std::string& what, double needed = 0.0)
      : std::runtime_error(what), required(needed) {}
  double required;
};

// an internal contract that should hold by construction was violated
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

// config rejected before dispatch; one message per violation
struct ValidationError : std::runtime_error {
  explicit ValidationError(std::vector<std::string> items_)
      : std::runtime_error(items_.empty() ? "invalid config" : items_.front()),
        items(std::move(items_)) {}
  std::vector<std::string> items;
};

}  // namespace pinlab
