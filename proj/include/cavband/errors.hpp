#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cavband {

// Failure of a numerical procedure whose inputs were otherwise valid.
// `reason()` is a short machine-readable tag ("gap_closure",
// "non_convergence", "singular_link", ...) that the CLI writes into its
// run manifest.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string reason, const std::string& what)
      : std::runtime_error(what), reason_(std::move(reason)) {}

  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

}  // namespace cavband
