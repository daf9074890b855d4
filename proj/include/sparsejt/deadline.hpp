#pragma once

#include <chrono>
#include <optional>

#include "sparsejt/errors.hpp"

namespace sjt {

/// Optional wall-clock limit polled by the long-running loops.
class Deadline {
 public:
  Deadline() = default;
  explicit Deadline(std::chrono::duration<double> budget)
      : end_(std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(budget)) {}

  bool expired() const { return end_ && std::chrono::steady_clock::now() >= *end_; }
  void check() const {
    if (expired()) throw Timeout("inference exceeded its time limit");
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> end_;
};

}  // namespace sjt
