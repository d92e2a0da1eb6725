#pragma once

#include <atomic>
#include <cstddef>

namespace ktb::memory {

// Process-wide byte counters for the large intermediate buffers allocated by
// Kronecker products and posterior sampling. Used by tests and benchmarks to
// check that sampling memory scales with the test-point batch size.

std::size_t current_bytes();
std::size_t peak_bytes();

/// Sets the peak to the current value.
void reset_peak();

/// Registers `bytes` for the lifetime of the object.
class ScopedBytes {
 public:
  explicit ScopedBytes(std::size_t bytes);
  ~ScopedBytes();
  ScopedBytes(const ScopedBytes&) = delete;
  ScopedBytes& operator=(const ScopedBytes&) = delete;

 private:
  std::size_t bytes_;
};

}  // namespace ktb::memory
