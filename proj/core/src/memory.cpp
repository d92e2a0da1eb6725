#include "ktb/memory.hpp"

namespace ktb::memory {
namespace {

std::atomic<std::size_t> g_current{0};
std::atomic<std::size_t> g_peak{0};

}  // namespace

std::size_t current_bytes() { return g_current.load(); }
std::size_t peak_bytes() { return g_peak.load(); }
void reset_peak() { g_peak.store(g_current.load()); }

ScopedBytes::ScopedBytes(std::size_t bytes) : bytes_(bytes) {
  const std::size_t now = g_current.fetch_add(bytes) + bytes;
  std::size_t peak = g_peak.load();
  while (now > peak && !g_peak.compare_exchange_weak(peak, now)) {
  }
}

ScopedBytes::~ScopedBytes() { g_current.fetch_sub(bytes_); }

}  // namespace ktb::memory
