#pragma once

#include <cstddef>
#include <cstdint>

namespace ktb::half {

// IEEE 754 binary16 emulation. Conversions round to nearest, ties to even,
// and are bit-exact on every platform regardless of native half support.

std::uint16_t to_bits(float value);
float from_bits(std::uint16_t bits);

/// Rounds a float to the nearest representable half value.
inline float round(float value) { return from_bits(to_bits(value)); }

inline constexpr float kMax = 65504.0f;

/// Bulk conversions; same results as the scalar versions, using F16C
/// instructions when the build targets them.
void to_bits(const float* in, std::uint16_t* out, std::size_t n);
void from_bits(const std::uint16_t* in, float* out, std::size_t n);

}  // namespace ktb::half
