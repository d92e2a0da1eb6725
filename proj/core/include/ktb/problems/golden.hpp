#pragma once

#include <filesystem>

#include "ktb/tensor.hpp"

namespace ktb::problems {

// Golden tensor files: one line of JSON, {"dtype":"<f8","shape":[...]},
// terminated by '\n', followed by the row-major entries as little-endian
// IEEE 754 doubles.

void write_golden(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_golden(const std::filesystem::path& path);

}  // namespace ktb::problems
