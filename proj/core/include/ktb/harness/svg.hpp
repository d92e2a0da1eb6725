#pragma once

#include <span>
#include <string>

#include "ktb/harness/stats.hpp"

namespace ktb::harness {

/// Mean trace as a polyline over a shaded mean ± 2·SE band.
std::string trace_svg(std::span<const SummaryRow> summary, const std::string& title, const std::string& y_label);

}  // namespace ktb::harness
