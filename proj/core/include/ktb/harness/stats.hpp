#pragma once

#include <span>
#include <vector>

#include "ktb/tensor.hpp"

namespace ktb::harness {

/// (eval_index, value) pairs of one trial, eval_index ascending.
using TrialSeries = std::vector<std::pair<Index, double>>;

struct SummaryRow {
  Index eval_index = 0;
  Index n = 0;
  double mean = 0.0;
  double se = 0.0;  ///< sample standard deviation / √n; 0 when n = 1
  double lower = 0.0;  ///< mean − 2·se
  double upper = 0.0;  ///< mean + 2·se
};

/// Per evaluation index e, statistics over trials of each trial's latest
/// value at or before e. Trials with no value yet are left out.
std::vector<SummaryRow> summarize(std::span<const TrialSeries> trials);

double mean(std::span<const double> v);
double median(std::vector<double> v);
/// Sample standard deviation (n − 1 denominator); 0 for fewer than 2 values.
double stddev(std::span<const double> v);

}  // namespace ktb::harness
