#include "ktb/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ktb::harness {

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<SummaryRow> summarize(std::span<const TrialSeries> trials) {
  Index last = -1;
  for (const auto& t : trials) {
    if (!t.empty()) last = std::max(last, t.back().first);
  }
  std::vector<SummaryRow> out;
  std::vector<std::size_t> cursor(trials.size(), 0);
  std::vector<double> values;
  for (Index e = 0; e <= last; ++e) {
    values.clear();
    for (std::size_t k = 0; k < trials.size(); ++k) {
      const auto& t = trials[k];
      while (cursor[k] < t.size() && t[cursor[k]].first <= e) ++cursor[k];
      if (cursor[k] > 0) values.push_back(t[cursor[k] - 1].second);
    }
    if (values.empty()) continue;
    SummaryRow row;
    row.eval_index = e;
    row.n = static_cast<Index>(values.size());
    row.mean = mean(values);
    row.se = stddev(values) / std::sqrt(static_cast<double>(values.size()));
    row.lower = row.mean - 2.0 * row.se;
    row.upper = row.mean + 2.0 * row.se;
    out.push_back(row);
  }
  return out;
}

}  // namespace ktb::harness
