#include "ktb/pareto.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "ktb/errors.hpp"

namespace ktb {
namespace {

bool dominates(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  bool strict = false;
  for (Index k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strict = true;
  }
  return strict;
}

void check_2d(const Matrix& points, const Vector& ref) {
  if (ref.size() != 2 || (points.rows() > 0 && points.cols() != 2)) {
    throw DimensionError("hypervolume: only two objectives are supported");
  }
}

// Area of a staircase sorted by x ascending with y non-increasing.
double staircase_area(const std::vector<double>& xs, const std::vector<double>& ys, double rx, double ry) {
  double area = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double next = i + 1 < xs.size() ? xs[i + 1] : rx;
    area += (next - xs[i]) * (ry - ys[i]);
  }
  return area;
}

}  // namespace

std::vector<bool> pareto_filter(const Matrix& points) {
  const Index n = points.rows();
  std::vector<bool> mask(static_cast<std::size_t>(n), true);
  if (n == 0) return mask;
  if (points.cols() == 2) {
    // Sort by (f1, f2); a point is non-dominated iff its f2 is strictly
    // below every earlier f2, with exact duplicates kept together.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      return points(a, 0) != points(b, 0) ? points(a, 0) < points(b, 0) : points(a, 1) < points(b, 1);
    });
    double best = std::numeric_limits<double>::infinity();
    Index last_kept = -1;
    for (Index i : order) {
      const double y = points(i, 1);
      const bool duplicate = last_kept >= 0 && points(i, 0) == points(last_kept, 0) && y == points(last_kept, 1);
      if (y < best || duplicate) {
        if (y < best) {
          best = y;
          last_kept = i;
        }
      } else {
        mask[static_cast<std::size_t>(i)] = false;
      }
    }
    return mask;
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n && mask[static_cast<std::size_t>(i)]; ++j) {
      if (i != j && dominates(points.row(j).transpose(), points.row(i).transpose())) {
        mask[static_cast<std::size_t>(i)] = false;
      }
    }
  }
  return mask;
}

HypervolumeFront::HypervolumeFront(const Matrix& points, Vector ref) : ref_(std::move(ref)) {
  check_2d(points, ref_);
  rebuild(points);
}

void HypervolumeFront::rebuild(const Matrix& points) {
  std::vector<std::pair<double, double>> pts;
  for (Index i = 0; i < points.rows(); ++i) {
    if (points(i, 0) < ref_[0] && points(i, 1) < ref_[1]) pts.emplace_back(points(i, 0), points(i, 1));
  }
  std::sort(pts.begin(), pts.end());
  xs_.clear();
  ys_.clear();
  for (const auto& [x, y] : pts) {
    if (ys_.empty() || y < ys_.back()) {
      if (!xs_.empty() && xs_.back() == x) {
        ys_.back() = y;
      } else {
        xs_.push_back(x);
        ys_.push_back(y);
      }
    }
  }
}

double HypervolumeFront::hypervolume() const { return staircase_area(xs_, ys_, ref_[0], ref_[1]); }

double HypervolumeFront::improvement(const Eigen::Ref<const Vector>& f) const {
  const double cx = f[0];
  const double cy = f[1];
  if (!(cx < ref_[0] && cy < ref_[1])) return 0.0;
  // Area of f's box minus the part already dominated by the front, which is
  // the staircase of the clipped points max(p, f).
  double covered = 0.0;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const double x = std::max(xs_[i], cx);
    const double y = std::max(ys_[i], cy);
    const double next = i + 1 < xs_.size() ? std::max(xs_[i + 1], cx) : ref_[0];
    covered += (next - x) * (ref_[1] - y);
  }
  return std::max((ref_[0] - cx) * (ref_[1] - cy) - covered, 0.0);
}

double HypervolumeFront::shortfall(const Eigen::Ref<const Vector>& f) const {
  if (xs_.empty()) return std::max((f[0] - ref_[0]) / std::max(std::abs(ref_[0]), 1e-12),
                                   (f[1] - ref_[1]) / std::max(std::abs(ref_[1]), 1e-12));
  const double sx = std::max(ref_[0] - xs_.front(), 1e-12);
  const double sy = std::max(ref_[1] - ys_.back(), 1e-12);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    best = std::min(best, std::max((f[0] - xs_[i]) / sx, (f[1] - ys_[i]) / sy));
  }
  return best;
}

void HypervolumeFront::insert(const Eigen::Ref<const Vector>& f) {
  Matrix pts(size() + 1, 2);
  for (Index i = 0; i < size(); ++i) {
    pts(i, 0) = xs_[static_cast<std::size_t>(i)];
    pts(i, 1) = ys_[static_cast<std::size_t>(i)];
  }
  pts.row(size()) = f.transpose();
  rebuild(pts);
}

double hypervolume2d(const Matrix& points, const Vector& ref) {
  check_2d(points, ref);
  return HypervolumeFront(points, ref).hypervolume();
}

Vector hv_contributions(const Matrix& pareto_points, const Vector& ref) {
  check_2d(pareto_points, ref);
  const Index n = pareto_points.rows();
  const double total = hypervolume2d(pareto_points, ref);
  Vector out(n);
  for (Index i = 0; i < n; ++i) {
    Matrix rest(n - 1, 2);
    Index r = 0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) rest.row(r++) = pareto_points.row(j);
    }
    out[i] = total - hypervolume2d(rest, ref);
  }
  return out;
}

ParetoArchive::ParetoArchive(Index n_objectives) : n_objectives_(n_objectives) {
  if (n_objectives < 1) throw InvalidInputError("ParetoArchive: need at least one objective");
}

void ParetoArchive::add(const Vector& x, const Vector& f) {
  if (f.size() != n_objectives_) throw DimensionError("ParetoArchive: objective count mismatch");
  if (!f.allFinite()) throw InvalidInputError("ParetoArchive: non-finite objectives");
  xs_.push_back(x);
  fs_.push_back(f);
  mask_ = pareto_filter(objectives());
}

std::vector<Index> ParetoArchive::pareto_indices() const {
  std::vector<Index> idx;
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (mask_[i]) idx.push_back(static_cast<Index>(i));
  }
  return idx;
}

Matrix ParetoArchive::objectives() const {
  Matrix m(size(), n_objectives_);
  for (Index i = 0; i < size(); ++i) m.row(i) = fs_[static_cast<std::size_t>(i)].transpose();
  return m;
}

Matrix ParetoArchive::pareto_front() const {
  const auto idx = pareto_indices();
  Matrix m(static_cast<Index>(idx.size()), n_objectives_);
  for (std::size_t i = 0; i < idx.size(); ++i) m.row(static_cast<Index>(i)) = fs_[static_cast<std::size_t>(idx[i])].transpose();
  return m;
}

double ParetoArchive::hypervolume() const {
  if (!has_ref_point()) throw ConfigError("ParetoArchive: reference point not set");
  return hypervolume2d(pareto_front(), ref_);
}

}  // namespace ktb
