#pragma once

#include <vector>

#include "ktb/tensor.hpp"

namespace ktb {

/// Non-dominated mask under minimization; rows of `points` are objective
/// vectors. A point is dominated when another is <= everywhere and <
/// somewhere.
std::vector<bool> pareto_filter(const Matrix& points);

/// Exact area dominated by the 2-objective points (rows) and bounded by
/// `ref`. Points with any coordinate >= ref are ignored.
double hypervolume2d(const Matrix& points, const Vector& ref);

/// hypervolume2d(all) − hypervolume2d(all without point i), for each i.
Vector hv_contributions(const Matrix& pareto_points, const Vector& ref);

/// A 2-objective front kept as a sorted staircase for O(front) hypervolume
/// improvement queries.
class HypervolumeFront {
 public:
  HypervolumeFront(const Matrix& points, Vector ref);

  double hypervolume() const;
  /// hypervolume2d(front ∪ {f}) − hypervolume2d(front).
  double improvement(const Eigen::Ref<const Vector>& f) const;
  /// Smallest uniform shift, in units of the front's extent, that would make
  /// f non-dominated. Zero or negative when f is already non-dominated.
  double shortfall(const Eigen::Ref<const Vector>& f) const;
  void insert(const Eigen::Ref<const Vector>& f);

  const Vector& ref() const { return ref_; }
  Index size() const { return static_cast<Index>(xs_.size()); }

 private:
  void rebuild(const Matrix& points);

  Vector ref_;
  std::vector<double> xs_;  // ascending
  std::vector<double> ys_;  // descending
};

/// Every evaluated (x, objectives) pair plus its non-dominated subset.
class ParetoArchive {
 public:
  explicit ParetoArchive(Index n_objectives = 2);

  void add(const Vector& x, const Vector& f);

  Index size() const { return static_cast<Index>(xs_.size()); }
  Index n_objectives() const { return n_objectives_; }
  const std::vector<Vector>& xs() const { return xs_; }
  const std::vector<Vector>& fs() const { return fs_; }
  const std::vector<bool>& pareto_mask() const { return mask_; }
  std::vector<Index> pareto_indices() const;
  Matrix objectives() const;
  Matrix pareto_front() const;

  bool has_ref_point() const { return ref_.size() > 0; }
  const Vector& ref_point() const { return ref_; }
  void set_ref_point(Vector ref) { ref_ = std::move(ref); }

  double hypervolume() const;

 private:
  Index n_objectives_;
  std::vector<Vector> xs_;
  std::vector<Vector> fs_;
  std::vector<bool> mask_;
  Vector ref_;
};

}  // namespace ktb
