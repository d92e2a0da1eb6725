#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ktb {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Shape = std::vector<Index>;

Index shape_size(std::span<const Index> shape);
std::string shape_string(std::span<const Index> shape);

/// Dense k-mode tensor of doubles, row-major: the last mode varies fastest.
/// This is the same ordering as vec() in every Kronecker product of the
/// library, where the first factor indexes the slowest mode.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, Vector data);
  Tensor(std::initializer_list<Index> shape) : Tensor(Shape(shape)) {}

  const Shape& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index dim(Index mode) const { return shape_[static_cast<std::size_t>(mode)]; }
  Index size() const { return data_.size(); }

  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  double operator[](Index flat) const { return data_[flat]; }
  double& operator[](Index flat) { return data_[flat]; }

  double at(std::span<const Index> idx) const;
  double& at(std::span<const Index> idx);

  /// Sub-tensor with the leading mode fixed to `i`.
  Tensor slice(Index i) const;
  /// Entries [begin, begin+count) along the leading mode.
  Tensor rows(Index begin, Index count) const;

  bool all_finite() const { return data_.allFinite(); }

 private:
  Index offset(std::span<const Index> idx) const;

  Shape shape_;
  Vector data_;
};

/// Stacks equally-shaped tensors along a new leading mode.
Tensor stack(std::span<const Tensor> parts);

}  // namespace ktb
