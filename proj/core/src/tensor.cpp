#include "ktb/tensor.hpp"

#include <functional>
#include <numeric>
#include <sstream>

#include "ktb/errors.hpp"

namespace ktb {

Index shape_size(std::span<const Index> shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

std::string shape_string(std::span<const Index> shape) {
  std::ostringstream os;
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  return os.str();
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(Vector::Zero(shape_size(shape_))) {}

Tensor::Tensor(Shape shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_size(shape_)) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                         shape_string(shape_));
  }
}

Index Tensor::offset(std::span<const Index> idx) const {
  if (idx.size() != shape_.size()) throw DimensionError("tensor index rank mismatch");
  Index off = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= shape_[i]) throw DimensionError("tensor index out of range");
    off = off * shape_[i] + idx[i];
  }
  return off;
}

double Tensor::at(std::span<const Index> idx) const { return data_[offset(idx)]; }
double& Tensor::at(std::span<const Index> idx) { return data_[offset(idx)]; }

Tensor Tensor::slice(Index i) const {
  if (shape_.empty()) throw DimensionError("cannot slice a rank-0 tensor");
  Shape inner(shape_.begin() + 1, shape_.end());
  const Index stride = shape_size(inner);
  return Tensor(std::move(inner), data_.segment(i * stride, stride));
}

Tensor Tensor::rows(Index begin, Index count) const {
  if (shape_.empty()) throw DimensionError("cannot slice a rank-0 tensor");
  if (begin < 0 || count < 0 || begin + count > shape_[0]) throw DimensionError("row range out of bounds");
  Shape s = shape_;
  s[0] = count;
  const Index stride = data_.size() / std::max<Index>(shape_[0], 1);
  return Tensor(std::move(s), data_.segment(begin * stride, count * stride));
}

Tensor stack(std::span<const Tensor> parts) {
  if (parts.empty()) return Tensor(Shape{0});
  Shape s{static_cast<Index>(parts.size())};
  s.insert(s.end(), parts.front().shape().begin(), parts.front().shape().end());
  Vector data(shape_size(s));
  const Index stride = parts.front().size();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].shape() != parts.front().shape()) throw DimensionError("stack: shape mismatch");
    data.segment(static_cast<Index>(i) * stride, stride) = parts[i].data();
  }
  return Tensor(std::move(s), std::move(data));
}

}  // namespace ktb
