#include <vector>

#include <gtest/gtest.h>

#include "ktb/errors.hpp"
#include "ktb/tensor.hpp"

using namespace ktb;

TEST(Tensor, RowMajorLastModeFastest) {
  Tensor t({2, 3, 4});
  for (Index i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  const Index idx[] = {1, 2, 3};
  EXPECT_EQ(t.at(idx), 1 * 12 + 2 * 4 + 3);
  const Index idx2[] = {0, 1, 0};
  EXPECT_EQ(t.at(idx2), 4);
}

TEST(Tensor, SliceAndRows) {
  Tensor t({3, 2, 2});
  for (Index i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  const Tensor s = t.slice(1);
  EXPECT_EQ(s.shape(), (Shape{2, 2}));
  EXPECT_EQ(s[0], 4);
  const Tensor r = t.rows(1, 2);
  EXPECT_EQ(r.shape(), (Shape{2, 2, 2}));
  EXPECT_EQ(r[0], 4);
  EXPECT_EQ(r[7], 11);
}

TEST(Tensor, StackAddsLeadingMode) {
  Tensor a({2, 2}), b({2, 2});
  a.data().setConstant(1);
  b.data().setConstant(2);
  const std::vector<Tensor> parts{a, b};
  const Tensor s = stack(parts);
  EXPECT_EQ(s.shape(), (Shape{2, 2, 2}));
  EXPECT_EQ(s[3], 1);
  EXPECT_EQ(s[4], 2);
}

TEST(Tensor, StackRejectsMismatchedShapes) {
  const std::vector<Tensor> parts{Tensor({2, 2}), Tensor({2, 3})};
  EXPECT_THROW(stack(parts), DimensionError);
}

TEST(Tensor, ShapeHelpers) {
  const Shape s{3, 4, 5};
  EXPECT_EQ(shape_size(s), 60);
  EXPECT_EQ(shape_string(s), "3x4x5");
  EXPECT_THROW(Tensor(Shape{2, 2}, Vector::Zero(3)), DimensionError);
}
