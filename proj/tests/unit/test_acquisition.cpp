#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ktb/acquisition.hpp"
#include "ktb/errors.hpp"
#include "ktb/rng.hpp"

using namespace ktb;

TEST(AnalyticEi, ZeroVariance) {
  EXPECT_DOUBLE_EQ(analytic_ei(1.0, 0.0, 3.0), 2.0);
  EXPECT_DOUBLE_EQ(analytic_ei(4.0, 0.0, 3.0), 0.0);
}

TEST(AnalyticEi, AtIncumbentIsDensityAtZero) {
  EXPECT_NEAR(analytic_ei(2.0, 1.0, 2.0), 1.0 / std::sqrt(2 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(analytic_ei(2.0, 1.0, 2.0), 0.39894, 1e-5);
  EXPECT_NEAR(analytic_ei(0.0, 4.0, 0.0), 2.0 / std::sqrt(2 * std::numbers::pi), 1e-15);
}

TEST(AnalyticEi, NonNegativeAndNonIncreasingInMean) {
  for (double sd : {0.01, 0.5, 3.0}) {
    double prev = INFINITY;
    for (double mean = -10; mean <= 10; mean += 0.05) {
      const double ei = analytic_ei(mean, sd * sd, 0.0);
      EXPECT_GE(ei, 0.0);
      EXPECT_LE(ei, prev);
      prev = ei;
    }
  }
}

TEST(ThompsonSelect, SingleCandidate) {
  Matrix u(3, 1);
  u << 0.1, -4, 9;
  EXPECT_EQ(thompson_select(u, 1), (std::vector<Index>{0}));
  EXPECT_THROW(thompson_select(u, 2), InvalidInputError);
}

TEST(ThompsonSelect, DeterministicSamplesPickArgmaxWithoutReplacement) {
  Matrix u(3, 4);
  u << 1, 5, 3, 5,  //
      1, 5, 3, 5,   //
      1, 5, 3, 5;
  EXPECT_EQ(thompson_select(u, 3), (std::vector<Index>{1, 3, 2}));
}

TEST(ThompsonSelect, InvariantUnderMonotoneTransform) {
  Rng rng(1);
  const Matrix u = rng.normal_vector(10 * 50).reshaped(10, 50);
  const Matrix t = u.unaryExpr([](double v) { return std::exp(3 * v) - 7; });
  EXPECT_EQ(thompson_select(u, 10), thompson_select(t, 10));
}

TEST(ThompsonSelect, TensorOverloadAppliesUtility) {
  PosteriorSamples s{Tensor(Shape{2, 3, 2})};
  s.values.data() << 0, 1, 5, 5, 2, 2,  // draw 0
      9, 9, 0, 0, 1, 0;                 // draw 1
  auto sum = [](const Tensor& t) { return t.data().sum(); };
  EXPECT_EQ(thompson_select(s, sum, 2), (std::vector<Index>{1, 0}));
}

TEST(ThompsonSelectHvi, MatchesExhaustiveHvi) {
  Matrix front(2, 2);
  front << 0.2, 0.7, 0.6, 0.3;
  const Vector ref = Vector::Ones(2);
  Matrix draw(3, 2);
  draw << 0.1, 0.9,  // hvi 0.1·0.1 + 0.1·0.2 = 0.03
      0.4, 0.4,      // hvi 0.2·0.3 = 0.06
      0.9, 0.1;      // hvi 0.1·0.2 = 0.02
  const double base = hypervolume2d(front, ref);
  Index best = -1;
  double best_gain = -1;
  for (Index i = 0; i < 3; ++i) {
    Matrix with(3, 2);
    with << front, draw.row(i);
    const double gain = hypervolume2d(with, ref) - base;
    if (gain > best_gain) best_gain = gain, best = i;
  }
  const std::vector<Matrix> draws{draw};
  EXPECT_EQ(thompson_select_hvi(draws, front, ref, 1), (std::vector<Index>{best}));
  EXPECT_EQ(best, 1);
}

TEST(ThompsonSelectHvi, LaterDrawsSeeEarlierPicks) {
  Matrix front(0, 2);
  const Vector ref = Vector::Ones(2);
  Matrix draw(3, 2);
  draw << 0.1, 0.1, 0.11, 0.11, 0.5, 0.05;
  const std::vector<Matrix> draws{draw, draw};
  // After inserting candidate 0, candidate 2 adds area below y=0.1; candidate 1 adds none.
  EXPECT_EQ(thompson_select_hvi(draws, front, ref, 2), (std::vector<Index>{0, 2}));
}

TEST(ThompsonSelectHvi, FallsBackToLeastDominated) {
  Matrix front(1, 2);
  front << 0.0, 0.0;
  Matrix draw(2, 2);
  draw << 0.5, 0.5, 0.1, 0.2;
  const std::vector<Matrix> draws{draw};
  EXPECT_EQ(thompson_select_hvi(draws, front, Vector::Ones(2), 1), (std::vector<Index>{1}));
}
