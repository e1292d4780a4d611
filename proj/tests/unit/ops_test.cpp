#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "random_gen.hpp"
#include "vgkit/ops.hpp"

using vgkit::Tensor;
namespace ops = vgkit::ops;

TEST(Ops, SoftmaxOfEqualLogitsIsUniform) {
  Tensor s = ops::softmax(Tensor::vector({0, 0}));
  EXPECT_DOUBLE_EQ(s[0], 0.5);
  EXPECT_DOUBLE_EQ(s[1], 0.5);
}

TEST(Ops, SoftmaxSurvivesLargeLogits) {
  Tensor s = ops::softmax(Tensor::vector({1000, 0}));
  EXPECT_TRUE(std::isfinite(s[1]));
  EXPECT_NEAR(s[0], 1.0, 1e-12);
}

TEST(Ops, ReluDefinition) {
  Tensor r = ops::relu(Tensor::vector({-1.0, 2.5}));
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[1], 2.5);
}

TEST(Ops, L2NormalizeThreeFour) {
  Tensor n = ops::l2_normalize(Tensor::vector({3, 4}));
  EXPECT_NEAR(n[0], 0.6, 1e-15);
  EXPECT_NEAR(n[1], 0.8, 1e-15);
  Tensor z = ops::l2_normalize(Tensor::vector({0, 0}));
  EXPECT_EQ(z[0], 0.0);
}

TEST(Ops, MatmulByHand) {
  Tensor a = Tensor::from({2, 2}, {1, 2, 3, 4});
  Tensor b = Tensor::from({2, 1}, {5, 6});
  Tensor c = ops::matmul(a, b);
  EXPECT_EQ(c[0], 17.0);
  EXPECT_EQ(c[1], 39.0);
}

TEST(Ops, ShapeErrorsNameKernelAndShapes) {
  try {
    ops::matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3}));
    FAIL() << "no throw";
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("matmul"), std::string::npos);
    EXPECT_NE(msg.find("[2,3]"), std::string::npos) << msg;
  }
  EXPECT_THROW(ops::add(Tensor::zeros({2}), Tensor::zeros({3})), std::invalid_argument);
  EXPECT_THROW(ops::concat(Tensor::zeros({2, 2}), Tensor::zeros({3, 2})), std::invalid_argument);
  EXPECT_THROW(ops::slice_last(Tensor::zeros({2, 2}), 1, 2), std::invalid_argument);
  EXPECT_THROW(ops::reshape(Tensor::zeros({2, 2}), {3}), std::invalid_argument);
}

TEST(Ops, LogRejectsNonPositive) {
  EXPECT_THROW(ops::log(Tensor::vector({1.0, 0.0})), std::domain_error);
  EXPECT_THROW(ops::log(Tensor::vector({-2.0})), std::domain_error);
}

TEST(Ops, SmoothL1Pieces) {
  Tensor r = ops::smooth_l1(Tensor::vector({0.5, -2.0, 1.0}));
  EXPECT_DOUBLE_EQ(r[0], 0.125);
  EXPECT_DOUBLE_EQ(r[1], 1.5);
  EXPECT_DOUBLE_EQ(r[2], 0.5);
}

TEST(OpsProperty, SoftmaxIsDistribution) {
  vgtest::Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = vgtest::uniform_index(rng, 1, 20);
    Tensor s = ops::softmax(vgtest::random_tensor(rng, {n}, -30, 30, false));
    double total = 0.0;
    for (double v : s.values()) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(OpsProperty, GatherAndSliceAgreeWithIndexing) {
  vgtest::Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    const std::size_t rows = vgtest::uniform_index(rng, 1, 6), cols = vgtest::uniform_index(rng, 1, 6);
    Tensor x = vgtest::random_tensor(rng, {rows, cols}, -1, 1, false);
    const std::vector<std::size_t> idx{vgtest::uniform_index(rng, 0, rows - 1)};
    Tensor g = ops::gather(x, idx);
    for (std::size_t c = 0; c < cols; ++c) EXPECT_EQ(g[c], x[idx[0] * cols + c]);
    const std::size_t b = vgtest::uniform_index(rng, 0, cols - 1);
    Tensor s = ops::slice_last(x, b, cols - b);
    for (std::size_t r = 0; r < rows; ++r) EXPECT_EQ(s[r * (cols - b)], x[r * cols + b]);
  }
}
