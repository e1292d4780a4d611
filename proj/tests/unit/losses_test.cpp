#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "random_gen.hpp"
#include "vgkit/losses.hpp"
#include "vgkit/model.hpp"
#include "vgkit/ops.hpp"

using vgkit::Tensor;

namespace {

std::vector<vgkit::RegressionTarget> to_targets(const std::vector<oracle::Offsets>& v) {
  std::vector<vgkit::RegressionTarget> out;
  for (const auto& o : v) out.push_back({o[0], o[1], o[2], o[3]});
  return out;
}

}  // namespace

TEST(SoftLabels, Examples) {
  auto s = vgkit::soft_labels(std::vector<double>{0.8, 0.6, 0.3}, 0.5);
  EXPECT_FALSE(s.degenerate);
  EXPECT_NEAR(s.values[0], 0.8 / 1.4, 1e-12);
  EXPECT_NEAR(s.values[1], 0.6 / 1.4, 1e-12);
  EXPECT_EQ(s.values[2], 0.0);
  s = vgkit::soft_labels(std::vector<double>{0.4, 0.3}, 0.5);
  EXPECT_TRUE(s.degenerate);
  EXPECT_EQ(s.values, (std::vector<double>{0, 0}));
  s = vgkit::soft_labels(std::vector<double>{0.9, 0, 0}, 0.5);
  EXPECT_EQ(s.values, (std::vector<double>{1, 0, 0}));
}

TEST(SoftLabels, StrictThresholdAndRangeCheck) {
  EXPECT_TRUE(vgkit::soft_labels(std::vector<double>{0.5, 0.5}, 0.5).degenerate);
  EXPECT_THROW(vgkit::soft_labels(std::vector<double>{1.2}, 0.5), std::invalid_argument);
  EXPECT_THROW(vgkit::soft_labels(std::vector<double>{-0.1}, 0.5), std::invalid_argument);
}

TEST(KldLoss, Examples) {
  const auto p = vgkit::soft_labels(std::vector<double>{0.7, 0.6, 0.0}, 0.5);
  EXPECT_NEAR(vgkit::kld_loss(p, p.values), 0.0, 1e-9);
  vgkit::SoftLabels one_hot{{1, 0}, false};
  EXPECT_NEAR(vgkit::kld_loss(one_hot, std::vector<double>{0.5, 0.5}), 0.5 * std::log(2.0), 1e-9);
  EXPECT_NEAR(vgkit::kld_loss(one_hot, std::vector<double>{0.5, 0.5}), 0.34657, 1e-5);
}

TEST(KldLoss, RejectsDegenerateAndMismatch) {
  vgkit::SoftLabels d{{0, 0}, true};
  EXPECT_THROW(vgkit::kld_loss(d, std::vector<double>{0.5, 0.5}), std::invalid_argument);
  vgkit::SoftLabels ok{{1, 0}, false};
  EXPECT_THROW(vgkit::kld_loss(ok, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(SoftmaxSingleLabel, Examples) {
  EXPECT_NEAR(vgkit::softmax_single_label_loss(std::vector<double>{0, 1, 0}, std::vector<double>{0.1, 0.9, 0.2}),
              0.0, 1e-11);
  EXPECT_NEAR(vgkit::softmax_single_label_loss(std::vector<double>{0.25, 0.25, 0.25, 0.25},
                                               std::vector<double>{0.1, 0.9, 0.2, 0.3}),
              std::log(4.0), 1e-9);
  // Ties: the first maximal IoU is the label.
  EXPECT_NEAR(vgkit::softmax_single_label_loss(std::vector<double>{0.7, 0.1, 0.2}, std::vector<double>{0.2, 0.8, 0.8}),
              -std::log(0.1 + 1e-12), 1e-12);
}

TEST(SmoothL1Reg, Examples) {
  const vgkit::RegressionTarget z{0, 0, 0, 0};
  EXPECT_EQ(vgkit::smooth_l1_reg_loss(std::vector{z}, std::vector{z}), 0.0);
  EXPECT_NEAR(vgkit::smooth_l1_reg_loss(std::vector{vgkit::RegressionTarget{0.5, 0, 0, 0}}, std::vector{z}), 0.125,
              1e-12);
  EXPECT_NEAR(vgkit::smooth_l1_reg_loss(std::vector{vgkit::RegressionTarget{0, 0, 2.0, 0}}, std::vector{z}), 1.5,
              1e-12);
  EXPECT_THROW(vgkit::smooth_l1_reg_loss(std::vector{z, z}, std::vector{z}), std::invalid_argument);
}

TEST(SmoothL1, ContinuousWithContinuousSlopeAtOne) {
  for (double side : {1.0, -1.0}) {
    const double x = side;
    Tensor lo = Tensor::vector({x * (1 - 1e-12)}, true), hi = Tensor::vector({x * (1 + 1e-12)}, true);
    Tensor a = vgkit::ops::sum(vgkit::ops::smooth_l1(lo)), b = vgkit::ops::sum(vgkit::ops::smooth_l1(hi));
    EXPECT_NEAR(a.item(), b.item(), 1e-9);
    vgkit::backward(a);
    vgkit::backward(b);
    EXPECT_NEAR(lo.grad()[0], hi.grad()[0], 1e-9);
  }
}

TEST(TotalLoss, Examples) {
  // Two proposals, the first a perfect match, the second far away.
  const vgkit::BBox gt{0, 0, 10, 10};
  const std::vector<vgkit::BBox> boxes{{0, 0, 10, 10}, {50, 50, 60, 60}};
  const auto targets = vgkit::make_targets(boxes, gt, 0.5);
  Tensor scores = Tensor::vector({0.5, 0.5});
  std::vector<double> off(8, 0.0);
  off[0] = 0.5;  // proposal 0 predicts 0.5 where the target is 0
  for (int c = 0; c < 4; ++c) off[4 + c] = targets.offsets[1].as_array()[c];
  Tensor offsets = Tensor::from({2, 4}, off);

  vgkit::LossConfig cfg;
  cfg.gamma = 1.0;
  auto l = vgkit::total_loss(scores, offsets, targets, cfg);
  EXPECT_NEAR(l.rank, 0.5 * std::log(2.0), 1e-12);
  EXPECT_NEAR(l.reg, 0.125 / 2, 1e-12);  // averaged over both proposals
  EXPECT_NEAR(l.total.item(), l.rank + l.reg, 1e-15);

  cfg.reg_mask_by_iou = true;
  l = vgkit::total_loss(scores, offsets, targets, cfg);
  EXPECT_NEAR(l.reg, 0.125, 1e-12);
  EXPECT_NEAR(l.total.item(), 0.34657 + 0.125, 1e-4);  // 0.4716

  cfg.gamma = 0.0;
  EXPECT_EQ(vgkit::total_loss(scores, offsets, targets, cfg).total.item(), l.rank);
  cfg.gamma = 1.0;
  cfg.regression = false;
  EXPECT_EQ(vgkit::total_loss(scores, offsets, targets, cfg).total.item(), l.rank);
}

TEST(TotalLoss, DegenerateSkipsRankingTerm) {
  const vgkit::BBox gt{0, 0, 10, 10};
  const std::vector<vgkit::BBox> boxes{{20, 20, 30, 30}, {50, 50, 60, 60}};
  const auto targets = vgkit::make_targets(boxes, gt, 0.5);
  Tensor scores = Tensor::vector({0.3, 0.7});
  Tensor offsets = Tensor::zeros({2, 4});
  vgkit::LossConfig cfg;
  cfg.gamma = 2.0;
  auto l = vgkit::total_loss(scores, offsets, targets, cfg);
  EXPECT_TRUE(l.rank_skipped);
  EXPECT_EQ(l.rank, 0.0);
  EXPECT_NEAR(l.total.item(), 2.0 * l.reg, 1e-15);
  cfg.regression = false;
  EXPECT_EQ(vgkit::total_loss(scores, offsets, targets, cfg).total.item(), 0.0);
  cfg.variant = vgkit::RankingVariant::softmax_single_label;
  EXPECT_FALSE(vgkit::total_loss(scores, offsets, targets, cfg).rank_skipped);
}

TEST(LossConfig, Validation) {
  vgkit::LossConfig c;
  c.eta = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.eta = 0.5;
  c.gamma = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(vgkit::parse_ranking_variant("softmax_single_label"), vgkit::RankingVariant::softmax_single_label);
  EXPECT_THROW(vgkit::parse_ranking_variant("hinge"), std::invalid_argument);
}

TEST(LossOracle, RandomInstancesMatchBruteForce) {
  vgtest::Rng rng(51);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = vgtest::uniform_index(rng, 1, 12);
    auto ious = vgtest::uniform_values(rng, n, 0, 1);
    if (t % 2) ious[vgtest::uniform_index(rng, 0, n - 1)] = vgtest::uniform(rng, 0.51, 1.0);
    const auto scores = vgtest::random_distribution(rng, n);
    const auto soft = vgkit::soft_labels(ious, 0.5);
    const auto ref = oracle::soft_labels(ious, 0.5);
    ASSERT_EQ(soft.degenerate, ref.empty());
    if (!ref.empty()) {
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(soft.values[i], ref[i], 1e-9);
      EXPECT_NEAR(vgkit::kld_loss(soft, scores), oracle::kld(ref, scores), 1e-9);
    }
    EXPECT_NEAR(vgkit::softmax_single_label_loss(scores, ious), oracle::softmax_single(scores, ious), 1e-9);

    std::vector<oracle::Offsets> pred(n), tgt(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 4; ++c) {
        pred[i][c] = vgtest::uniform(rng, -3, 3);
        tgt[i][c] = vgtest::uniform(rng, -3, 3);
      }
    }
    EXPECT_NEAR(vgkit::smooth_l1_reg_loss(to_targets(pred), to_targets(tgt)), oracle::smooth_l1_reg(pred, tgt), 1e-9);
  }
}

TEST(LossProperty, KldNonNegativeAndZeroOnSelf) {
  vgtest::Rng rng(52);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = vgtest::uniform_index(rng, 1, 10);
    vgkit::SoftLabels p{vgtest::random_distribution(rng, n), false};
    const auto q = vgtest::random_distribution(rng, n);
    // The 1e-12 floor can push the value a hair below zero.
    EXPECT_GE(vgkit::kld_loss(p, q), -1e-11);
    EXPECT_NEAR(vgkit::kld_loss(p, p.values), 0.0, 1e-9);
  }
}

TEST(LossProperty, SoftLabelsSumToOne) {
  vgtest::Rng rng(53);
  for (int t = 0; t < 1000; ++t) {
    const auto ious = vgtest::uniform_values(rng, vgtest::uniform_index(rng, 1, 10), 0, 1);
    const auto s = vgkit::soft_labels(ious, 0.5);
    double total = 0;
    for (double v : s.values) total += v;
    if (s.degenerate) {
      EXPECT_EQ(total, 0.0);
    } else {
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  }
}

// Moving mass toward the label peak helps while the peak's score stays at or
// below its label mass; past that point the KL divergence grows again.
TEST(LossProperty, RaisingMassAtLabelPeakNeverHurts) {
  vgtest::Rng rng(54);
  int checked = 0;
  for (int t = 0; t < 2000 && checked < 1000; ++t) {
    const std::size_t n = vgtest::uniform_index(rng, 2, 8);
    auto ious = vgtest::uniform_values(rng, n, 0, 1);
    ious[vgtest::uniform_index(rng, 0, n - 1)] = vgtest::uniform(rng, 0.6, 1.0);
    const auto soft = vgkit::soft_labels(ious, 0.5);
    const std::size_t k = vgkit::argmax_first(soft.values);
    auto s = vgtest::random_distribution(rng, n);
    if (s[k] >= soft.values[k]) continue;
    ++checked;
    const double before = vgkit::kld_loss(soft, s);
    const double bumped = vgtest::uniform(rng, s[k], soft.values[k]);
    const double rest = (1 - bumped) / (1 - s[k]);
    for (std::size_t i = 0; i < n; ++i) s[i] = i == k ? bumped : s[i] * rest;
    EXPECT_LE(vgkit::kld_loss(soft, s), before + 1e-12);
  }
  EXPECT_EQ(checked, 1000);
}
