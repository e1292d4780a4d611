#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vgkit/geometry.hpp"
#include "vgkit/tensor.hpp"

namespace vgkit {

// Floor added inside every log in the loss code.
inline constexpr double kLogFloor = 1e-12;

enum class RankingVariant { kld, softmax_single_label };

std::string_view to_string(RankingVariant v);
RankingVariant parse_ranking_variant(std::string_view text);

struct LossConfig {
  double eta = 0.5;    // IoU threshold, strict
  double gamma = 1.0;  // regression weight
  RankingVariant variant = RankingVariant::kld;
  bool regression = true;
  // Restricts the regression term to proposals with IoU > eta. Off by default.
  bool reg_mask_by_iou = false;

  void validate() const;
};

// Thresholded, L1-normalized IoUs. When no IoU exceeds eta the distribution is
// degenerate and all entries are zero.
struct SoftLabels {
  std::vector<double> values;
  bool degenerate = false;
};

SoftLabels soft_labels(std::span<const double> ious, double eta);

// (1/N) sum_i s*_i log(s*_i / s_i) with 0 log 0 = 0 and a floor inside the
// denominator. Throws on degenerate labels or a length mismatch.
Tensor kld_loss(const SoftLabels& target, const Tensor& scores);
double kld_loss(const SoftLabels& target, std::span<const double> scores);

// -log(s_k + floor), k the first index of the largest IoU.
Tensor softmax_single_label_loss(const Tensor& scores, std::span<const double> ious);
double softmax_single_label_loss(std::span<const double> scores, std::span<const double> ious);

// (1/N) sum over proposals and coordinates of smooth-L1(pred - target).
// pred and target are [N, 4].
Tensor smooth_l1_reg_loss(const Tensor& pred, const Tensor& target);
double smooth_l1_reg_loss(std::span<const RegressionTarget> pred, std::span<const RegressionTarget> target);

// Per-sample quantities the objective needs, independent of the model.
struct SampleTargets {
  std::vector<double> ious;             // proposal vs ground truth
  SoftLabels soft;                      // from ious and eta
  std::vector<RegressionTarget> offsets;  // encode(proposal_i, gt)
};

SampleTargets make_targets(std::span<const BBox> proposals, const BBox& gt, double eta);

struct LossBreakdown {
  Tensor total;
  double rank = 0.0;
  double reg = 0.0;
  bool rank_skipped = false;  // degenerate soft labels under the kld variant
};

// L = L_rank + gamma * L_reg. Under the kld variant a degenerate sample
// contributes no ranking term; with regression disabled L = L_rank.
LossBreakdown total_loss(const Tensor& scores, const Tensor& offsets, const SampleTargets& targets,
                         const LossConfig& config);

}  // namespace vgkit
