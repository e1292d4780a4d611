#include "vgkit/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vgkit/model.hpp"
#include "vgkit/ops.hpp"

namespace vgkit {

std::string_view to_string(RankingVariant v) {
  return v == RankingVariant::kld ? "kld" : "softmax_single_label";
}

RankingVariant parse_ranking_variant(std::string_view text) {
  if (text == "kld") return RankingVariant::kld;
  if (text == "softmax_single_label" || text == "softmax") return RankingVariant::softmax_single_label;
  throw std::invalid_argument("unknown ranking variant '" + std::string(text) + "'");
}

void LossConfig::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("loss.eta must lie in (0,1)");
  if (!(gamma >= 0.0)) throw std::invalid_argument("loss.gamma must be non-negative");
}

SoftLabels soft_labels(std::span<const double> ious, double eta) {
  SoftLabels out;
  out.values.assign(ious.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < ious.size(); ++i) {
    const double v = ious[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("soft_labels: IoU " + std::to_string(v) + " at index " + std::to_string(i) +
                                  " outside [0,1]");
    }
    if (v > eta) {
      out.values[i] = v;
      total += v;
    }
  }
  if (total == 0.0) {
    out.degenerate = true;
    return out;
  }
  for (auto& v : out.values) v /= total;
  return out;
}

Tensor kld_loss(const SoftLabels& target, const Tensor& scores) {
  if (target.degenerate) throw std::invalid_argument("kld_loss: degenerate soft labels");
  const std::size_t n = target.values.size();
  if (scores.numel() != n) {
    throw std::invalid_argument("kld_loss: " + std::to_string(n) + " labels vs scores of shape " +
                                shape_to_string(scores.shape()));
  }
  std::vector<std::size_t> support;
  std::vector<double> weights;
  double entropy_term = 0.0;  // sum s* log s*
  for (std::size_t i = 0; i < n; ++i) {
    const double s = target.values[i];
    if (s > 0.0) {
      support.push_back(i);
      weights.push_back(s);
      entropy_term += s * std::log(s);
    }
  }
  using namespace ops;
  Tensor flat = reshape(scores, {n});
  Tensor log_s = log(add_scalar(gather(flat, support), kLogFloor));
  Tensor cross = sum(mul(log_s, Tensor::vector(std::move(weights))));
  return scale(sub(Tensor::scalar(entropy_term), cross), 1.0 / static_cast<double>(n));
}

double kld_loss(const SoftLabels& target, std::span<const double> scores) {
  return kld_loss(target, Tensor::vector({scores.begin(), scores.end()})).item();
}

Tensor softmax_single_label_loss(const Tensor& scores, std::span<const double> ious) {
  if (ious.empty() || scores.numel() != ious.size()) {
    throw std::invalid_argument("softmax_single_label_loss: " + std::to_string(ious.size()) +
                                " IoUs vs scores of shape " + shape_to_string(scores.shape()));
  }
  const std::size_t k = argmax_first(ious);
  using namespace ops;
  Tensor picked = gather(reshape(scores, {scores.numel()}), std::span<const std::size_t>(&k, 1));
  return scale(log(add_scalar(picked, kLogFloor)), -1.0);
}

double softmax_single_label_loss(std::span<const double> scores, std::span<const double> ious) {
  return softmax_single_label_loss(Tensor::vector({scores.begin(), scores.end()}), ious).item();
}

Tensor smooth_l1_reg_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape() || pred.rank() != 2 || pred.dim(1) != 4) {
    throw std::invalid_argument("smooth_l1_reg_loss: shape mismatch " + shape_to_string(pred.shape()) + " vs " +
                                shape_to_string(target.shape()));
  }
  using namespace ops;
  return scale(sum(smooth_l1(sub(pred, target))), 1.0 / static_cast<double>(pred.dim(0)));
}

namespace {

Tensor offsets_tensor(std::span<const RegressionTarget> targets) {
  std::vector<double> values;
  values.reserve(targets.size() * 4);
  for (const auto& t : targets) {
    for (double v : t.as_array()) values.push_back(v);
  }
  return Tensor::from({targets.size(), 4}, std::move(values));
}

}  // namespace

double smooth_l1_reg_loss(std::span<const RegressionTarget> pred, std::span<const RegressionTarget> target) {
  if (pred.size() != target.size() || pred.empty()) {
    throw std::invalid_argument("smooth_l1_reg_loss: " + std::to_string(pred.size()) + " predictions vs " +
                                std::to_string(target.size()) + " targets");
  }
  return smooth_l1_reg_loss(offsets_tensor(pred), offsets_tensor(target)).item();
}

SampleTargets make_targets(std::span<const BBox> proposals, const BBox& gt, double eta) {
  SampleTargets out;
  out.ious.reserve(proposals.size());
  out.offsets.reserve(proposals.size());
  for (const auto& p : proposals) {
    out.ious.push_back(iou(p, gt));
    out.offsets.push_back(encode_regression(p, gt));
  }
  out.soft = soft_labels(out.ious, eta);
  return out;
}

LossBreakdown total_loss(const Tensor& scores, const Tensor& offsets, const SampleTargets& targets,
                         const LossConfig& config) {
  LossBreakdown out;
  Tensor rank;
  if (config.variant == RankingVariant::kld) {
    if (targets.soft.degenerate) {
      out.rank_skipped = true;
    } else {
      rank = kld_loss(targets.soft, scores);
    }
  } else {
    rank = softmax_single_label_loss(scores, targets.ious);
  }
  if (rank.defined()) out.rank = rank.item();

  Tensor reg;
  if (config.regression) {
    if (config.reg_mask_by_iou) {
      std::vector<std::size_t> keep;
      std::vector<RegressionTarget> kept_targets;
      for (std::size_t i = 0; i < targets.ious.size(); ++i) {
        if (targets.ious[i] > config.eta) {
          keep.push_back(i);
          kept_targets.push_back(targets.offsets[i]);
        }
      }
      if (!keep.empty()) reg = smooth_l1_reg_loss(ops::gather(offsets, keep), offsets_tensor(kept_targets));
    } else {
      reg = smooth_l1_reg_loss(offsets, offsets_tensor(targets.offsets));
    }
    if (reg.defined()) out.reg = reg.item();
  }

  if (rank.defined() && reg.defined()) {
    out.total = ops::add(rank, ops::scale(reg, config.gamma));
  } else if (rank.defined()) {
    out.total = rank;
  } else if (reg.defined()) {
    out.total = ops::scale(reg, config.gamma);
  } else {
    out.total = Tensor::scalar(0.0);
  }
  return out;
}

}  // namespace vgkit
