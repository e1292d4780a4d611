#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vgkit/geometry.hpp"

namespace vgkit {

inline constexpr double kCoverThreshold = 0.5;

struct EvalSample {
  std::vector<BBox> proposals;
  BBox gt;
  ImageSize image;
};

// 1 iff iou(proposal, gt) > threshold (strict).
int covers(const BBox& proposal, const BBox& gt, double threshold = kCoverThreshold);

// Fraction of samples with at least one covering proposal. Throws on an empty
// list.
double discrimination_score(std::span<const EvalSample> samples, double threshold = kCoverThreshold);

// A ratio that may be undefined; `reason` explains a missing value.
struct OptionalRatio {
  std::optional<double> value;
  std::string reason;
};

// Reciprocal of the mean number of covering proposals per sample; undefined
// when nothing is covered.
OptionalRatio diversity_score(std::span<const EvalSample> samples, double threshold = kCoverThreshold);

// Fraction of prediction/ground-truth pairs with IoU > threshold.
double grounding_accuracy(std::span<const BBox> predictions, std::span<const BBox> gts,
                          double threshold = kCoverThreshold);

struct ProposalStats {
  std::size_t samples = 0;            // M
  std::size_t proposals = 0;          // total over all samples
  std::size_t covered_samples = 0;    // samples with >= 1 covering proposal
  std::size_t covering_proposals = 0; // sum over samples of covering count
  std::size_t degenerate = 0;         // samples whose best IoU <= threshold
  double discrimination = 0.0;
  OptionalRatio diversity;
};

ProposalStats proposal_stats(std::span<const EvalSample> samples, double threshold = kCoverThreshold);

}  // namespace vgkit
