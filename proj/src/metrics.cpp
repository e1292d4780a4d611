#include "vgkit/metrics.hpp"

#include <stdexcept>

namespace vgkit {

int covers(const BBox& proposal, const BBox& gt, double threshold) { return iou(proposal, gt) > threshold ? 1 : 0; }

ProposalStats proposal_stats(std::span<const EvalSample> samples, double threshold) {
  if (samples.empty()) throw std::invalid_argument("proposal metrics: no samples");
  ProposalStats s;
  s.samples = samples.size();
  for (const auto& sample : samples) {
    std::size_t covering = 0;
    for (const auto& p : sample.proposals) covering += static_cast<std::size_t>(covers(p, sample.gt, threshold));
    s.proposals += sample.proposals.size();
    s.covering_proposals += covering;
    if (covering > 0) {
      ++s.covered_samples;
    } else {
      ++s.degenerate;
    }
  }
  const double m = static_cast<double>(s.samples);
  s.discrimination = static_cast<double>(s.covered_samples) / m;
  if (s.covering_proposals == 0) {
    s.diversity.reason = "no proposal covers any ground truth";
  } else {
    s.diversity.value = 1.0 / (static_cast<double>(s.covering_proposals) / m);
  }
  return s;
}

double discrimination_score(std::span<const EvalSample> samples, double threshold) {
  return proposal_stats(samples, threshold).discrimination;
}

OptionalRatio diversity_score(std::span<const EvalSample> samples, double threshold) {
  return proposal_stats(samples, threshold).diversity;
}

double grounding_accuracy(std::span<const BBox> predictions, std::span<const BBox> gts, double threshold) {
  if (predictions.size() != gts.size()) {
    throw std::invalid_argument("grounding_accuracy: " + std::to_string(predictions.size()) + " predictions vs " +
                                std::to_string(gts.size()) + " ground truths");
  }
  if (predictions.empty()) throw std::invalid_argument("grounding_accuracy: no predictions");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hits += static_cast<std::size_t>(covers(predictions[i], gts[i], threshold));
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

}  // namespace vgkit
