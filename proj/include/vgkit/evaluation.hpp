#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vgkit/metrics.hpp"
#include "vgkit/model.hpp"

namespace vgkit {

struct PredictionRow {
  std::size_t id = 0;
  std::size_t index = 0;
  BBox proposal_box;
  BBox refined_box;
  double iou = 0.0;  // refined box vs ground truth
  bool correct = false;
  bool proposal_correct = false;
};

struct MetricReport {
  double accuracy = 0.0;
  double unrefined_accuracy = 0.0;
  ProposalStats proposals;
  double threshold = kCoverThreshold;
};

struct EvalResult {
  MetricReport report;
  std::vector<PredictionRow> predictions;
};

// Runs predict on every sample. Throws std::invalid_argument when the samples'
// feature dimension does not match the model.
EvalResult evaluate(const GroundingModel& model, bool refine, const std::vector<GroundingSample>& samples,
                    double threshold = kCoverThreshold);

// Accuracy only, for validation during training.
double validation_accuracy(const GroundingModel& model, bool refine, const std::vector<GroundingSample>& samples,
                           double threshold = kCoverThreshold);

std::vector<EvalSample> eval_samples(const std::vector<GroundingSample>& samples);

// Single-line JSON document; undefined diversity is written as null with a
// reason field. `extra` string fields (fingerprints) are appended in order.
std::string report_json(const MetricReport& report,
                        const std::vector<std::pair<std::string, std::string>>& extra = {});
// Aligned human-readable table.
std::string report_table(const MetricReport& report);

// One JSON object per prediction.
void write_predictions(std::ostream& out, const std::vector<PredictionRow>& rows);

}  // namespace vgkit
