#include "vgkit/evaluation.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace vgkit {

using nlohmann::ordered_json;

namespace {

void check_dims(const GroundingModel& model, const GroundingSample& s) {
  for (const auto& p : s.proposals) {
    if (p.feature.size() != model.dims().feature_dim) {
      throw std::invalid_argument("evaluate: fingerprint mismatch, sample " + std::to_string(s.id) + " has " +
                                  std::to_string(p.feature.size()) + "-d features but the model expects " +
                                  std::to_string(model.dims().feature_dim));
    }
  }
  for (auto t : s.tokens) {
    if (t >= model.dims().vocab_size) {
      throw std::invalid_argument("evaluate: fingerprint mismatch, token index outside the model vocabulary");
    }
  }
}

ordered_json box_json(const BBox& b) { return ordered_json::array({b.x_tl, b.y_tl, b.x_br, b.y_br}); }

}  // namespace

std::vector<EvalSample> eval_samples(const std::vector<GroundingSample>& samples) {
  std::vector<EvalSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    EvalSample e;
    e.gt = s.gt;
    e.image = s.image;
    for (const auto& p : s.proposals) e.proposals.push_back(p.box);
    out.push_back(std::move(e));
  }
  return out;
}

EvalResult evaluate(const GroundingModel& model, bool refine, const std::vector<GroundingSample>& samples,
                    double threshold) {
  if (samples.empty()) throw std::invalid_argument("evaluate: empty dataset");
  EvalResult result;
  result.predictions.reserve(samples.size());
  std::vector<BBox> refined, raw, gts;
  for (const auto& s : samples) {
    check_dims(model, s);
    const Prediction p = predict(model, s, refine);
    PredictionRow row;
    row.id = s.id;
    row.index = p.index;
    row.proposal_box = p.proposal_box;
    row.refined_box = p.refined_box;
    row.iou = iou(p.refined_box, s.gt);
    row.correct = covers(p.refined_box, s.gt, threshold) == 1;
    row.proposal_correct = covers(p.proposal_box, s.gt, threshold) == 1;
    result.predictions.push_back(row);
    refined.push_back(p.refined_box);
    raw.push_back(p.proposal_box);
    gts.push_back(s.gt);
  }
  auto& r = result.report;
  r.threshold = threshold;
  r.accuracy = grounding_accuracy(refined, gts, threshold);
  r.unrefined_accuracy = grounding_accuracy(raw, gts, threshold);
  r.proposals = proposal_stats(eval_samples(samples), threshold);
  return result;
}

double validation_accuracy(const GroundingModel& model, bool refine, const std::vector<GroundingSample>& samples,
                           double threshold) {
  std::size_t hits = 0;
  for (const auto& s : samples) hits += static_cast<std::size_t>(covers(predict(model, s, refine).refined_box, s.gt, threshold));
  return samples.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(samples.size());
}

std::string report_json(const MetricReport& report, const std::vector<std::pair<std::string, std::string>>& extra) {
  const auto& p = report.proposals;
  ordered_json j;
  j["accuracy"] = report.accuracy;
  j["unrefined_accuracy"] = report.unrefined_accuracy;
  j["s_dis"] = p.discrimination;
  if (p.diversity.value) {
    j["s_div"] = *p.diversity.value;
  } else {
    j["s_div"] = nullptr;
    j["s_div_reason"] = p.diversity.reason;
  }
  j["samples"] = p.samples;
  j["proposals_per_sample"] = p.samples ? p.proposals / p.samples : 0;
  j["covered_samples"] = p.covered_samples;
  j["covering_proposals"] = p.covering_proposals;
  j["degenerate"] = p.degenerate;
  j["threshold"] = report.threshold;
  for (const auto& [key, value] : extra) j[key] = value;
  return j.dump();
}

std::string report_table(const MetricReport& report) {
  const auto& p = report.proposals;
  char buf[1024];
  char num[32];
  std::string div = "null (" + p.diversity.reason + ")";
  if (p.diversity.value) {
    std::snprintf(num, sizeof(num), "%.4f", *p.diversity.value);
    div = num;
  }
  std::snprintf(buf, sizeof(buf),
                "accuracy            %.4f\n"
                "unrefined accuracy  %.4f\n"
                "S_DIS               %.4f\n"
                "S_DIV               %s\n"
                "samples             %zu\n"
                "covering proposals  %zu\n"
                "degenerate samples  %zu\n",
                report.accuracy, report.unrefined_accuracy, p.discrimination, div.c_str(), p.samples,
                p.covering_proposals, p.degenerate);
  return buf;
}

void write_predictions(std::ostream& out, const std::vector<PredictionRow>& rows) {
  for (const auto& r : rows) {
    ordered_json j{{"id", r.id},
                   {"index", r.index},
                   {"proposal", box_json(r.proposal_box)},
                   {"refined", box_json(r.refined_box)},
                   {"iou", r.iou},
                   {"correct", r.correct ? 1 : 0},
                   {"proposal_correct", r.proposal_correct ? 1 : 0}};
    out << j.dump() << '\n';
  }
}

}  // namespace vgkit
