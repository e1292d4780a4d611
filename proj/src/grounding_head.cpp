#include "vgkit/grounding_head.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vgkit/ops.hpp"

namespace vgkit {

std::vector<double> assemble_visual_feature(const Proposal& proposal, ImageSize image, std::size_t feature_dim) {
  if (proposal.feature.size() != feature_dim) {
    throw std::invalid_argument("assemble_visual_feature: expected " + std::to_string(feature_dim) +
                                " visual entries, got " + std::to_string(proposal.feature.size()));
  }
  double sq = 0.0;
  for (double v : proposal.feature) sq += v * v;
  const double norm = std::sqrt(sq);
  std::vector<double> out;
  out.reserve(feature_dim + 5);
  for (double v : proposal.feature) out.push_back(norm > 0.0 ? v / norm : v);
  for (double v : spatial_feature(proposal.box, image)) out.push_back(v);
  return out;
}

Tensor visual_matrix(const GroundingSample& sample, std::size_t feature_dim) {
  if (sample.proposals.empty()) throw std::invalid_argument("visual_matrix: sample has no proposals");
  std::vector<double> values;
  values.reserve(sample.proposals.size() * (feature_dim + 5));
  for (const auto& p : sample.proposals) {
    auto row = assemble_visual_feature(p, sample.image, feature_dim);
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor::from({sample.proposals.size(), feature_dim + 5}, std::move(values));
}

GroundingHeadParams init_grounding_head(std::size_t query_dim, std::size_t feature_dim, std::size_t fused_dim,
                                        Rng& rng) {
  GroundingHeadParams p;
  p.w_fuse = xavier_init({query_dim + feature_dim + 5, fused_dim}, rng);
  p.b_fuse = Tensor::zeros({fused_dim}, true);
  p.w_score = xavier_init({fused_dim, 1}, rng);
  p.b_score = Tensor::zeros({1}, true);
  p.w_reg = xavier_init({fused_dim, 4}, rng);
  p.b_reg = Tensor::zeros({4}, true);
  return p;
}

Tensor fuse(const Tensor& query, const Tensor& visual, const GroundingHeadParams& params) {
  using namespace ops;
  if (query.rank() != 1) {
    throw std::invalid_argument("fuse: query must be a vector, got " + shape_to_string(query.shape()));
  }
  const std::size_t expected = params.input_dim();
  if (visual.rank() == 1) {
    if (query.dim(0) + visual.dim(0) != expected) {
      throw std::invalid_argument("fuse: shape mismatch " + shape_to_string(query.shape()) + " || " +
                                  shape_to_string(visual.shape()) + " vs weights " +
                                  shape_to_string(params.w_fuse.shape()));
    }
    Tensor joint = reshape(concat(query, visual), {1, expected});
    return reshape(relu(add_bias(matmul(joint, params.w_fuse), params.b_fuse)), {params.fused_dim()});
  }
  if (visual.rank() != 2 || query.dim(0) + visual.dim(1) != expected) {
    throw std::invalid_argument("fuse: shape mismatch " + shape_to_string(query.shape()) + " || " +
                                shape_to_string(visual.shape()) + " vs weights " +
                                shape_to_string(params.w_fuse.shape()));
  }
  Tensor joint = concat(repeat_rows(query, visual.dim(0)), visual);
  return relu(add_bias(matmul(joint, params.w_fuse), params.b_fuse));
}

namespace {

Tensor as_rows(const Tensor& fused, const GroundingHeadParams& params, const char* kernel) {
  const std::size_t d = params.fused_dim();
  if (fused.rank() == 1 && fused.dim(0) == d) return ops::reshape(fused, {1, d});
  if (fused.rank() == 2 && fused.dim(1) == d) return fused;
  throw std::invalid_argument(std::string(kernel) + ": fused features of shape " + shape_to_string(fused.shape()) +
                              " do not match fused dim " + std::to_string(d));
}

}  // namespace

Tensor raw_scores(const Tensor& fused, const GroundingHeadParams& params) {
  Tensor rows = as_rows(fused, params, "score_all");
  Tensor s = ops::add_bias(ops::matmul(rows, params.w_score), params.b_score);
  return ops::reshape(s, {rows.dim(0)});
}

Tensor score_all(const Tensor& fused, const GroundingHeadParams& params) {
  return ops::softmax(raw_scores(fused, params));
}

Tensor regress_all(const Tensor& fused, const GroundingHeadParams& params) {
  Tensor rows = as_rows(fused, params, "regress_all");
  return ops::add_bias(ops::matmul(rows, params.w_reg), params.b_reg);
}

}  // namespace vgkit
