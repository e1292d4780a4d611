#include "vgkit/model.hpp"

#include <algorithm>
#include <stdexcept>

#include "vgkit/ops.hpp"

namespace vgkit {

std::string to_string(const ModelDims& dims) {
  return "vocab=" + std::to_string(dims.vocab_size) + " d_e=" + std::to_string(dims.embed_dim) +
         " d_q=" + std::to_string(dims.query_dim) + " d_v=" + std::to_string(dims.feature_dim) +
         " d_o=" + std::to_string(dims.fused_dim);
}

GroundingModel::GroundingModel(ModelDims dims, QueryEncoderParams encoder, GroundingHeadParams head)
    : dims_(dims), encoder_(std::move(encoder)), head_(std::move(head)) {
  if (encoder_.vocab_size() != dims_.vocab_size || encoder_.embed_dim() != dims_.embed_dim ||
      encoder_.query_dim() != dims_.query_dim || head_.fused_dim() != dims_.fused_dim ||
      head_.input_dim() != dims_.query_dim + dims_.feature_dim + 5) {
    throw std::invalid_argument("GroundingModel: parameter shapes disagree with " + to_string(dims_));
  }
}

GroundingModel GroundingModel::initialize(const ModelDims& dims, std::uint64_t seed) {
  if (dims.vocab_size < 2 || dims.embed_dim == 0 || dims.query_dim == 0 || dims.feature_dim == 0 ||
      dims.fused_dim == 0) {
    throw std::invalid_argument("GroundingModel: invalid dimensions " + to_string(dims));
  }
  Rng rng = make_rng(seed, /*stream=*/0x1417);
  auto encoder = init_query_encoder(dims.vocab_size, dims.embed_dim, dims.query_dim, rng);
  auto head = init_grounding_head(dims.query_dim, dims.feature_dim, dims.fused_dim, rng);
  return GroundingModel(dims, std::move(encoder), std::move(head));
}

std::vector<NamedTensor> GroundingModel::named_parameters() const {
  return {
      {"encoder.embedding", encoder_.embedding}, {"encoder.w_input", encoder_.w_input},
      {"encoder.w_hidden", encoder_.w_hidden},   {"encoder.bias", encoder_.bias},
      {"head.w_fuse", head_.w_fuse},             {"head.b_fuse", head_.b_fuse},
      {"head.w_score", head_.w_score},           {"head.b_score", head_.b_score},
      {"head.w_reg", head_.w_reg},               {"head.b_reg", head_.b_reg},
  };
}

std::vector<Tensor> GroundingModel::parameters(bool include_regression) const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named_parameters()) {
    if (!include_regression && (name == "head.w_reg" || name == "head.b_reg")) continue;
    out.push_back(t);
  }
  return out;
}

GroundingModel GroundingModel::snapshot() const {
  QueryEncoderParams enc{encoder_.embedding.clone(true), encoder_.w_input.clone(true),
                         encoder_.w_hidden.clone(true), encoder_.bias.clone(true)};
  GroundingHeadParams head{head_.w_fuse.clone(true),  head_.b_fuse.clone(true), head_.w_score.clone(true),
                           head_.b_score.clone(true), head_.w_reg.clone(true),  head_.b_reg.clone(true)};
  return GroundingModel(dims_, std::move(enc), std::move(head));
}

ForwardOutput forward(const GroundingModel& model, const TokenSequence& tokens, const Tensor& visual) {
  const auto& dims = model.dims();
  if (visual.rank() != 2 || visual.dim(1) != dims.feature_dim + 5) {
    throw std::invalid_argument("forward: visual features " + shape_to_string(visual.shape()) +
                                " do not match model " + to_string(dims));
  }
  Tensor query = encode_query(tokens, model.encoder());
  Tensor fused = fuse(query, visual, model.head());
  ForwardOutput out;
  out.raw_scores = raw_scores(fused, model.head());
  out.scores = ops::softmax(out.raw_scores);
  out.offsets = regress_all(fused, model.head());
  return out;
}

ForwardOutput forward(const GroundingModel& model, const GroundingSample& sample) {
  return forward(model, sample.tokens, visual_matrix(sample, model.dims().feature_dim));
}

std::size_t argmax_first(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax_first: empty input");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

Prediction predict_from_output(const ForwardOutput& out, const GroundingSample& sample, bool refine) {
  Prediction p;
  p.index = argmax_first(out.raw_scores.values());
  p.proposal_box = sample.proposals.at(p.index).box;
  if (!refine) {
    p.refined_box = p.proposal_box;
    return p;
  }
  auto offsets = out.offsets.values().subspan(p.index * 4, 4);
  p.refined_box = decode_regression(p.proposal_box, RegressionTarget::from_array(offsets), sample.image);
  return p;
}

Prediction predict(const GroundingModel& model, const GroundingSample& sample, bool refine) {
  return predict_from_output(forward(model, sample), sample, refine);
}

}  // namespace vgkit
