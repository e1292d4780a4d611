#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vgkit/geometry.hpp"
#include "vgkit/grounding_head.hpp"
#include "vgkit/query_encoder.hpp"

namespace vgkit {

struct ModelDims {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 32;
  std::size_t query_dim = 64;
  std::size_t feature_dim = 32;
  std::size_t fused_dim = 64;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

std::string to_string(const ModelDims& dims);

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Query encoder plus grounding head.
class GroundingModel {
 public:
  GroundingModel() = default;
  GroundingModel(ModelDims dims, QueryEncoderParams encoder, GroundingHeadParams head);

  static GroundingModel initialize(const ModelDims& dims, std::uint64_t seed);

  const ModelDims& dims() const { return dims_; }
  const QueryEncoderParams& encoder() const { return encoder_; }
  const GroundingHeadParams& head() const { return head_; }
  QueryEncoderParams& encoder() { return encoder_; }
  GroundingHeadParams& head() { return head_; }

  // Stable order; names are the checkpoint keys.
  std::vector<NamedTensor> named_parameters() const;
  // Trainable tensors; the regression head is left out when it is unused.
  std::vector<Tensor> parameters(bool include_regression = true) const;

  // Deep copy with independent storage.
  GroundingModel snapshot() const;

 private:
  ModelDims dims_;
  QueryEncoderParams encoder_;
  GroundingHeadParams head_;
};

struct ForwardOutput {
  Tensor raw_scores;  // [N]
  Tensor scores;      // [N], softmax of raw_scores
  Tensor offsets;     // [N, 4]
};

// `visual` is the sample's visual_matrix. Throws when dimensions disagree with
// the model.
ForwardOutput forward(const GroundingModel& model, const TokenSequence& tokens, const Tensor& visual);
ForwardOutput forward(const GroundingModel& model, const GroundingSample& sample);

// Index of the largest value; the lowest index wins ties.
std::size_t argmax_first(std::span<const double> values);

struct Prediction {
  std::size_t index = 0;
  BBox proposal_box;  // unrefined argmax proposal
  BBox refined_box;
};

// Highest-scoring proposal refined by its own predicted offsets. With
// refine = false the proposal box is returned as is (models trained without
// the regression term).
Prediction predict(const GroundingModel& model, const GroundingSample& sample, bool refine = true);
Prediction predict_from_output(const ForwardOutput& out, const GroundingSample& sample, bool refine = true);

}  // namespace vgkit
