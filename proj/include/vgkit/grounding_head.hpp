#pragma once

#include <cstddef>
#include <vector>

#include "vgkit/geometry.hpp"
#include "vgkit/optim.hpp"
#include "vgkit/tensor.hpp"
#include "vgkit/vocab.hpp"

namespace vgkit {

struct Proposal {
  BBox box;
  std::vector<double> feature;  // d_v entries

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

struct GroundingSample {
  std::size_t id = 0;
  ImageSize image;
  std::vector<Proposal> proposals;
  TokenSequence tokens;
  BBox gt;
};

// L2-normalized visual part followed by the 5-D spatial feature.
std::vector<double> assemble_visual_feature(const Proposal& proposal, ImageSize image, std::size_t feature_dim);

// [N, d_v+5] matrix of assembled features, one row per proposal.
Tensor visual_matrix(const GroundingSample& sample, std::size_t feature_dim);

struct GroundingHeadParams {
  Tensor w_fuse;   // [d_q + d_v + 5, d_o]
  Tensor b_fuse;   // [d_o]
  Tensor w_score;  // [d_o, 1]
  Tensor b_score;  // [1]
  Tensor w_reg;    // [d_o, 4]
  Tensor b_reg;    // [4]

  std::size_t fused_dim() const { return b_fuse.dim(0); }
  std::size_t input_dim() const { return w_fuse.dim(0); }
};

GroundingHeadParams init_grounding_head(std::size_t query_dim, std::size_t feature_dim, std::size_t fused_dim,
                                        Rng& rng);

// ReLU(W_f^T (q || v) + b_f). `visual` is one assembled feature [d_v+5], giving
// a [d_o] result, or a matrix [N, d_v+5], giving [N, d_o].
Tensor fuse(const Tensor& query, const Tensor& visual, const GroundingHeadParams& params);

// Unnormalized scores W_s^T f + b_s, one per row of `fused` -> [N].
Tensor raw_scores(const Tensor& fused, const GroundingHeadParams& params);
// Softmax of raw_scores across proposals -> [N].
Tensor score_all(const Tensor& fused, const GroundingHeadParams& params);
// Box offsets W_t^T f + b_t per proposal -> [N, 4].
Tensor regress_all(const Tensor& fused, const GroundingHeadParams& params);

}  // namespace vgkit
