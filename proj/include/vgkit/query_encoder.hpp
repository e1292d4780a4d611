#pragma once

#include <cstddef>
#include <span>

#include "vgkit/optim.hpp"
#include "vgkit/tensor.hpp"

namespace vgkit {

// Word embedding followed by a one-layer LSTM. Gate columns are laid out as
// [input | forget | candidate | output], each query_dim wide.
struct QueryEncoderParams {
  Tensor embedding;  // [vocab, embed_dim]
  Tensor w_input;    // [embed_dim, 4*query_dim]
  Tensor w_hidden;   // [query_dim, 4*query_dim]
  Tensor bias;       // [4*query_dim]

  std::size_t vocab_size() const { return embedding.dim(0); }
  std::size_t embed_dim() const { return embedding.dim(1); }
  std::size_t query_dim() const { return w_hidden.dim(0); }
};

// Xavier weights, zero biases except the forget gate, which starts at 1.
QueryEncoderParams init_query_encoder(std::size_t vocab_size, std::size_t embed_dim, std::size_t query_dim, Rng& rng);

struct LstmState {
  Tensor hidden;  // [1, query_dim]
  Tensor cell;    // [1, query_dim]
};

// One LSTM step on an embedded token x [1, embed_dim].
LstmState lstm_step(const Tensor& x, const LstmState& prev, const QueryEncoderParams& params);

// Hidden state after the last token, as a query_dim vector. Starts from a zero
// state. Throws on an empty sequence or an out-of-range index.
Tensor encode_query(std::span<const std::size_t> tokens, const QueryEncoderParams& params);

}  // namespace vgkit
