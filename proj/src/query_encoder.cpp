#include "vgkit/query_encoder.hpp"

#include <stdexcept>
#include <string>

#include "vgkit/ops.hpp"

namespace vgkit {

QueryEncoderParams init_query_encoder(std::size_t vocab_size, std::size_t embed_dim, std::size_t query_dim,
                                      Rng& rng) {
  QueryEncoderParams p;
  p.embedding = xavier_init({vocab_size, embed_dim}, rng);
  p.w_input = xavier_init({embed_dim, 4 * query_dim}, rng);
  p.w_hidden = xavier_init({query_dim, 4 * query_dim}, rng);
  p.bias = Tensor::zeros({4 * query_dim}, true);
  auto b = p.bias.mutable_values();
  for (std::size_t i = query_dim; i < 2 * query_dim; ++i) b[i] = 1.0;
  return p;
}

LstmState lstm_step(const Tensor& x, const LstmState& prev, const QueryEncoderParams& params) {
  using namespace ops;
  const std::size_t d = params.query_dim();
  Tensor gates = add_bias(add(matmul(x, params.w_input), matmul(prev.hidden, params.w_hidden)), params.bias);
  Tensor input_gate = sigmoid(slice_last(gates, 0, d));
  Tensor forget_gate = sigmoid(slice_last(gates, d, d));
  Tensor candidate = ops::tanh(slice_last(gates, 2 * d, d));
  Tensor output_gate = sigmoid(slice_last(gates, 3 * d, d));
  Tensor cell = add(mul(forget_gate, prev.cell), mul(input_gate, candidate));
  Tensor hidden = mul(output_gate, ops::tanh(cell));
  return {hidden, cell};
}

Tensor encode_query(std::span<const std::size_t> tokens, const QueryEncoderParams& params) {
  if (tokens.empty()) throw std::invalid_argument("encode_query: empty token sequence");
  const std::size_t vocab = params.vocab_size();
  for (auto t : tokens) {
    if (t >= vocab) {
      throw std::invalid_argument("encode_query: token index " + std::to_string(t) + " outside vocabulary of " +
                                  std::to_string(vocab));
    }
  }
  const std::size_t d = params.query_dim();
  LstmState state{Tensor::zeros({1, d}), Tensor::zeros({1, d})};
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    state = lstm_step(ops::gather(params.embedding, tokens.subspan(i, 1)), state, params);
  }
  return ops::reshape(state.hidden, {d});
}

}  // namespace vgkit
