#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "random_gen.hpp"
#include "vgkit/ops.hpp"
#include "vgkit/query_encoder.hpp"
#include "vgkit/vocab.hpp"

using vgkit::Tensor;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

vgkit::QueryEncoderParams zero_params(std::size_t vocab, std::size_t e, std::size_t q) {
  return {vgkit::Tensor::filled({vocab, e}, 0.3), Tensor::zeros({e, 4 * q}), Tensor::zeros({q, 4 * q}),
          Tensor::zeros({4 * q})};
}

}  // namespace

TEST(QueryEncoder, ZeroWeightsGiveZeroOutput) {
  const auto p = zero_params(4, 3, 2);
  const vgkit::TokenSequence tokens{1, 2, 3};
  Tensor q = vgkit::encode_query(tokens, p);
  ASSERT_EQ(q.shape(), (vgkit::Shape{2}));
  for (double v : q.values()) EXPECT_EQ(v, 0.0);
}

TEST(QueryEncoder, SingleTokenIsOneStep) {
  vgtest::Rng rng(31);
  vgkit::QueryEncoderParams p{vgtest::random_tensor(rng, {5, 3}), vgtest::random_tensor(rng, {3, 8}),
                              vgtest::random_tensor(rng, {2, 8}), vgtest::random_tensor(rng, {8})};
  const std::size_t tokens[] = {4};
  Tensor q = vgkit::encode_query(tokens, p);
  const std::size_t idx[] = {4};
  vgkit::LstmState zero{Tensor::zeros({1, 2}), Tensor::zeros({1, 2})};
  auto s = vgkit::lstm_step(vgkit::ops::gather(p.embedding, idx), zero, p);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(q[i], s.hidden[i]);
}

TEST(QueryEncoder, LstmStepByHand) {
  // One unit, gates [i|f|g|o]; x = 1, h = 0.5, c = 0.2.
  vgkit::QueryEncoderParams p{Tensor::filled({1, 1}, 1.0), Tensor::from({1, 4}, {0.1, 0.2, 0.3, 0.4}),
                              Tensor::from({1, 4}, {-0.5, 0.6, 0.7, -0.8}), Tensor::from({4}, {0.0, 1.0, 0.0, 0.1})};
  vgkit::LstmState prev{Tensor::from({1, 1}, {0.5}), Tensor::from({1, 1}, {0.2})};
  auto s = vgkit::lstm_step(Tensor::from({1, 1}, {1.0}), prev, p);
  const double i = sig(0.1 - 0.25), f = sig(0.2 + 0.3 + 1.0), g = std::tanh(0.3 + 0.35), o = sig(0.4 - 0.4 + 0.1);
  const double c = f * 0.2 + i * g;
  EXPECT_NEAR(s.cell.item(), c, 1e-14);
  EXPECT_NEAR(s.hidden.item(), o * std::tanh(c), 1e-14);
}

TEST(QueryEncoder, InitHasForgetBiasOne) {
  auto rng = vgkit::make_rng(2);
  const auto p = vgkit::init_query_encoder(10, 4, 3, rng);
  for (std::size_t k = 0; k < 12; ++k) EXPECT_EQ(p.bias[k], (k >= 3 && k < 6) ? 1.0 : 0.0);
  EXPECT_EQ(p.vocab_size(), 10u);
  EXPECT_EQ(p.query_dim(), 3u);
}

TEST(QueryEncoder, Errors) {
  const auto p = zero_params(4, 3, 2);
  EXPECT_THROW(vgkit::encode_query(vgkit::TokenSequence{}, p), std::invalid_argument);
  EXPECT_THROW(vgkit::encode_query(vgkit::TokenSequence{4}, p), std::invalid_argument);
}

TEST(QueryEncoder, WordOrderMatters) {
  vgtest::Rng rng(32);
  vgkit::QueryEncoderParams p{vgtest::random_tensor(rng, {5, 3}), vgtest::random_tensor(rng, {3, 8}),
                              vgtest::random_tensor(rng, {2, 8}), vgtest::random_tensor(rng, {8})};
  Tensor a = vgkit::encode_query(vgkit::TokenSequence{2, 3}, p);
  Tensor b = vgkit::encode_query(vgkit::TokenSequence{3, 2}, p);
  EXPECT_NE(a[0], b[0]);
}
