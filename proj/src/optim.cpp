#include "vgkit/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vgkit {

Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

double xavier_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Tensor xavier_init(const Shape& shape, Rng& rng) {
  if (shape.size() != 2) {
    throw std::invalid_argument("xavier_init: expected (fan_in, fan_out), got " + shape_to_string(shape));
  }
  if (shape[0] == 0 || shape[1] == 0) {
    throw std::invalid_argument("xavier_init: zero dimension in " + shape_to_string(shape));
  }
  const double bound = xavier_bound(shape[0], shape[1]);
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> values(shape[0] * shape[1]);
  for (auto& v : values) v = dist(rng);
  return Tensor::from(shape, std::move(values), true);
}

double LrSchedule::at(std::uint64_t step) const {
  if (decay_period == 0) return base_lr;
  return base_lr * std::pow(decay, static_cast<double>(step / decay_period));
}

AdamState::AdamState(AdamOptions options, std::span<const Tensor> params) : options_(options) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& p : params) {
    m_.emplace_back(p.numel(), 0.0);
    v_.emplace_back(p.numel(), 0.0);
  }
}

void adam_step(std::span<Tensor> params, AdamState& state) {
  if (params.size() != state.m_.size()) {
    throw std::invalid_argument("adam_step: state holds " + std::to_string(state.m_.size()) + " slots for " +
                                std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].numel() != state.m_[i].size()) {
      throw std::invalid_argument("adam_step: parameter " + std::to_string(i) + " has shape " +
                                  shape_to_string(params[i].shape()) + " but its state does not match");
    }
    if (!params[i].has_grad()) {
      throw std::invalid_argument("adam_step: parameter " + std::to_string(i) + " has no gradient");
    }
  }

  const auto& opt = state.options_;
  double clip_scale = 1.0;
  if (opt.clip_norm > 0.0) {
    double sq = 0.0;
    for (const auto& p : params) {
      for (double g : p.grad()) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > opt.clip_norm) clip_scale = opt.clip_norm / norm;
  }

  const double lr = opt.schedule.at(state.step_);
  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double correction1 = 1.0 - std::pow(opt.beta1, t);
  const double correction2 = 1.0 - std::pow(opt.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto values = params[i].mutable_values();
    auto grad = params[i].grad();
    auto& m = state.m_[i];
    auto& v = state.v_[i];
    for (std::size_t k = 0; k < values.size(); ++k) {
      double g = grad[k] * clip_scale;
      if (opt.weight_decay > 0.0) g += opt.weight_decay * values[k];
      m[k] = opt.beta1 * m[k] + (1.0 - opt.beta1) * g;
      v[k] = opt.beta2 * v[k] + (1.0 - opt.beta2) * g * g;
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      values[k] -= lr * m_hat / (std::sqrt(v_hat) + opt.epsilon);
    }
    params[i].clear_grad();
  }
}

}  // namespace vgkit
