#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vgkit/tensor.hpp"

namespace vgkit {

using Rng = std::mt19937_64;

// Deterministic generator for a named stream, e.g. (seed, split, sample id).
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0);

// Glorot/Xavier uniform over [-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))]
// for a (fan_in, fan_out) matrix. The result tracks gradients.
Tensor xavier_init(const Shape& shape, Rng& rng);
double xavier_bound(std::size_t fan_in, std::size_t fan_out);

// Step decay: base_lr * decay^floor(step / decay_period). A zero period means
// a constant rate.
struct LrSchedule {
  double base_lr = 1e-3;
  double decay = 0.1;
  std::uint64_t decay_period = 0;

  double at(std::uint64_t step) const;
};

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
  LrSchedule schedule;
  // Both off by default.
  double clip_norm = 0.0;
  double weight_decay = 0.0;
};

class AdamState {
 public:
  AdamState(AdamOptions options, std::span<const Tensor> params);

  const AdamOptions& options() const { return options_; }
  std::uint64_t step() const { return step_; }
  std::span<const std::vector<double>> first_moments() const { return m_; }
  std::span<const std::vector<double>> second_moments() const { return v_; }
  double current_lr() const { return options_.schedule.at(step_); }

 private:
  AdamOptions options_;
  std::uint64_t step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;

  friend void adam_step(std::span<Tensor> params, AdamState& state);
};

// One bias-corrected Adam update. Every parameter must carry a gradient; the
// gradients are cleared afterwards. Throws std::invalid_argument otherwise.
void adam_step(std::span<Tensor> params, AdamState& state);

}  // namespace vgkit
