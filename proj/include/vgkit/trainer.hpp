#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vgkit/losses.hpp"
#include "vgkit/model.hpp"

namespace vgkit {

struct TrainConfig {
  std::uint64_t seed = 1;
  std::size_t iterations = 1000;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double lr_decay = 0.1;
  double decay_fraction = 0.7;  // of the iteration budget
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
  std::size_t eval_every = 200;
  LossConfig loss;
  ModelDims dims;  // vocab_size is taken from the data when zero

  void validate() const;
  // Iteration at which the learning rate drops, 0 when it never does.
  std::size_t decay_step() const;
};

struct TrainLogEntry {
  std::size_t iteration = 0;  // 1-based
  double lr = 0.0;
  double total_loss = 0.0;  // batch means
  double rank_loss = 0.0;
  double reg_loss = 0.0;
  std::size_t degenerate = 0;  // batch samples with no proposal above eta
  std::size_t batch = 0;
  std::optional<double> val_accuracy;
};

struct TrainResult {
  GroundingModel final_model;
  GroundingModel best_model;
  std::size_t best_iteration = 0;
  std::optional<double> best_val_accuracy;
  std::vector<TrainLogEntry> log;
};

class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(std::size_t iteration, std::vector<TrainLogEntry> log);
  std::size_t iteration() const { return iteration_; }
  const std::vector<TrainLogEntry>& log() const { return log_; }

 private:
  std::size_t iteration_;
  std::vector<TrainLogEntry> log_;
};

// Permutation of 0..n-1 for one epoch, fixed by (seed, epoch).
std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed, std::uint64_t epoch);

// Mini-batch training with Adam. Batches are consecutive slices of the epoch
// permutation, so the last batch of an epoch may be short. Validation runs
// every eval_every iterations and after the last one; the best model is the
// earliest with the highest validation accuracy. With zero iterations both
// models equal the initialization. Throws TrainingAborted on a non-finite
// loss.
TrainResult train(const TrainConfig& config, const std::vector<GroundingSample>& train_set,
                  const std::vector<GroundingSample>& val_set);
TrainResult train(const TrainConfig& config, const std::vector<GroundingSample>& train_set,
                  const std::vector<GroundingSample>& val_set, const GroundingModel& init);

// Mean objective over a sample set, no gradients. Used for held-out checks.
LossBreakdown mean_loss(const GroundingModel& model, const std::vector<GroundingSample>& samples,
                        const LossConfig& config);

// CSV with a header row. reg_loss is empty when regression is disabled and
// val_acc is empty on iterations without validation.
void write_train_log(std::ostream& out, const std::vector<TrainLogEntry>& log, const LossConfig& loss);

}  // namespace vgkit
