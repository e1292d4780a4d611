#include "vgkit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "vgkit/evaluation.hpp"
#include "vgkit/ops.hpp"
#include "vgkit/optim.hpp"

namespace vgkit {

namespace {

constexpr std::uint64_t kEpochStream = 0xe90c;

struct Prepared {
  const GroundingSample* sample = nullptr;
  Tensor visual;
  SampleTargets targets;
};

std::vector<Prepared> prepare(const std::vector<GroundingSample>& samples, const ModelDims& dims, double eta) {
  std::vector<Prepared> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    std::vector<BBox> boxes;
    boxes.reserve(s.proposals.size());
    for (const auto& p : s.proposals) boxes.push_back(p.box);
    out.push_back({&s, visual_matrix(s, dims.feature_dim), make_targets(boxes, s.gt, eta)});
  }
  return out;
}

std::size_t max_token(const std::vector<GroundingSample>& samples) {
  std::size_t m = 0;
  for (const auto& s : samples)
    for (auto t : s.tokens) m = std::max(m, t);
  return m;
}

}  // namespace

void TrainConfig::validate() const {
  loss.validate();
  if (batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("train: learning rate must be positive");
  }
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw std::invalid_argument("train: lr decay must be in (0, 1]");
  if (!(decay_fraction > 0.0 && decay_fraction <= 1.0)) {
    throw std::invalid_argument("train: decay fraction must be in (0, 1]");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("train: Adam betas must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("train: epsilon must be positive");
  if (eval_every == 0) throw std::invalid_argument("train: eval_every must be positive");
  if (dims.embed_dim == 0 || dims.query_dim == 0 || dims.feature_dim == 0 || dims.fused_dim == 0) {
    throw std::invalid_argument("train: model dimensions must be positive");
  }
}

std::size_t TrainConfig::decay_step() const {
  if (iterations == 0) return 0;
  const auto step = static_cast<std::size_t>(std::llround(decay_fraction * static_cast<double>(iterations)));
  return std::max<std::size_t>(step, 1);
}

TrainingAborted::TrainingAborted(std::size_t iteration, std::vector<TrainLogEntry> log)
    : std::runtime_error("non-finite loss at iteration " + std::to_string(iteration)),
      iteration_(iteration),
      log_(std::move(log)) {}

std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  // Plain Fisher-Yates: std::shuffle is not specified bit for bit across
  // standard libraries.
  Rng rng = make_rng(seed, kEpochStream, epoch);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

TrainResult train(const TrainConfig& config, const std::vector<GroundingSample>& train_set,
                  const std::vector<GroundingSample>& val_set) {
  ModelDims dims = config.dims;
  if (dims.vocab_size == 0) {
    dims.vocab_size = std::max(max_token(train_set), max_token(val_set)) + 1;
  }
  return train(config, train_set, val_set, GroundingModel::initialize(dims, config.seed));
}

TrainResult train(const TrainConfig& config, const std::vector<GroundingSample>& train_set,
                  const std::vector<GroundingSample>& val_set, const GroundingModel& init) {
  config.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");

  TrainResult result;
  GroundingModel model = init.snapshot();
  const auto& dims = model.dims();
  const bool refine = config.loss.regression;
  const auto prepared = prepare(train_set, dims, config.loss.eta);

  std::vector<Tensor> params = model.parameters(config.loss.regression);
  AdamOptions adam;
  adam.beta1 = config.beta1;
  adam.beta2 = config.beta2;
  adam.epsilon = config.epsilon;
  adam.schedule = {config.learning_rate, config.lr_decay, config.decay_step()};
  AdamState state(adam, params);

  result.best_model = model.snapshot();
  result.best_iteration = 0;

  const std::size_t n = prepared.size();
  std::vector<std::size_t> perm;
  std::size_t epoch = 0;
  std::size_t cursor = n;  // forces a fresh permutation on the first batch

  for (std::size_t it = 1; it <= config.iterations; ++it) {
    if (cursor >= n) {
      perm = epoch_permutation(n, config.seed, epoch++);
      cursor = 0;
    }
    const std::size_t end = std::min(n, cursor + config.batch_size);
    const std::size_t batch = end - cursor;
    const double inv_batch = 1.0 / static_cast<double>(batch);

    for (auto& p : params) p.zero_grad();
    TrainLogEntry entry;
    entry.iteration = it;
    entry.lr = state.current_lr();
    entry.batch = batch;
    for (; cursor < end; ++cursor) {
      const Prepared& ps = prepared[perm[cursor]];
      const ForwardOutput out = forward(model, ps.sample->tokens, ps.visual);
      const LossBreakdown lb = total_loss(out.scores, out.offsets, ps.targets, config.loss);
      const double value = lb.total.item();
      if (!std::isfinite(value)) throw TrainingAborted(it, std::move(result.log));
      entry.total_loss += value * inv_batch;
      entry.rank_loss += lb.rank * inv_batch;
      entry.reg_loss += lb.reg * inv_batch;
      if (ps.targets.soft.degenerate) ++entry.degenerate;
      if (lb.total.tracks_grad()) backward(ops::scale(lb.total, inv_batch));
    }
    adam_step(params, state);

    if (!val_set.empty() && (it % config.eval_every == 0 || it == config.iterations)) {
      const double acc = validation_accuracy(model, refine, val_set);
      entry.val_accuracy = acc;
      if (!result.best_val_accuracy || acc > *result.best_val_accuracy) {
        result.best_val_accuracy = acc;
        result.best_iteration = it;
        result.best_model = model.snapshot();
      }
    }
    result.log.push_back(entry);
  }

  result.final_model = model.snapshot();
  if (config.iterations > 0 && val_set.empty()) {
    result.best_model = result.final_model.snapshot();
    result.best_iteration = config.iterations;
  }
  return result;
}

LossBreakdown mean_loss(const GroundingModel& model, const std::vector<GroundingSample>& samples,
                        const LossConfig& config) {
  if (samples.empty()) throw std::invalid_argument("mean_loss: empty sample set");
  LossBreakdown mean;
  double total = 0.0;
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (const auto& p : prepare(samples, model.dims(), config.eta)) {
    const ForwardOutput out = forward(model, p.sample->tokens, p.visual);
    const LossBreakdown lb = total_loss(out.scores, out.offsets, p.targets, config);
    total += lb.total.item() * inv;
    mean.rank += lb.rank * inv;
    mean.reg += lb.reg * inv;
  }
  mean.total = Tensor::scalar(total);
  return mean;
}

void write_train_log(std::ostream& out, const std::vector<TrainLogEntry>& log, const LossConfig& loss) {
  out << "iteration,variant,lr,total_loss,rank_loss,reg_loss,degenerate,val_acc\n";
  const std::string variant(to_string(loss.variant));
  char buf[128];
  for (const auto& e : log) {
    out << e.iteration << ',' << variant;
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g,", e.lr, e.total_loss, e.rank_loss);
    out << buf;
    if (loss.regression) {
      std::snprintf(buf, sizeof(buf), "%.17g", e.reg_loss);
      out << buf;
    }
    out << ',' << e.degenerate << ',';
    if (e.val_accuracy) {
      std::snprintf(buf, sizeof(buf), "%.17g", *e.val_accuracy);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace vgkit
