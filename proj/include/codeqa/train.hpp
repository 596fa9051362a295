#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "codeqa/common.hpp"
#include "codeqa/seq2seq.hpp"

namespace codeqa {

struct OptimizerConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;
  int batch_size = 64;
};

/// Adam with global gradient-norm clipping.
template <typename Scalar>
class Adam {
 public:
  Adam(const Seq2SeqModel<Scalar>& model, OptimizerConfig config) : config_(config) {
    m_ = model.params;
    m_.set_zero();
    v_ = m_;
  }

  const OptimizerConfig& config() const { return config_; }
  long steps() const { return steps_; }

  /// Applies one update; returns the gradient norm before clipping.
  double step(Seq2SeqParams<Scalar>& params, Seq2SeqParams<Scalar>& grads) {
    double sq = 0;
    grads.for_each([&](const char*, const Matrix<Scalar>& g) { sq += static_cast<double>(g.squaredNorm()); });
    const double norm = std::sqrt(sq);
    if (!std::isfinite(norm)) throw Error(ErrorKind::NonFiniteLoss, "non-finite gradient norm");
    const double scale = norm > config_.clip_norm ? config_.clip_norm / norm : 1.0;

    ++steps_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
    const auto lr = static_cast<Scalar>(config_.learning_rate * std::sqrt(bc2) / bc1);
    const auto b1 = static_cast<Scalar>(config_.beta1);
    const auto b2 = static_cast<Scalar>(config_.beta2);
    const auto eps = static_cast<Scalar>(config_.epsilon * std::sqrt(bc2));
    const auto s = static_cast<Scalar>(scale);

    std::vector<Matrix<Scalar>*> ps, gs, ms, vs;
    params.for_each([&](const char*, Matrix<Scalar>& x) { ps.push_back(&x); });
    grads.for_each([&](const char*, Matrix<Scalar>& x) { gs.push_back(&x); });
    m_.for_each([&](const char*, Matrix<Scalar>& x) { ms.push_back(&x); });
    v_.for_each([&](const char*, Matrix<Scalar>& x) { vs.push_back(&x); });
    if (config_.learning_rate == 0.0) return norm;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      auto g = (gs[k]->array() * s).eval();
      ms[k]->array() = b1 * ms[k]->array() + (Scalar(1) - b1) * g;
      vs[k]->array() = b2 * vs[k]->array() + (Scalar(1) - b2) * g.square();
      ps[k]->array() -= lr * ms[k]->array() / (vs[k]->array().sqrt() + eps);
    }
    return norm;
  }

 private:
  OptimizerConfig config_;
  Seq2SeqParams<Scalar> m_, v_;
  long steps_ = 0;
};

struct EpochMetrics {
  double mean_loss = 0;
  double token_accuracy = 0;
  std::size_t tokens = 0;
  std::size_t batches = 0;
};

/// Batches for one epoch: shuffled, then grouped by similar context length
/// inside windows of 16 batches to limit padding, then batch order shuffled.
inline std::vector<std::vector<std::size_t>> plan_batches(const std::vector<EncodedExample>& examples,
                                                          std::size_t batch_size, Rng& rng) {
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  const std::size_t window = batch_size * 16;
  for (std::size_t begin = 0; begin < order.size(); begin += window) {
    const auto end = std::min(order.size(), begin + window);
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return examples[a].context.size() < examples[b].context.size(); });
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const auto end = std::min(order.size(), begin + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  rng.shuffle(batches);
  return batches;
}

/// One pass of teacher-forced training over `examples`.
/// `observer`, when set, sees every tape before its update is applied.
template <typename Scalar>
EpochMetrics train_epoch(Seq2SeqModel<Scalar>& model, const std::vector<EncodedExample>& examples, Adam<Scalar>& optimizer,
                         Rng& rng, const std::function<void(const ForwardTape<Scalar>&)>& observer = {}) {
  if (optimizer.config().batch_size < 1) throw Error(ErrorKind::Config, "batch size must be >= 1");
  EpochMetrics metrics;
  double loss_sum = 0;
  std::size_t correct = 0;
  Seq2SeqParams<Scalar> grads = model.params;
  ForwardTape<Scalar> tape;
  for (const auto& indices : plan_batches(examples, static_cast<std::size_t>(optimizer.config().batch_size), rng)) {
    std::vector<const EncodedExample*> ptrs;
    ptrs.reserve(indices.size());
    for (auto i : indices) ptrs.push_back(&examples[i]);
    const PaddedBatch batch = make_batch(ptrs);
    const LossStats stats = forward_loss(model, batch, tape);
    if (!std::isfinite(stats.loss)) {
      throw Error(ErrorKind::NonFiniteLoss, "non-finite loss at batch " + std::to_string(metrics.batches) +
                                                " after " + std::to_string(optimizer.steps()) + " updates");
    }
    if (observer) observer(tape);
    grads.set_zero();
    backward(model, tape, grads);
    optimizer.step(model.params, grads);
    loss_sum += stats.loss * static_cast<double>(stats.tokens);
    correct += stats.correct;
    metrics.tokens += stats.tokens;
    ++metrics.batches;
  }
  if (metrics.tokens > 0) {
    metrics.mean_loss = loss_sum / static_cast<double>(metrics.tokens);
    metrics.token_accuracy = static_cast<double>(correct) / static_cast<double>(metrics.tokens);
  }
  return metrics;
}

/// Teacher-forced loss and accuracy without updating parameters.
template <typename Scalar>
EpochMetrics evaluate_loss(const Seq2SeqModel<Scalar>& model, const std::vector<EncodedExample>& examples,
                           std::size_t batch_size = 64) {
  EpochMetrics metrics;
  double loss_sum = 0;
  std::size_t correct = 0;
  ForwardTape<Scalar> tape;
  for (std::size_t begin = 0; begin < examples.size(); begin += batch_size) {
    std::vector<const EncodedExample*> ptrs;
    for (std::size_t i = begin; i < std::min(examples.size(), begin + batch_size); ++i) ptrs.push_back(&examples[i]);
    const LossStats stats = forward_loss(model, make_batch(ptrs), tape);
    loss_sum += stats.loss * static_cast<double>(stats.tokens);
    correct += stats.correct;
    metrics.tokens += stats.tokens;
    ++metrics.batches;
  }
  if (metrics.tokens > 0) {
    metrics.mean_loss = loss_sum / static_cast<double>(metrics.tokens);
    metrics.token_accuracy = static_cast<double>(correct) / static_cast<double>(metrics.tokens);
  }
  return metrics;
}

}  // namespace codeqa
