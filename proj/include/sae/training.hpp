#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sae/dataset.hpp"
#include "sae/error.hpp"
#include "sae/network.hpp"
#include "sae/rng.hpp"

namespace sae {

struct TracePoint {
  std::string phase;
  std::size_t iteration = 0;
  double loss = 0.0;
  std::optional<double> train_accuracy;  // absent for the unsupervised phases
  std::optional<double> val_accuracy;
};
using TrainingTrace = std::vector<TracePoint>;

struct PhaseSchedule {
  std::size_t epochs = 0;
  double learning_rate = 0.1;
  friend bool operator==(const PhaseSchedule&, const PhaseSchedule&) = default;
};

struct TrainConfig {
  std::vector<PhaseSchedule> pretrain = {{400, 0.1}, {400, 0.1}};  // one per autoencoder
  PhaseSchedule softmax = {400, 0.1};
  PhaseSchedule finetune = {200, 0.01};
  std::size_t batch_size = 0;  // 0 trains full-batch
  std::uint64_t seed = 1;
  std::vector<SparsityConfig> sparsity = {SparsityConfig{}};  // a single entry covers all layers
  double head_lambda = 0.001;
  std::size_t log_every = 10;

  SparsityConfig sparsity_for(std::size_t layer) const;
  void validate(std::size_t autoencoder_layers) const;
};

struct GdSettings {
  std::string phase;
  std::size_t epochs = 0;
  double learning_rate = 0.1;
  std::size_t batch_size = 0;
  std::size_t log_every = 10;
};

struct Accuracies {
  std::optional<double> train;
  std::optional<double> val;
};

inline std::array<Matrix*, 1> tensors(Matrix& m) { return {&m}; }
inline std::array<const Matrix*, 1> tensors(const Matrix& m) { return {&m}; }

// Plain gradient descent, theta -= rate * grad. One iteration is one step;
// an epoch is one pass over `samples` rows, full-batch when batch_size is 0
// or covers everything (no RNG draws), otherwise minibatches over a seeded
// shuffle. `objective(params, rows)` returns {.loss, .grads} with grads laid
// out like params; `monitor(params)` supplies accuracies at each log point.
template <class Params, class Objective, class Monitor>
void gd_train(Params& params, std::size_t samples, const GdSettings& s, Rng& rng,
              Objective&& objective, Monitor&& monitor, TrainingTrace& trace) {
  if (!(s.learning_rate > 0.0) || !std::isfinite(s.learning_rate)) {
    throw ParameterError("phase " + s.phase + ": learning rate must be > 0");
  }
  if (s.epochs == 0) return;
  if (samples == 0) throw ParameterError("phase " + s.phase + ": no training samples");

  const bool full_batch = s.batch_size == 0 || s.batch_size >= samples;
  const std::size_t batch = full_batch ? samples : s.batch_size;
  const std::size_t log_every = s.log_every == 0 ? 1 : s.log_every;
  const std::size_t steps_per_epoch = (samples + batch - 1) / batch;
  const std::size_t total_steps = steps_per_epoch * s.epochs;

  std::vector<std::size_t> order(samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t iteration = 0;

  for (std::size_t epoch = 0; epoch < s.epochs; ++epoch) {
    if (!full_batch) rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < samples; start += batch) {
      ++iteration;
      const std::size_t stop = std::min(samples, start + batch);
      std::span<const std::size_t> rows(order.data() + start, stop - start);
      auto result = objective(std::as_const(params), rows);

      bool finite = std::isfinite(result.loss);
      for (const Matrix* g : tensors(std::as_const(result.grads))) finite = finite && all_finite(*g);
      if (!finite) {
        throw NumericError("phase " + s.phase + " iteration " + std::to_string(iteration) +
                           ": non-finite loss or gradient");
      }
      if (iteration % log_every == 0 || iteration == total_steps) {
        const Accuracies acc = monitor(std::as_const(params));
        trace.push_back({s.phase, iteration, result.loss, acc.train, acc.val});
      }

      auto ps = tensors(params);
      auto gs = tensors(std::as_const(result.grads));
      for (std::size_t t = 0; t < ps.size(); ++t) subtract_scaled(*ps[t], s.learning_rate, *gs[t]);
    }
  }
}

// Convenience for objectives working on a row subset of a design matrix;
// returns `full` itself when rows covers it in order.
const Matrix& select_rows(const Matrix& full, std::span<const std::size_t> rows, Matrix& scratch);

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth);
double accuracy(const StackedNetwork& net, const Dataset& data);

struct TrainResult {
  StackedNetwork net;
  TrainingTrace trace;
};

// Greedy layerwise pretraining: each autoencoder trains on the features of
// the one below, then the softmax head trains on the top features. widths is
// [n, m1, m2, ...] with n equal to the dataset width.
TrainResult pretrain(const Dataset& train, std::span<const std::size_t> widths,
                     const TrainConfig& cfg, const Dataset* val = nullptr);

// Joint gradient descent on the supervised loss over all encoders and the
// head. Decoders and the reconstruction/sparsity terms are not involved.
TrainResult fine_tune(StackedNetwork net, const Dataset& train, const TrainConfig& cfg,
                      const Dataset* val = nullptr);

}  // namespace sae
