#include "sae/training.hpp"

namespace sae {

namespace {

// Keeps fine-tuning shuffles independent of the draws pretraining made.
constexpr std::uint64_t kFineTuneStream = 0x9E3779B97F4A7C15ULL;

Accuracies no_accuracy(const auto&) { return {}; }

}  // namespace

SparsityConfig TrainConfig::sparsity_for(std::size_t layer) const {
  if (sparsity.size() == 1) return sparsity.front();
  return sparsity.at(layer);
}

void TrainConfig::validate(std::size_t autoencoder_layers) const {
  if (pretrain.size() != autoencoder_layers) {
    throw ParameterError("expected " + std::to_string(autoencoder_layers) +
                         " pretraining schedules, got " + std::to_string(pretrain.size()));
  }
  if (sparsity.size() != 1 && sparsity.size() != autoencoder_layers) {
    throw ParameterError("expected 1 or " + std::to_string(autoencoder_layers) +
                         " sparsity configs, got " + std::to_string(sparsity.size()));
  }
  auto check_rate = [](const PhaseSchedule& p, const char* name) {
    if (!(p.learning_rate > 0.0) || !std::isfinite(p.learning_rate)) {
      throw ParameterError(std::string(name) + " learning rate must be > 0");
    }
  };
  for (const auto& p : pretrain) check_rate(p, "pretrain");
  check_rate(softmax, "softmax");
  check_rate(finetune, "finetune");
  for (const auto& s : sparsity) s.validate();
  if (!(head_lambda >= 0.0) || !std::isfinite(head_lambda)) {
    throw ParameterError("head lambda must be >= 0");
  }
  if (log_every == 0) throw ParameterError("log_every must be >= 1");
}

const Matrix& select_rows(const Matrix& full, std::span<const std::size_t> rows, Matrix& scratch) {
  bool identity = rows.size() == full.rows();
  for (std::size_t i = 0; identity && i < rows.size(); ++i) identity = rows[i] == i;
  if (identity) return full;
  scratch = gather_rows(full, rows);
  return scratch;
}

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth) {
  if (predicted.size() != truth.size()) {
    throw ShapeError("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                     std::to_string(truth.size()) + " labels");
  }
  if (truth.empty()) throw EvaluationError("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double accuracy(const StackedNetwork& net, const Dataset& data) {
  return accuracy(predict(net, data.features).labels, data.label_indices());
}

TrainResult pretrain(const Dataset& train, std::span<const std::size_t> widths,
                     const TrainConfig& cfg, const Dataset* val) {
  validate_layer_sizes(widths, train.classes());
  const std::size_t layers = widths.size() - 1;
  cfg.validate(layers);
  if (widths.front() != train.width()) {
    throw ShapeError("layer sizes start at " + std::to_string(widths.front()) +
                     " but the dataset has width " + std::to_string(train.width()));
  }
  if (val != nullptr && val->width() != train.width()) {
    throw ShapeError("validation width " + std::to_string(val->width()) +
                     " differs from training width " + std::to_string(train.width()));
  }

  Rng rng(cfg.seed);
  TrainResult out;
  Matrix features = train.features;
  std::optional<Matrix> val_features;
  if (val != nullptr && val->size() > 0) val_features = val->features;

  for (std::size_t l = 0; l < layers; ++l) {
    const SparsityConfig sparsity = cfg.sparsity_for(l);
    AutoencoderParams layer = AutoencoderParams::glorot(widths[l], widths[l + 1], rng);
    Matrix scratch;
    auto objective = [&](const AutoencoderParams& p, std::span<const std::size_t> rows) {
      return ae_loss_and_gradients(p, select_rows(features, rows, scratch), sparsity);
    };
    GdSettings settings{"pretrain" + std::to_string(l + 1), cfg.pretrain[l].epochs,
                        cfg.pretrain[l].learning_rate, cfg.batch_size, cfg.log_every};
    gd_train(layer, features.rows(), settings, rng, objective,
             no_accuracy<AutoencoderParams>, out.trace);

    features = encode(layer, features);
    if (val_features) val_features = encode(layer, *val_features);
    out.net.encoders.push_back(std::move(layer));
    out.net.sparsity.push_back(sparsity);
  }

  out.net.head = SoftmaxParams::glorot(train.classes(), widths.back(), rng, cfg.head_lambda);
  const std::vector<std::size_t> truth = train.label_indices();
  std::vector<std::size_t> val_truth;
  if (val_features) val_truth = val->label_indices();

  Matrix scratch_x;
  Matrix scratch_y;
  auto objective = [&](const SoftmaxParams& p, std::span<const std::size_t> rows) {
    return sm_loss_and_gradients(p, select_rows(features, rows, scratch_x),
                                 select_rows(train.labels, rows, scratch_y));
  };
  auto monitor = [&](const SoftmaxParams& p) {
    Accuracies acc;
    acc.train = accuracy(argmax_rows(logits(p, features)), truth);
    if (val_features) acc.val = accuracy(argmax_rows(logits(p, *val_features)), val_truth);
    return acc;
  };
  GdSettings settings{"softmax", cfg.softmax.epochs, cfg.softmax.learning_rate, cfg.batch_size,
                      cfg.log_every};
  gd_train(out.net.head, features.rows(), settings, rng, objective, monitor, out.trace);
  out.net.validate();
  return out;
}

TrainResult fine_tune(StackedNetwork net, const Dataset& train, const TrainConfig& cfg,
                      const Dataset* val) {
  net.validate();
  if (net.input_width() != train.width()) {
    throw ShapeError("network expects width " + std::to_string(net.input_width()) +
                     " but the dataset has width " + std::to_string(train.width()));
  }
  if (net.classes() != train.classes()) {
    throw ShapeError("network has " + std::to_string(net.classes()) + " classes, dataset has " +
                     std::to_string(train.classes()));
  }
  cfg.validate(net.encoders.size());

  Rng rng(cfg.seed ^ kFineTuneStream);
  TrainResult out;
  const std::vector<std::size_t> truth = train.label_indices();
  std::vector<std::size_t> val_truth;
  const bool have_val = val != nullptr && val->size() > 0;
  if (have_val) val_truth = val->label_indices();

  Matrix scratch_x;
  Matrix scratch_y;
  auto objective = [&](const StackedNetwork& n, std::span<const std::size_t> rows) {
    return stack_loss_and_gradients(n, select_rows(train.features, rows, scratch_x),
                                    select_rows(train.labels, rows, scratch_y));
  };
  auto monitor = [&](const StackedNetwork& n) {
    Accuracies acc;
    acc.train = accuracy(predict(n, train.features).labels, truth);
    if (have_val) acc.val = accuracy(predict(n, val->features).labels, val_truth);
    return acc;
  };
  GdSettings settings{"finetune", cfg.finetune.epochs, cfg.finetune.learning_rate,
                      cfg.batch_size, cfg.log_every};
  gd_train(net, train.size(), settings, rng, objective, monitor, out.trace);
  out.net = std::move(net);
  return out;
}

}  // namespace sae
