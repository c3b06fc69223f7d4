#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sae/network.hpp"
#include "sae/training.hpp"

namespace sae {

// "Positive" is the detection target (the defective class).
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const std::size_t> predicted,
                          std::span<const std::size_t> truth, std::size_t positive_class = 0);

// Rates over the whole evaluated set (fp / total, fn / total) partition the
// samples together with accuracy; the class-wise rates use the usual
// denominators. Ratios with a zero denominator are left empty.
struct Metrics {
  double accuracy = 0.0;
  double fp_rate_total = 0.0;
  double fn_rate_total = 0.0;
  std::optional<double> fp_rate_classwise;
  std::optional<double> fn_rate_classwise;
  std::optional<double> precision;
  std::optional<double> recall;
};

Metrics metrics(const ConfusionCounts& c);

// Class index treated as positive: "defective" when present, else 0.
std::size_t positive_class_index(std::span<const std::string> class_names);

std::string render_confusion(const ConfusionCounts& c, const std::string& positive_name,
                             const std::string& negative_name);
std::string render_metrics(const Metrics& m);

struct EvaluationReport {
  ConfusionCounts counts;
  Metrics metrics;
  std::string text;
};
EvaluationReport evaluate(const StackedNetwork& net, const Matrix& features,
                          std::span<const std::size_t> truth,
                          std::span<const std::string> class_names);

// phase,iteration,loss,train_accuracy,val_accuracy; reals with 17
// significant digits, absent values as empty cells.
void emit_trace_csv(const TrainingTrace& trace, const std::filesystem::path& path);
TrainingTrace read_trace_csv(const std::filesystem::path& path);

// One PGM per hidden unit of encoder `layer` (1-based), named
// weight_<layer>_<unit>.pgm with 0-based units. The weight row is reshaped
// to height x width (square by default) and min-max scaled to 0..255;
// constant rows become mid-gray 128.
std::vector<std::filesystem::path> visualize_weights(
    const StackedNetwork& net, std::size_t layer, const std::filesystem::path& out_dir,
    std::optional<std::pair<std::size_t, std::size_t>> dims = std::nullopt);

// Min-max scaling of one weight row, as used by visualize_weights.
std::vector<std::uint8_t> weights_to_gray(std::span<const double> row);

}  // namespace sae
