#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sae/config.hpp"
#include "sae/error.hpp"
#include "sae/evaluation.hpp"

namespace sae::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kConfigError = 2,
  kDataError = 3,
  kNumericError = 4,
};

int exit_code_for(const Error& e) noexcept;
// Single line: error kind=<kind> exit=<code> message="<text>"
std::string error_line(const std::string& kind, int code, const std::string& message);

// Files written by train into cfg.out_dir.
struct TrainArtifacts {
  std::filesystem::path model;
  std::filesystem::path classes;
  std::filesystem::path trace;
  std::filesystem::path report;
  std::filesystem::path config;
  double val_accuracy_pretrain = 0.0;
  EvaluationReport val_report;
};

// ingest -> split -> pretrain -> fine-tune -> save model, trace and report.
TrainArtifacts cmd_train(const RunConfig& cfg, std::ostream& out);

enum class Subset { all, train, val };
Subset parse_subset(const std::string& name);

// Evaluates a saved model on a class directory. When `cfg` is absent the
// images are resized to the square side implied by the model input width.
EvaluationReport cmd_eval(const std::filesystem::path& model_path,
                          const std::filesystem::path& data_dir,
                          const std::optional<RunConfig>& cfg, Subset subset, std::ostream& out);

void cmd_predict(const std::filesystem::path& model_path,
                 const std::vector<std::filesystem::path>& images,
                 const std::optional<RunConfig>& cfg, std::ostream& out);

std::vector<std::filesystem::path> cmd_visualize(
    const std::filesystem::path& model_path, std::size_t layer,
    const std::filesystem::path& out_dir,
    std::optional<std::pair<std::size_t, std::size_t>> dims, std::ostream& out);

// Returns the worst relative error across all three suites.
double cmd_gradcheck(std::uint64_t seed, std::size_t configurations, std::ostream& out);

std::vector<std::filesystem::path> cmd_synth(const std::filesystem::path& out_dir,
                                             std::size_t per_class, std::size_t side,
                                             double noise_sd, std::uint64_t seed,
                                             std::ostream& out);

// Class names stored beside a model file (<model>.classes, one per line).
std::filesystem::path classes_path(const std::filesystem::path& model_path);
std::vector<std::string> read_class_names(const std::filesystem::path& model_path,
                                          std::size_t classes);

}  // namespace sae::cli
