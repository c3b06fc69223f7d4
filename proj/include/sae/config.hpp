#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sae/image.hpp"
#include "sae/training.hpp"

namespace sae {

// Flat key set shared by the JSON config file and the command-line flags.
struct RunConfig {
  std::string data_dir;
  std::string out_dir = "run";
  std::uint64_t seed = 1;
  double val_fraction = 0.2;
  std::vector<std::size_t> layers = {72900, 2000, 500};
  // One entry per autoencoder, then softmax, then fine-tune.
  std::vector<std::size_t> epochs = {400, 400, 400, 200};
  // Same layout as epochs; a single value applies to every phase.
  std::vector<double> learning_rates = {0.1, 0.1, 0.1, 0.01};
  std::size_t batch_size = 0;  // 0 = full batch ("full" in JSON)
  std::size_t log_every = 10;
  double rho = 0.05;
  double beta = 1.0;
  double lambda = 0.001;
  double head_lambda = 0.001;
  std::size_t target_height = 270;
  std::size_t target_width = 270;
  ResizeFilter resize_filter = ResizeFilter::bilinear;

  // Throws ConfigError describing the first invalid key.
  void validate() const;
  TrainConfig train_config() const;
  PreprocessConfig preprocess() const;

  nlohmann::json to_json() const;
  // Overlays the keys present in j; unknown keys and wrong types throw ConfigError.
  void merge_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
};

}  // namespace sae
