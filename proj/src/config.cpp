#include "sae/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "sae/error.hpp"

namespace sae {

namespace {

const std::set<std::string> kKeys = {
    "data_dir",    "out_dir", "seed",  "val_fraction", "layers",        "epochs",
    "learning_rates", "batch_size", "log_every", "rho", "beta",        "lambda",
    "head_lambda", "target_height", "target_width", "resize_filter"};

template <class T>
T get_as(const nlohmann::json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

std::size_t get_count(const nlohmann::json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError("config key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

void RunConfig::validate() const {
  if (layers.size() < 2) throw ConfigError("layers: need the input width and at least one hidden width");
  for (std::size_t w : layers) {
    if (w == 0) throw ConfigError("layers: widths must be >= 1");
  }
  const std::size_t phases = layers.size() + 1;
  if (epochs.size() != phases) {
    throw ConfigError("epochs: expected " + std::to_string(phases) +
                      " values (one per autoencoder, softmax, fine-tune), got " +
                      std::to_string(epochs.size()));
  }
  if (learning_rates.size() != phases && learning_rates.size() != 1) {
    throw ConfigError("learning_rates: expected 1 or " + std::to_string(phases) + " values, got " +
                      std::to_string(learning_rates.size()));
  }
  for (double r : learning_rates) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("learning_rates: values must be > 0");
  }
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction must lie in (0, 1)");
  if (log_every == 0) throw ConfigError("log_every must be >= 1");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
  if (!(head_lambda >= 0.0) || !std::isfinite(head_lambda)) throw ConfigError("head_lambda must be >= 0");
  if (target_height == 0 || target_width == 0) throw ConfigError("target dimensions must be >= 1");
  if (layers.front() != target_height * target_width) {
    throw ConfigError("layers[0] = " + std::to_string(layers.front()) + " but images flatten to " +
                      std::to_string(target_height) + "x" + std::to_string(target_width) + " = " +
                      std::to_string(target_height * target_width));
  }
}

TrainConfig RunConfig::train_config() const {
  TrainConfig tc;
  const std::size_t aes = layers.size() - 1;
  auto rate = [&](std::size_t i) { return learning_rates.size() == 1 ? learning_rates[0] : learning_rates[i]; };
  tc.pretrain.clear();
  for (std::size_t l = 0; l < aes; ++l) tc.pretrain.push_back({epochs[l], rate(l)});
  tc.softmax = {epochs[aes], rate(aes)};
  tc.finetune = {epochs[aes + 1], rate(aes + 1)};
  tc.batch_size = batch_size;
  tc.seed = seed;
  tc.sparsity = {SparsityConfig{rho, beta, lambda}};
  tc.head_lambda = head_lambda;
  tc.log_every = log_every;
  return tc;
}

PreprocessConfig RunConfig::preprocess() const {
  return {target_height, target_width, resize_filter};
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["data_dir"] = data_dir;
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  j["val_fraction"] = val_fraction;
  j["layers"] = layers;
  j["epochs"] = epochs;
  j["learning_rates"] = learning_rates;
  if (batch_size == 0) j["batch_size"] = "full";
  else j["batch_size"] = batch_size;
  j["log_every"] = log_every;
  j["rho"] = rho;
  j["beta"] = beta;
  j["lambda"] = lambda;
  j["head_lambda"] = head_lambda;
  j["target_height"] = target_height;
  j["target_width"] = target_width;
  j["resize_filter"] = to_string(resize_filter);
  return j;
}

void RunConfig::merge_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  if (j.contains("data_dir")) data_dir = get_as<std::string>(j, "data_dir");
  if (j.contains("out_dir")) out_dir = get_as<std::string>(j, "out_dir");
  if (j.contains("seed")) seed = get_count(j, "seed");
  if (j.contains("val_fraction")) val_fraction = get_as<double>(j, "val_fraction");
  if (j.contains("layers")) layers = get_as<std::vector<std::size_t>>(j, "layers");
  if (j.contains("epochs")) epochs = get_as<std::vector<std::size_t>>(j, "epochs");
  if (j.contains("learning_rates")) {
    const auto& v = j.at("learning_rates");
    learning_rates = v.is_number() ? std::vector<double>{v.get<double>()}
                                   : get_as<std::vector<double>>(j, "learning_rates");
  }
  if (j.contains("batch_size")) {
    const auto& v = j.at("batch_size");
    if (v.is_string()) {
      if (v.get<std::string>() != "full") throw ConfigError("batch_size must be a positive integer or \"full\"");
      batch_size = 0;
    } else {
      batch_size = get_count(j, "batch_size");
      if (batch_size == 0) throw ConfigError("batch_size must be a positive integer or \"full\"");
    }
  }
  if (j.contains("log_every")) log_every = get_count(j, "log_every");
  if (j.contains("rho")) rho = get_as<double>(j, "rho");
  if (j.contains("beta")) beta = get_as<double>(j, "beta");
  if (j.contains("lambda")) lambda = get_as<double>(j, "lambda");
  if (j.contains("head_lambda")) head_lambda = get_as<double>(j, "head_lambda");
  if (j.contains("target_height")) target_height = get_count(j, "target_height");
  if (j.contains("target_width")) target_width = get_count(j, "target_width");
  if (j.contains("resize_filter")) {
    try {
      resize_filter = parse_resize_filter(get_as<std::string>(j, "resize_filter"));
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  RunConfig cfg;
  cfg.merge_json(j);
  return cfg;
}

}  // namespace sae
