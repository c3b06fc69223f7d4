// sae: stacked sparse autoencoder classifier.
//
//   sae synth --out data --per-class 100 --side 16
//   sae train --config configs/synthetic.json --data data --out run
//   sae eval --model run/model.saem --data data --config run/config.json --subset val
//   sae predict --model run/model.saem img1.pgm img2.pgm
//   sae visualize --model run/model.saem --layer 1 --out weights
//   sae gradcheck --seed 7
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.
// The positive class of the confusion matrix is "defective" when present.
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sae/commands.hpp"
#include "sae/gradcheck.hpp"
#include "sae/kernels.hpp"

namespace {

using namespace sae;
using namespace sae::cli;

std::vector<std::size_t> parse_counts(const std::string& text, const char* flag) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw ConfigError(std::string(flag) + ": '" + item + "' is not a non-negative integer");
    }
  }
  return out;
}

std::vector<double> parse_reals(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  return out;
}

// Flags shared by train/eval/predict; each overrides the config file.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> data_dir;
  std::optional<double> val_fraction;
  std::optional<std::string> layers;
  std::optional<std::string> epochs;
  std::optional<std::string> lr;
  std::optional<std::string> batch_size;
  std::optional<std::size_t> log_every;
  std::optional<std::string> target;
  std::optional<std::string> filter;
  bool print_config = false;

  void attach(CLI::App* app, bool with_data) {
    app->add_option("--config", config_path, "JSON run config");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--val-fraction", val_fraction, "validation fraction in (0,1)");
    app->add_option("--layers", layers, "layer widths n,m1,m2");
    app->add_option("--epochs", epochs, "epochs per phase p1,p2,softmax,finetune");
    app->add_option("--lr", lr, "learning rate, one value or one per phase");
    app->add_option("--batch-size", batch_size, "minibatch size or 'full'");
    app->add_option("--log-every", log_every, "trace interval in iterations");
    app->add_option("--target", target, "image size HxW");
    app->add_option("--filter", filter, "resize filter: nearest or bilinear");
    app->add_flag("--print-config", print_config, "print the resolved config and exit");
    if (with_data) app->add_option("--data", data_dir, "class-per-subdirectory image root");
  }

  bool any_set() const {
    return !config_path.empty() || seed || val_fraction || layers || epochs || lr || batch_size ||
           log_every || target || filter;
  }

  RunConfig resolve() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (data_dir) cfg.data_dir = *data_dir;
    if (val_fraction) cfg.val_fraction = *val_fraction;
    if (layers) cfg.layers = parse_counts(*layers, "--layers");
    if (epochs) cfg.epochs = parse_counts(*epochs, "--epochs");
    if (lr) cfg.learning_rates = parse_reals(*lr, "--lr");
    if (batch_size) {
      if (*batch_size == "full") {
        cfg.batch_size = 0;
      } else {
        const auto v = parse_counts(*batch_size, "--batch-size");
        if (v.size() != 1 || v[0] == 0) throw ConfigError("--batch-size must be a positive integer or 'full'");
        cfg.batch_size = v[0];
      }
    }
    if (log_every) cfg.log_every = *log_every;
    if (target) {
      const auto x = target->find('x');
      if (x == std::string::npos) throw ConfigError("--target must look like HxW");
      const auto h = parse_counts(target->substr(0, x), "--target");
      const auto w = parse_counts(target->substr(x + 1), "--target");
      if (h.size() != 1 || w.size() != 1) throw ConfigError("--target must look like HxW");
      cfg.target_height = h[0];
      cfg.target_width = w[0];
    }
    if (filter) {
      try {
        cfg.resize_filter = parse_resize_filter(*filter);
      } catch (const ParameterError& e) {
        throw ConfigError(e.what());
      }
    }
    cfg.validate();
    return cfg;
  }
};

std::optional<std::pair<std::size_t, std::size_t>> parse_dims(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto x = text.find('x');
  if (x == std::string::npos) throw ConfigError("--dims must look like HxW");
  const auto h = parse_counts(text.substr(0, x), "--dims");
  const auto w = parse_counts(text.substr(x + 1), "--dims");
  if (h.size() != 1 || w.size() != 1) throw ConfigError("--dims must look like HxW");
  return std::pair{h[0], w[0]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stacked sparse autoencoder classifier (positive class: defective)"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");

  ConfigFlags train_flags;
  auto* train = app.add_subcommand("train", "ingest, split, pretrain, fine-tune, save");
  train_flags.attach(train, true);
  train->add_option("--out", train_flags.out_dir, "output directory");

  ConfigFlags eval_flags;
  std::string eval_model;
  std::string eval_data;
  std::string eval_subset = "all";
  auto* eval = app.add_subcommand("eval", "evaluate a model on an image directory");
  eval_flags.attach(eval, false);
  eval->add_option("--model", eval_model, "model file")->required();
  eval->add_option("--data", eval_data, "class-per-subdirectory image root")->required();
  eval->add_option("--subset", eval_subset, "all, train or val (re-split with config seed)");

  ConfigFlags predict_flags;
  std::string predict_model;
  std::vector<std::string> predict_images;
  auto* predict_cmd = app.add_subcommand("predict", "classify individual images");
  predict_flags.attach(predict_cmd, false);
  predict_cmd->add_option("--model", predict_model, "model file")->required();
  predict_cmd->add_option("images", predict_images, "PGM/PPM images")->required();

  std::string vis_model;
  std::size_t vis_layer = 1;
  std::string vis_out = "weights";
  std::string vis_dims;
  auto* visualize = app.add_subcommand("visualize", "write encoder weights as PGM images");
  visualize->add_option("--model", vis_model, "model file")->required();
  visualize->add_option("--layer", vis_layer, "encoder layer, 1-based");
  visualize->add_option("--out", vis_out, "output directory");
  visualize->add_option("--dims", vis_dims, "HxW when the input width is not square");

  std::uint64_t gc_seed = 1;
  std::size_t gc_configs = 20;
  auto* gradcheck = app.add_subcommand("gradcheck", "analytic vs finite-difference gradients");
  gradcheck->add_option("--seed", gc_seed, "random seed");
  gradcheck->add_option("--configs", gc_configs, "random configurations per component");

  std::string synth_out = "synthetic";
  std::size_t synth_per_class = 100;
  std::size_t synth_side = 16;
  double synth_noise = 0.1;
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "write a synthetic two-class PGM corpus");
  synth->add_option("--out", synth_out, "output root");
  synth->add_option("--per-class", synth_per_class, "samples per class");
  synth->add_option("--side", synth_side, "image side in pixels");
  synth->add_option("--noise", synth_noise, "Gaussian pixel noise sd");
  synth->add_option("--seed", synth_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_line("config", kConfigError, e.what()) << '\n';
    return kConfigError;
  }
  if (threads > 0) kernels::set_threads(threads);

  try {
    if (train->parsed()) {
      const RunConfig cfg = train_flags.resolve();
      if (train_flags.print_config) {
        std::cout << cfg.to_json().dump(2) << '\n';
        return kSuccess;
      }
      cmd_train(cfg, std::cout);
    } else if (eval->parsed()) {
      std::optional<RunConfig> cfg;
      if (eval_flags.any_set()) cfg = eval_flags.resolve();
      if (eval_flags.print_config) {
        std::cout << (cfg ? *cfg : RunConfig{}).to_json().dump(2) << '\n';
        return kSuccess;
      }
      cmd_eval(eval_model, eval_data, cfg, parse_subset(eval_subset), std::cout);
    } else if (predict_cmd->parsed()) {
      std::optional<RunConfig> cfg;
      if (predict_flags.any_set()) cfg = predict_flags.resolve();
      std::vector<std::filesystem::path> images(predict_images.begin(), predict_images.end());
      cmd_predict(predict_model, images, cfg, std::cout);
    } else if (visualize->parsed()) {
      cmd_visualize(vis_model, vis_layer, vis_out, parse_dims(vis_dims), std::cout);
    } else if (gradcheck->parsed()) {
      const double worst = cmd_gradcheck(gc_seed, gc_configs, std::cout);
      if (!(worst <= kGradCheckTolerance)) {
        std::cerr << error_line("numeric", kNumericError,
                                "gradient check exceeded tolerance: " + std::to_string(worst))
                  << '\n';
        return kNumericError;
      }
    } else if (synth->parsed()) {
      cmd_synth(synth_out, synth_per_class, synth_side, synth_noise, synth_seed, std::cout);
    }
  } catch (const Error& e) {
    const int code = exit_code_for(e);
    std::cerr << error_line(e.kind(), code, e.what()) << '\n';
    return code;
  } catch (const std::bad_alloc&) {
    std::cerr << error_line("memory", kFailure, "out of memory") << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << error_line("internal", kFailure, e.what()) << '\n';
    return kFailure;
  }
  return kSuccess;
}
